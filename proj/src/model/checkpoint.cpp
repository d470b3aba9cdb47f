// Copyright 2026 The phri Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phri/model/checkpoint.hpp"

#include <fstream>

#include "phri/common/binary_io.hpp"
#include "phri/common/error.hpp"

namespace phri::model {
namespace {

constexpr char kMagic[] = "PHRI-MODEL";
constexpr std::uint32_t kVersion = 1;

}  // namespace

std::unique_ptr<nn::AmsGrad> make_optimizer(PhriModel& model) {
  nn::AmsGradOptions o;
  o.lr = model.config().lr;
  return std::make_unique<nn::AmsGrad>(model.params(), o);
}

void save_model(const std::filesystem::path& path, const PhriModel& model, const nn::AmsGrad& optimizer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  io::write_u32(out, kVersion);
  const auto cfg = model.config().to_map();
  io::write_u64(out, cfg.size());
  for (const auto& [k, v] : cfg) {
    io::write_string(out, k);
    io::write_string(out, v);
  }
  model.state_reservoir().save(out);
  model.action_reservoir().save(out);
  nn::save_checkpoint(out, model.params(), optimizer);
  if (!out) throw IoError("failed writing " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(kMagic));
  if (in.gcount() != sizeof(kMagic) || std::string(magic, sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw IoError(path.string() + " is not a model checkpoint");
  }
  const auto version = io::read_u32(in);
  if (version != kVersion) throw IoError("unsupported model checkpoint version " + std::to_string(version));
  std::map<std::string, std::string> cfg;
  const auto n = io::read_u64(in);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string k = io::read_string(in);
    cfg[k] = io::read_string(in);
  }
  ModelConfig config;
  try {
    config = ModelConfig::from_map(cfg);
  } catch (const ParameterError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  crc::ReservoirParams rs = crc::ReservoirParams::load(in);
  crc::ReservoirParams ra = crc::ReservoirParams::load(in);
  LoadedModel out;
  out.model = std::make_unique<PhriModel>(config, std::move(rs), std::move(ra));
  out.optimizer = make_optimizer(*out.model);
  nn::load_checkpoint(in, out.model->params(), *out.optimizer);
  return out;
}

}  // namespace phri::model
