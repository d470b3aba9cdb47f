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

#include "phri/eval/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "phri/common/error.hpp"

namespace phri::eval {

namespace {

namespace pt = boost::property_tree;

// Shortest text that reads back to the same double.
std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) throw ParameterError(key + ": not a number: " + text);
  return v;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) throw ParameterError(key + ": not an integer: " + text);
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  throw ParameterError(key + ": not a boolean: " + text);
}

std::vector<std::uint64_t> parse_seeds(const std::string& key, const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(start, end - start);
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    out.push_back(parse_int<std::uint64_t>(key, item));
    start = end + 1;
  }
  return out;
}

std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string s;
  for (std::size_t i = 0; i < seeds.size(); ++i) s += (i ? "," : "") + std::to_string(seeds[i]);
  return s;
}

// One settable key: how to print it and how to parse it.
struct Field {
  std::function<std::string()> get;
  std::function<void(const std::string&)> set;
};

Field dbl(const std::string& key, double& v) {
  return {[&v] { return shortest(v); }, [key, &v](const std::string& t) { v = parse_double(key, t); }};
}

Field integer(const std::string& key, int& v) {
  return {[&v] { return std::to_string(v); }, [key, &v](const std::string& t) { v = parse_int<int>(key, t); }};
}

using Section = std::map<std::string, Field>;

// Every section except [model], which goes through ModelConfig's own map.
std::map<std::string, Section> fields(RunConfig& c) {
  auto& d = c.dataset;
  auto& m = d.params.motor;
  auto& h = d.params.human;
  auto& p = d.params.timing;
  std::map<std::string, Section> s;
  s["dataset"] = {
      {"train_per_condition", integer("dataset.train_per_condition", d.train_per_condition)},
      {"val_per_condition", integer("dataset.val_per_condition", d.val_per_condition)},
      {"test_per_condition", integer("dataset.test_per_condition", d.test_per_condition)},
      {"n_steps", integer("dataset.n_steps", d.n_steps)},
      {"seed", {[&d] { return std::to_string(d.seed); },
                [&d](const std::string& t) { d.seed = parse_int<std::uint64_t>("dataset.seed", t); }}},
      {"schedule", {[&d] { return std::string(d.params.schedule == sim::Schedule::kSingle ? "single" : "four-phase"); },
                    [&d](const std::string& t) {
                      if (t == "single") {
                        d.params.schedule = sim::Schedule::kSingle;
                      } else if (t == "four-phase") {
                        d.params.schedule = sim::Schedule::kFourPhase;
                      } else {
                        throw ParameterError("dataset.schedule: expected single or four-phase, got " + t);
                      }
                    }}},
  };
  // The frame period is shared by controller and camera.
  s["motor"] = {{"m", dbl("motor.m", m.m)},
                {"c", dbl("motor.c", m.c)},
                {"k", dbl("motor.k", m.k)},
                {"eta", dbl("motor.eta", m.eta)},
                {"mu", dbl("motor.mu", m.mu)},
                {"kappa", dbl("motor.kappa", m.kappa)},
                {"dt", {[&m] { return shortest(m.dt); },
                        [&m, &h](const std::string& t) { h.dt = m.dt = parse_double("motor.dt", t); }}},
                {"plant_tau", dbl("motor.plant_tau", m.plant_tau)},
                {"plant_inertia", dbl("motor.plant_inertia", m.plant_inertia)}};
  s["human"] = {{"noise_sigma", dbl("human.noise_sigma", h.noise_sigma)},
                {"rope_spring", dbl("human.rope_spring", h.rope_spring)},
                {"rope_damping", dbl("human.rope_damping", h.rope_damping)},
                {"rope_swing", dbl("human.rope_swing", h.rope_swing)},
                {"sway_sigma", dbl("human.sway_sigma", h.sway_sigma)},
                {"sway_pole", dbl("human.sway_pole", h.sway_pole)},
                {"brace_drop", dbl("human.brace_drop", h.brace_drop)},
                {"brace_lean", dbl("human.brace_lean", h.brace_lean)},
                {"brace_lag", dbl("human.brace_lag", h.brace_lag)}};
  s["profile"] = {{"t_a", dbl("profile.t_a", p.t_a)}, {"t_c", dbl("profile.t_c", p.t_c)}, {"t_s", dbl("profile.t_s", p.t_s)}};
  s["train"] = {{"chunk_steps", integer("train.chunk_steps", c.chunk_steps)},
                {"step_per_chunk", {[&c] { return std::string(c.step_per_chunk ? "true" : "false"); },
                                    [&c](const std::string& t) { c.step_per_chunk = parse_bool("train.step_per_chunk", t); }}}};
  s["ablate"] = {{"seeds", {[&c] { return join_seeds(c.seeds); },
                            [&c](const std::string& t) { c.seeds = parse_seeds("ablate.seeds", t); }}},
                 {"jobs", integer("ablate.jobs", c.jobs)}};
  return s;
}

void set_key(RunConfig& c, const std::string& section, const std::string& key, const std::string& value) {
  if (section == "model") {
    c.model = model::ModelConfig::from_map({{key, value}}, c.model);
    return;
  }
  auto table = fields(c);
  auto sec = table.find(section);
  if (sec == table.end()) throw ParameterError("unknown config section [" + section + "]");
  auto f = sec->second.find(key);
  if (f == sec->second.end()) throw ParameterError("unknown key '" + key + "' in [" + section + "]");
  f->second.set(value);
}

}  // namespace

RunConfig RunConfig::desk_defaults() {
  RunConfig c;
  c.model.n_rc = 200;
  c.model.lr = 1e-3;
  c.model.batch_size = 4;
  c.model.epochs = 60;
  c.step_per_chunk = true;
  return c;
}

model::TrainOptions RunConfig::train_options() const {
  model::TrainOptions o;
  o.chunk_steps = chunk_steps;
  o.step_per_chunk = step_per_chunk;
  return o;
}

void RunConfig::validate() const {
  dataset.validate();
  model.validate();
  if (chunk_steps < 1) throw ParameterError("train.chunk_steps must be positive");
  if (seeds.empty()) throw ParameterError("ablate.seeds must not be empty");
  if (jobs < 1) throw ParameterError("ablate.jobs must be positive");
}

RunConfig load_run_config(const std::filesystem::path& path, const RunConfig& base) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw IoError("cannot read config " + path.string() + ": " + e.message());
  }
  RunConfig c = base;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ParameterError("key '" + section + "' outside any section");
    for (const auto& [key, value] : body) set_key(c, section, key, value.data());
  }
  c.validate();
  return c;
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ParameterError("override must look like section.key=value, got '" + assignment + "'");
  }
  set_key(config, assignment.substr(0, dot), assignment.substr(dot + 1, eq - dot - 1), assignment.substr(eq + 1));
}

void write_run_config(const std::filesystem::path& path, const RunConfig& config) {
  RunConfig copy = config;
  pt::ptree tree;
  for (const auto& [section, table] : fields(copy)) {
    for (const auto& [key, field] : table) tree.put(pt::ptree::path_type(section + "." + key, '.'), field.get());
  }
  for (const auto& [key, value] : config.model.to_map()) {
    tree.put(pt::ptree::path_type("model." + key, '.'), value);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  pt::write_ini(out, tree);
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace phri::eval
