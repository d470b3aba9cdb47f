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

#pragma once

#include <filesystem>
#include <memory>

#include "phri/model/model.hpp"
#include "phri/nn/optimizer.hpp"

namespace phri::model {

/// Binary model snapshot: configuration, both reservoirs, parameters and
/// optimizer state.
void save_model(const std::filesystem::path& path, const PhriModel& model, const nn::AmsGrad& optimizer);

struct LoadedModel {
  std::unique_ptr<PhriModel> model;
  std::unique_ptr<nn::AmsGrad> optimizer;
};

LoadedModel load_model(const std::filesystem::path& path);

/// Optimizer with the configuration's learning rate and default moments.
std::unique_ptr<nn::AmsGrad> make_optimizer(PhriModel& model);

}  // namespace phri::model
