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

#include "phri/sim/condition.hpp"

#include "phri/common/error.hpp"

namespace phri::sim {

int Condition::index() const {
  return (motion == Motion::kSwing ? 4 : 0) + (arm == Arm::kRight ? 2 : 0) + (speed == Speed::kFast ? 1 : 0);
}

Condition Condition::from_index(int index) {
  if (index < 0 || index >= kConditionCount) throw ParameterError("condition index out of range");
  return Condition{(index & 4) ? Motion::kSwing : Motion::kRotation, (index & 2) ? Arm::kRight : Arm::kLeft,
                   (index & 1) ? Speed::kFast : Speed::kSlow};
}

std::array<Condition, kConditionCount> all_conditions() {
  std::array<Condition, kConditionCount> out;
  for (int i = 0; i < kConditionCount; ++i) out[static_cast<std::size_t>(i)] = Condition::from_index(i);
  return out;
}

std::string to_string(Motion motion) { return motion == Motion::kRotation ? "rotation" : "swing"; }
std::string to_string(Arm arm) { return arm == Arm::kLeft ? "left" : "right"; }
std::string to_string(Speed speed) { return speed == Speed::kSlow ? "slow" : "fast"; }

std::string to_string(const Condition& condition) {
  return to_string(condition.motion) + "-" + to_string(condition.arm) + "-" + to_string(condition.speed);
}

Condition condition_from_string(const std::string& name) {
  for (const Condition& c : all_conditions()) {
    if (to_string(c) == name) return c;
  }
  throw ParameterError("unknown condition '" + name + "'");
}

}  // namespace phri::sim
