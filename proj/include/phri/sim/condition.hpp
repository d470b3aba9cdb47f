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

#include <array>
#include <string>

namespace phri::sim {

enum class Motion { kRotation, kSwing };
enum class Arm { kLeft, kRight };
enum class Speed { kSlow, kFast };

struct Condition {
  Motion motion = Motion::kRotation;
  Arm arm = Arm::kRight;
  Speed speed = Speed::kSlow;

  /// Dense index in [0, 8), ordered motion-major, then arm, then speed.
  int index() const;
  static Condition from_index(int index);

  bool operator==(const Condition&) const = default;
};

inline constexpr int kConditionCount = 8;

std::array<Condition, kConditionCount> all_conditions();

/// Names like "rotation-right-slow".
std::string to_string(const Condition& condition);
Condition condition_from_string(const std::string& name);

std::string to_string(Motion motion);
std::string to_string(Arm arm);
std::string to_string(Speed speed);

}  // namespace phri::sim
