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

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace phri::eval {

/// Mean silhouette coefficient of labeled points (rows) under Euclidean
/// distance. Empty when fewer than two labels are present or any label has
/// fewer than two points.
std::optional<double> silhouette(const Eigen::MatrixXd& points, const std::vector<int>& labels);

/// Distances between label centroids, labels in ascending order.
struct CentroidDistances {
  std::vector<int> labels;
  Eigen::MatrixXd distance;
};

CentroidDistances centroid_distances(const Eigen::MatrixXd& points, const std::vector<int>& labels);

}  // namespace phri::eval
