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

#include "phri/eval/silhouette.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "phri/common/error.hpp"

namespace phri::eval {

namespace {

void check(const Eigen::MatrixXd& points, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(points.rows()) != labels.size()) {
    throw ParameterError("silhouette needs one label per point");
  }
}

}  // namespace

std::optional<double> silhouette(const Eigen::MatrixXd& points, const std::vector<int>& labels) {
  check(points, labels);
  std::map<int, int> index;
  for (int l : labels) index.emplace(l, 0);
  if (index.size() < 2) return std::nullopt;
  int k = 0;
  for (auto& [label, slot] : index) slot = k++;

  const auto n = points.rows();
  std::vector<int> cls(static_cast<std::size_t>(n));
  std::vector<double> count(index.size(), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    cls[static_cast<std::size_t>(i)] = index[labels[static_cast<std::size_t>(i)]];
    count[static_cast<std::size_t>(cls[static_cast<std::size_t>(i)])] += 1.0;
  }
  if (*std::min_element(count.begin(), count.end()) < 2.0) return std::nullopt;

  // Row i of `sums` holds the total distance from point i to each cluster.
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (points.row(i) - points.row(j)).norm();
      sums(i, cls[static_cast<std::size_t>(j)]) += d;
      sums(j, cls[static_cast<std::size_t>(i)]) += d;
    }
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int own = cls[static_cast<std::size_t>(i)];
    const double a = sums(i, own) / (count[static_cast<std::size_t>(own)] - 1.0);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c != own) b = std::min(b, sums(i, c) / count[static_cast<std::size_t>(c)]);
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

CentroidDistances centroid_distances(const Eigen::MatrixXd& points, const std::vector<int>& labels) {
  check(points, labels);
  std::map<int, std::pair<Eigen::RowVectorXd, double>> acc;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    auto [it, fresh] = acc.try_emplace(labels[static_cast<std::size_t>(i)],
                                       Eigen::RowVectorXd::Zero(points.cols()), 0.0);
    it->second.first += points.row(i);
    it->second.second += 1.0;
  }
  CentroidDistances out;
  std::vector<Eigen::RowVectorXd> centres;
  for (const auto& [label, sum] : acc) {
    out.labels.push_back(label);
    centres.push_back(sum.first / sum.second);
  }
  const auto k = static_cast<Eigen::Index>(centres.size());
  out.distance = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      out.distance(i, j) = (centres[static_cast<std::size_t>(i)] - centres[static_cast<std::size_t>(j)]).norm();
    }
  }
  return out;
}

}  // namespace phri::eval
