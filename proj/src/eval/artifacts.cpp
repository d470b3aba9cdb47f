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

#include "phri/eval/artifacts.hpp"

#include <fstream>

#include "phri/common/binary_io.hpp"
#include "phri/common/error.hpp"
#include "phri/sim/condition.hpp"

namespace phri::eval {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void write_curve_csv(const std::filesystem::path& path, const std::vector<model::EpochRecord>& curve) {
  auto out = open_out(path);
  out << "epoch,train_loss,val_action_mse,val_obs_mse\n";
  for (const auto& r : curve) {
    out << r.epoch << ',' << io::format_double(r.train_loss) << ',' << io::format_double(r.val_action_mse) << ','
        << io::format_double(r.val_obs_mse) << '\n';
  }
  close_out(out, path);
}

LatentSet collect_latents(const model::PhriModel& model, const std::vector<model::Sequence>& sequences) {
  LatentSet set;
  Eigen::Index total = 0;
  for (const auto& s : sequences) total += s.steps();
  set.points.resize(total, model.config().latent_dim);
  Eigen::Index row = 0;
  for (const auto& s : sequences) {
    if (static_cast<Eigen::Index>(s.labels.size()) != s.steps()) {
      throw ParameterError("sequence " + s.id + " needs one label per step");
    }
    set.points.middleRows(row, s.steps()) = model::encode_latent(model, s);
    for (Eigen::Index t = 0; t < s.steps(); ++t) {
      set.trajectory.push_back(s.id);
      set.step.push_back(static_cast<int>(t));
      set.label.push_back(s.labels[static_cast<std::size_t>(t)]);
    }
    row += s.steps();
  }
  return set;
}

void write_latent_csv(const std::filesystem::path& path, const LatentSet& latents) {
  auto out = open_out(path);
  out << "trajectory,t,label,condition";
  for (Eigen::Index j = 0; j < latents.points.cols(); ++j) out << ",s_" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < latents.points.rows(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    out << latents.trajectory[k] << ',' << latents.step[k] << ',' << latents.label[k] << ','
        << sim::to_string(sim::Condition::from_index(latents.label[k]));
    for (Eigen::Index j = 0; j < latents.points.cols(); ++j) out << ',' << io::format_double(latents.points(i, j));
    out << '\n';
  }
  close_out(out, path);
}

LatentMetrics latent_metrics(const LatentSet& latents) {
  return {silhouette(latents.points, latents.label), centroid_distances(latents.points, latents.label)};
}

void write_latent_metrics_csv(const std::filesystem::path& path, const LatentMetrics& metrics) {
  auto out = open_out(path);
  out << "metric,a,b,value\n";
  out << "silhouette,,," << (metrics.silhouette ? io::format_double(*metrics.silhouette) : "not-applicable") << '\n';
  const auto& c = metrics.centroids;
  for (std::size_t i = 0; i < c.labels.size(); ++i) {
    for (std::size_t j = i + 1; j < c.labels.size(); ++j) {
      out << "centroid_distance," << sim::to_string(sim::Condition::from_index(c.labels[i])) << ','
          << sim::to_string(sim::Condition::from_index(c.labels[j])) << ','
          << io::format_double(c.distance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << '\n';
    }
  }
  close_out(out, path);
}

}  // namespace phri::eval
