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

#include "phri/sim/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "phri/common/binary_io.hpp"
#include "phri/common/error.hpp"
#include "phri/common/random.hpp"

namespace phri::sim {
namespace {

using nlohmann::json;

constexpr const char* kManifestName = "manifest.json";
const char* const kSplits[] = {"train", "val", "test"};

std::string schedule_name(Schedule s) { return s == Schedule::kSingle ? "single" : "four-phase"; }

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double parse_double(const std::string& field, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": bad number '" + field + "'");
  }
  return v;
}

}  // namespace

DatasetSpec DatasetSpec::desk_scale() { return DatasetSpec{}; }

DatasetSpec DatasetSpec::full_scale() {
  DatasetSpec s;
  s.train_per_condition = 11;
  s.val_per_condition = 3;
  s.test_per_condition = 3;
  s.n_steps = 900;
  return s;
}

void DatasetSpec::validate() const {
  if (train_per_condition < 1 || val_per_condition < 0 || test_per_condition < 0) {
    throw ParameterError("need at least one training trajectory per condition");
  }
  if (n_steps < 2) throw ParameterError("trajectories need at least two steps");
  params.motor.validate();
  params.human.validate();
}

std::vector<int> TrajectoryRecord::labels() const {
  std::vector<int> out(static_cast<std::size_t>(n_steps));
  if (phases.empty()) return out;
  const int len = phase_length(n_steps, static_cast<int>(phases.size()));
  for (int k = 0; k < n_steps; ++k) out[static_cast<std::size_t>(k)] = phases[static_cast<std::size_t>(k / len)].index();
  return out;
}

Eigen::MatrixXd Standardization::apply(const Eigen::MatrixXd& obs) const {
  if (obs.cols() != mean.size()) throw ParameterError("standardization width mismatch");
  return ((obs.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array()).matrix();
}

Standardization fit_standardization(const std::vector<const Eigen::MatrixXd*>& blocks) {
  if (blocks.empty()) throw ParameterError("no data to standardize");
  const Eigen::Index d = blocks.front()->cols();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  double n = 0.0;
  for (const auto* b : blocks) {
    if (b->cols() != d) throw ParameterError("standardization width mismatch");
    sum += b->colwise().sum().transpose();
    n += static_cast<double>(b->rows());
  }
  Standardization s;
  s.mean = sum / n;
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(d);
  for (const auto* b : blocks) sq += (b->rowwise() - s.mean.transpose()).array().square().colwise().sum().matrix().transpose();
  s.scale = (sq / n).cwiseSqrt();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(s.scale(i) > 1e-12)) s.scale(i) = 1.0;
  }
  return s;
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  json j;
  j["schema_version"] = m.schema_version;
  j["generator_version"] = m.generator_version;
  j["dt"] = m.dt;
  j["n_steps"] = m.n_steps;
  j["base_seed"] = m.base_seed;
  j["schedule"] = m.schedule;
  j["noise_sigma"] = m.noise_sigma;
  j["plant_tau"] = m.plant_tau;
  json trajs = json::array();
  for (const auto& r : m.trajectories) {
    json phases = json::array();
    for (const auto& c : r.phases) phases.push_back(to_string(c));
    trajs.push_back({{"id", r.id},
                     {"split", r.split},
                     {"condition", to_string(r.condition)},
                     {"seed", r.seed},
                     {"n_steps", r.n_steps},
                     {"phases", phases}});
  }
  j["trajectories"] = trajs;
  j["observation_stats"] = {{"mean", to_vector(m.observation_stats.mean)},
                            {"scale", to_vector(m.observation_stats.scale)}};
  j["action_stats"] = {{"mean", to_vector(m.action_stats.mean)}, {"scale", to_vector(m.action_stats.scale)}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    json j = json::parse(in);
    Manifest m;
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != kManifestSchemaVersion) {
      throw IoError("unsupported manifest schema " + std::to_string(m.schema_version));
    }
    m.generator_version = j.at("generator_version").get<std::string>();
    m.dt = j.at("dt").get<double>();
    m.n_steps = j.at("n_steps").get<int>();
    m.base_seed = j.at("base_seed").get<std::uint64_t>();
    m.schedule = j.at("schedule").get<std::string>();
    m.noise_sigma = j.at("noise_sigma").get<double>();
    m.plant_tau = j.at("plant_tau").get<double>();
    for (const auto& t : j.at("trajectories")) {
      TrajectoryRecord r;
      r.id = t.at("id").get<std::string>();
      r.split = t.at("split").get<std::string>();
      r.condition = condition_from_string(t.at("condition").get<std::string>());
      r.seed = t.at("seed").get<std::uint64_t>();
      r.n_steps = t.at("n_steps").get<int>();
      for (const auto& p : t.at("phases")) r.phases.push_back(condition_from_string(p.get<std::string>()));
      m.trajectories.push_back(std::move(r));
    }
    m.observation_stats.mean = from_vector(j.at("observation_stats").at("mean").get<std::vector<double>>());
    m.observation_stats.scale = from_vector(j.at("observation_stats").at("scale").get<std::vector<double>>());
    m.action_stats.mean = from_vector(j.at("action_stats").at("mean").get<std::vector<double>>());
    m.action_stats.scale = from_vector(j.at("action_stats").at("scale").get<std::vector<double>>());
    return m;
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  } catch (const ParameterError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << 't';
  for (int i = 0; i < traj.observations.cols(); ++i) out << ",o_" << i;
  for (int i = 0; i < traj.actions.cols(); ++i) out << ",a_" << i;
  out << '\n';
  for (Eigen::Index k = 0; k < traj.steps(); ++k) {
    out << io::format_double(static_cast<double>(k) * traj.dt);
    for (Eigen::Index i = 0; i < traj.observations.cols(); ++i) out << ',' << io::format_double(traj.observations(k, i));
    for (Eigen::Index i = 0; i < traj.actions.cols(); ++i) out << ',' << io::format_double(traj.actions(k, i));
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void read_trajectory_csv(const std::filesystem::path& path, Eigen::MatrixXd& observations, Eigen::MatrixXd& actions) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  int n_obs = 0;
  int n_act = 0;
  {
    std::stringstream header(line);
    std::string name;
    std::getline(header, name, ',');
    if (name != "t") throw IoError(path.string() + ": header must start with t");
    while (std::getline(header, name, ',')) {
      if (name == "o_" + std::to_string(n_obs) && n_act == 0) {
        ++n_obs;
      } else if (name == "a_" + std::to_string(n_act)) {
        ++n_act;
      } else {
        throw IoError(path.string() + ": unexpected column '" + name + "'");
      }
    }
  }
  std::vector<double> values;
  std::size_t rows = 0;
  const std::size_t width = static_cast<std::size_t>(1 + n_obs + n_act);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    std::size_t fields = 0;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string field = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      values.push_back(parse_double(field, path, rows + 1));
      ++fields;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields != width) throw IoError(path.string() + ":" + std::to_string(rows + 1) + ": wrong field count");
  }
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> all(values.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
  observations = all.middleCols(1, n_obs);
  actions = all.rightCols(n_act);
}

Manifest generate_dataset(const DatasetSpec& spec, const std::filesystem::path& dir, bool force) {
  spec.validate();
  namespace fs = std::filesystem;
  const fs::path manifest_path = dir / kManifestName;
  if (fs::exists(manifest_path)) {
    if (!force) throw IoError(dir.string() + " already holds a dataset; pass --force to overwrite");
    for (const auto& r : read_manifest(manifest_path).trajectories) fs::remove(dir / (r.id + ".csv"));
    fs::remove(manifest_path);
  }
  fs::create_directories(dir);

  Manifest m;
  m.dt = spec.params.motor.dt;
  m.n_steps = spec.n_steps;
  m.base_seed = spec.seed;
  m.schedule = schedule_name(spec.params.schedule);
  m.noise_sigma = spec.params.human.noise_sigma;
  m.plant_tau = spec.params.motor.plant_tau;

  const int counts[] = {spec.train_per_condition, spec.val_per_condition, spec.test_per_condition};
  std::vector<const Eigen::MatrixXd*> train_obs, train_act;
  std::vector<Trajectory> train_keep;
  train_keep.reserve(static_cast<std::size_t>(spec.train_per_condition * kConditionCount));
  std::uint64_t ordinal = 0;
  for (int s = 0; s < 3; ++s) {
    for (const Condition& c : all_conditions()) {
      for (int i = 0; i < counts[s]; ++i, ++ordinal) {
        TrajectoryRecord r;
        r.split = kSplits[s];
        r.condition = c;
        r.seed = derive_seed(spec.seed, ordinal);
        r.n_steps = spec.n_steps;
        r.phases = phase_conditions(c, spec.params.schedule);
        char index[16];
        std::snprintf(index, sizeof index, "%02d", i);
        r.id = r.split + "_" + to_string(c) + "_" + index;

        Trajectory traj = generate_trajectory(c, r.seed, spec.n_steps, spec.params);
        if (spec.params.schedule == Schedule::kSingle && speed_is_inferable(traj.steps(), traj.dt) &&
            infer_speed(c.motion, traj.actions, traj.dt, spec.params.timing) != c.speed) {
          throw NumericError("generated trajectory " + r.id + " does not match its speed label");
        }
        write_trajectory_csv(traj, dir / (r.id + ".csv"));
        m.trajectories.push_back(std::move(r));
        if (s == 0) {
          train_keep.push_back(std::move(traj));
          train_obs.push_back(&train_keep.back().observations);
          train_act.push_back(&train_keep.back().actions);
        }
      }
    }
  }
  m.observation_stats = fit_standardization(train_obs);
  m.action_stats = fit_standardization(train_act);
  write_manifest(m, manifest_path);
  return m;
}

std::vector<const Trajectory*> Dataset::split(const std::string& name) const {
  std::vector<const Trajectory*> out;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    if (manifest.trajectories[i].split == name) out.push_back(&trajectories[i]);
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset d;
  d.manifest = read_manifest(dir / kManifestName);
  for (const auto& r : d.manifest.trajectories) {
    Trajectory t;
    t.condition = r.condition;
    t.seed = r.seed;
    t.dt = d.manifest.dt;
    t.labels = r.labels();
    read_trajectory_csv(dir / (r.id + ".csv"), t.observations, t.actions);
    if (t.steps() != r.n_steps || t.observations.cols() != kObservationDim || t.actions.cols() != kActionDim) {
      throw IoError(r.id + ": shape does not match the manifest");
    }
    t.commands.resize(t.steps(), kActionDim);
    Eigen::RowVector3d acc = Eigen::RowVector3d::Zero();
    for (Eigen::Index k = 0; k < t.steps(); ++k) {
      acc += t.actions.row(k);
      t.commands.row(k) = acc;
    }
    d.trajectories.push_back(std::move(t));
  }
  return d;
}

}  // namespace phri::sim
