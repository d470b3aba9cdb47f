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

#include "phri/eval/ablation.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "phri/common/binary_io.hpp"
#include "phri/common/error.hpp"
#include "phri/eval/artifacts.hpp"
#include "phri/model/checkpoint.hpp"

namespace phri::eval {

namespace {

using nlohmann::json;

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string cell_name(const model::AblationFlags& flags, std::uint64_t seed) {
  return flags.label() + "_seed" + std::to_string(seed);
}

void write_cell_result(const std::filesystem::path& path, const CellResult& r) {
  json j;
  j["flags"] = r.flags.label();
  j["seed"] = r.seed;
  j["ok"] = r.ok;
  j["message"] = r.message;
  j["action_mse"] = r.action_mse;
  j["obs_mse"] = r.obs_mse;
  j["action_per_trajectory"] = r.action_per_trajectory;
  j["obs_per_trajectory"] = r.obs_per_trajectory;
  j["silhouette"] = optional_number(r.silhouette);
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

CellResult read_cell_result(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    json j = json::parse(in);
    CellResult r;
    r.flags = model::AblationFlags::parse(j.at("flags").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.ok = j.at("ok").get<bool>();
    r.message = j.at("message").get<std::string>();
    r.action_mse = j.at("action_mse").get<double>();
    r.obs_mse = j.at("obs_mse").get<double>();
    r.action_per_trajectory = j.at("action_per_trajectory").get<std::vector<double>>();
    r.obs_per_trajectory = j.at("obs_per_trajectory").get<std::vector<double>>();
    r.silhouette = read_optional(j.at("silhouette"));
    return r;
  } catch (const json::exception& e) {
    throw IoError("malformed cell result " + path.string() + ": " + e.what());
  }
}

CellResult run_cell(const sim::Dataset& dataset, const RunConfig& config, const model::AblationFlags& flags,
                    std::uint64_t seed, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  RunConfig cell = config;
  cell.model.flags = flags;
  cell.model.seed = seed;
  cell.seeds = {seed};
  write_run_config(dir / "config.ini", cell);

  CellResult r;
  r.flags = flags;
  r.seed = seed;
  const auto train = model::make_sequences(dataset, "train");
  const auto val = model::make_sequences(dataset, "val");
  const auto test = model::make_sequences(dataset, "test");

  model::PhriModel m(cell.model);
  auto opt = model::make_optimizer(m);
  model::TrainResult tr = model::train(m, *opt, train, val, cell.train_options());
  write_curve_csv(dir / "curve.csv", tr.curve);
  save_model(dir / "model.bin", m, *opt);
  if (tr.aborted) {
    r.message = tr.message;
    write_cell_result(dir / "result.json", r);
    return r;
  }

  model::MseReport rep = model::evaluate(m, test);
  r.action_per_trajectory = rep.action_per_trajectory;
  r.obs_per_trajectory = rep.obs_per_trajectory;
  r.action_mse = rep.action.mean;
  r.obs_mse = rep.obs.mean;
  LatentSet latents = collect_latents(m, test);
  LatentMetrics metrics = latent_metrics(latents);
  write_latent_csv(dir / "latent.csv", latents);
  write_latent_metrics_csv(dir / "latent_metrics.csv", metrics);
  r.silhouette = metrics.silhouette;
  r.ok = std::isfinite(r.action_mse) && std::isfinite(r.obs_mse);
  if (!r.ok) r.message = "non-finite test error";
  write_cell_result(dir / "result.json", r);
  return r;
}

AblationReport aggregate(const std::vector<CellResult>& cells, const std::vector<std::uint64_t>& seeds) {
  AblationReport report;
  report.seeds = seeds;
  report.cells = cells;
  for (const auto& flags : model::AblationFlags::all()) {
    AblationRow row;
    row.flags = flags;
    std::vector<double> action, obs;
    double sil_sum = 0.0;
    int sil_count = 0;
    for (const auto& c : cells) {
      if (!(c.flags == flags)) continue;
      if (!c.ok) {
        ++row.failures;
        continue;
      }
      ++row.seeds;
      action.push_back(c.action_mse);
      obs.push_back(c.obs_mse);
      if (c.silhouette) {
        sil_sum += *c.silhouette;
        ++sil_count;
      }
    }
    row.action = model::summarize(action);
    row.obs = model::summarize(obs);
    if (sil_count > 0) row.silhouette = sil_sum / sil_count;
    report.rows.push_back(row);
  }
  return report;
}

void write_report_csv(const std::filesystem::path& path, const AblationReport& report) {
  std::ofstream out(path);
  out << "condition,seeds,failures,action_mean,action_median,action_std,obs_mean,obs_median,obs_std,silhouette\n";
  for (const auto& r : report.rows) {
    out << r.flags.label() << ',' << r.seeds << ',' << r.failures << ',' << io::format_double(r.action.mean) << ','
        << io::format_double(r.action.median) << ',' << io::format_double(r.action.std) << ','
        << io::format_double(r.obs.mean) << ',' << io::format_double(r.obs.median) << ','
        << io::format_double(r.obs.std) << ',' << (r.silhouette ? io::format_double(*r.silhouette) : "") << '\n';
  }
  if (!out) throw IoError("cannot write " + path.string());
}

void write_report_markdown(const std::filesystem::path& path, const AblationReport& report) {
  // Best mean per column in bold, as in the usual results table.
  double best_action = INFINITY, best_obs = INFINITY;
  for (const auto& r : report.rows) {
    if (r.seeds == 0) continue;
    best_action = std::min(best_action, r.action.mean);
    best_obs = std::min(best_obs, r.obs.mean);
  }
  auto cell = [](double v, bool bold) {
    std::ostringstream s;
    s << std::setprecision(6) << std::fixed << v;
    return bold ? "**" + s.str() + "**" : s.str();
  };
  std::ofstream out(path);
  out << "# Ablation on the test split\n\n";
  out << "Statistics over per-seed test means; seeds:";
  for (auto s : report.seeds) out << ' ' << s;
  out << "\n\n";
  out << "| Condition | Seeds | Action mean | Action median | Action std | Obs mean | Obs median | Obs std | Silhouette |\n";
  out << "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : report.rows) {
    out << "| " << r.flags.label() << " | " << r.seeds;
    if (r.failures > 0) out << " (" << r.failures << " failed)";
    out << " | " << cell(r.action.mean, r.seeds > 0 && r.action.mean == best_action) << " | "
        << cell(r.action.median, false) << " | " << cell(r.action.std, false) << " | "
        << cell(r.obs.mean, r.seeds > 0 && r.obs.mean == best_obs) << " | " << cell(r.obs.median, false) << " | "
        << cell(r.obs.std, false) << " | " << (r.silhouette ? cell(*r.silhouette, false) : "n/a") << " |\n";
  }
  if (!out) throw IoError("cannot write " + path.string());
}

AblationReport run_ablation(const sim::Dataset& dataset, const RunConfig& config,
                            const std::filesystem::path& out_dir) {
  config.validate();
  std::filesystem::create_directories(out_dir / "cells");
  write_run_config(out_dir / "config.ini", config);

  std::vector<std::pair<model::AblationFlags, std::uint64_t>> work;
  for (auto seed : config.seeds) {
    for (const auto& flags : model::AblationFlags::all()) work.emplace_back(flags, seed);
  }
  auto dir_of = [&](std::size_t i) { return out_dir / "cells" / cell_name(work[i].first, work[i].second); };

  // Any exception inside a worker becomes a failed cell, never a crash of
  // the whole sweep.
  auto run_one = [&](std::size_t i) {
    std::filesystem::remove_all(dir_of(i));
    try {
      run_cell(dataset, config, work[i].first, work[i].second, dir_of(i));
    } catch (const std::exception& e) {
      CellResult r;
      r.flags = work[i].first;
      r.seed = work[i].second;
      r.message = e.what();
      std::filesystem::create_directories(dir_of(i));
      write_cell_result(dir_of(i) / "result.json", r);
    }
  };

  if (config.jobs == 1) {
    for (std::size_t i = 0; i < work.size(); ++i) run_one(i);
  } else {
    std::size_t next = 0;
    int running = 0;
    while (next < work.size() || running > 0) {
      while (running < config.jobs && next < work.size()) {
        const pid_t pid = ::fork();
        if (pid < 0) throw IoError("fork failed");
        if (pid == 0) {
          run_one(next);
          std::_Exit(0);
        }
        ++next;
        ++running;
      }
      int status = 0;
      if (::wait(&status) > 0) --running;
    }
  }

  std::vector<CellResult> cells;
  for (std::size_t i = 0; i < work.size(); ++i) {
    const auto path = dir_of(i) / "result.json";
    if (std::filesystem::exists(path)) {
      cells.push_back(read_cell_result(path));
    } else {
      CellResult r;
      r.flags = work[i].first;
      r.seed = work[i].second;
      r.message = "worker exited without a result";
      cells.push_back(r);
    }
  }
  AblationReport report = aggregate(cells, config.seeds);
  write_report_csv(out_dir / "report.csv", report);
  write_report_markdown(out_dir / "report.md", report);
  return report;
}

}  // namespace phri::eval
