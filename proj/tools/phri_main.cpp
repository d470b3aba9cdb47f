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

// Command-line entry point: dataset generation, training, ablation sweeps,
// evaluation, latent export and reservoir spectra.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phri/common/binary_io.hpp"
#include "phri/common/error.hpp"
#include "phri/crc/spectrum.hpp"
#include "phri/eval/ablation.hpp"
#include "phri/eval/artifacts.hpp"
#include "phri/eval/run_config.hpp"
#include "phri/model/checkpoint.hpp"

namespace fs = std::filesystem;
using namespace phri;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumeric = 2, kIo = 3 };

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool force = false;
  std::vector<std::string> overrides;
};

eval::RunConfig resolve(const Globals& g) {
  eval::RunConfig c = eval::RunConfig::desk_defaults();
  if (!g.config.empty()) c = eval::load_run_config(g.config, c);
  for (const auto& o : g.overrides) eval::apply_override(c, o);
  c.validate();
  return c;
}

fs::path require_out(const Globals& g) {
  if (g.out.empty()) throw ParameterError("--out is required");
  return g.out;
}

// Output directories holding a previous run are only reused with --force.
void prepare_out(const fs::path& dir, bool force) {
  if (fs::exists(dir / "config.ini") && !force) {
    throw IoError(dir.string() + " already holds a run; pass --force to overwrite");
  }
  fs::create_directories(dir);
}

void print_report(const model::MseReport& r) {
  std::printf("action MSE  mean %.6g  median %.6g  std %.6g\n", r.action.mean, r.action.median, r.action.std);
  std::printf("obs MSE     mean %.6g  median %.6g  std %.6g\n", r.obs.mean, r.obs.median, r.obs.std);
}

void write_eval_csv(const fs::path& path, const std::vector<model::Sequence>& seqs, const model::MseReport& r) {
  std::ofstream out(path);
  out << "trajectory,action_mse,obs_mse\n";
  for (std::size_t i = 0, k = 0; i < seqs.size(); ++i) {
    if (seqs[i].steps() < 2) continue;
    out << seqs[i].id << ',' << io::format_double(r.action_per_trajectory[k]) << ','
        << io::format_double(r.obs_per_trajectory[k]) << '\n';
    ++k;
  }
  if (!out) throw IoError("cannot write " + path.string());
}

int cmd_generate(const Globals& g, bool full_scale) {
  eval::RunConfig c = resolve(g);
  if (full_scale) {
    sim::DatasetSpec full = sim::DatasetSpec::full_scale();
    full.params = c.dataset.params;
    full.seed = c.dataset.seed;
    c.dataset = full;
  }
  if (g.seed) c.dataset.seed = *g.seed;
  const fs::path out = require_out(g);
  sim::Manifest m = sim::generate_dataset(c.dataset, out, g.force);
  eval::write_run_config(out / "config.ini", c);
  std::printf("wrote %zu trajectories to %s\n", m.trajectories.size(), out.c_str());
  return kOk;
}

int cmd_train(const Globals& g, const std::string& data, const std::string& ablation) {
  eval::RunConfig c = resolve(g);
  if (!ablation.empty()) c.model.flags = model::AblationFlags::parse(ablation);
  if (g.seed) c.model.seed = *g.seed;
  const fs::path out = require_out(g);
  prepare_out(out, g.force);
  eval::write_run_config(out / "config.ini", c);

  sim::Dataset d = sim::load_dataset(data);
  auto train = model::make_sequences(d, "train");
  auto val = model::make_sequences(d, "val");
  auto test = model::make_sequences(d, "test");
  model::PhriModel m(c.model);
  auto opt = model::make_optimizer(m);
  model::TrainOptions o = c.train_options();
  o.on_epoch = [](const model::EpochRecord& r) {
    std::printf("epoch %3d  loss %.5g  val action %.5g  val obs %.5g\n", r.epoch, r.train_loss, r.val_action_mse,
                r.val_obs_mse);
    std::fflush(stdout);
  };
  model::TrainResult res = model::train(m, *opt, train, val, o);
  eval::write_curve_csv(out / "curve.csv", res.curve);
  model::save_model(out / "model.bin", m, *opt);
  if (res.aborted) {
    std::fprintf(stderr, "training stopped: %s (last good parameters saved)\n", res.message.c_str());
    return kNumeric;
  }
  if (!test.empty()) {
    model::MseReport r = model::evaluate(m, test);
    write_eval_csv(out / "test_mse.csv", test, r);
    print_report(r);
  }
  return kOk;
}

int cmd_ablate(const Globals& g, const std::string& data, int jobs, const std::vector<std::uint64_t>& seeds) {
  eval::RunConfig c = resolve(g);
  if (jobs > 0) c.jobs = jobs;
  if (!seeds.empty()) c.seeds = seeds;
  if (g.seed) c.seeds = {*g.seed};
  const fs::path out = require_out(g);
  prepare_out(out, g.force);
  sim::Dataset d = sim::load_dataset(data);
  eval::AblationReport r = eval::run_ablation(d, c, out);
  int failures = 0;
  for (const auto& row : r.rows) {
    failures += row.failures;
    std::printf("%s  seeds %d  action %.6g  obs %.6g\n", row.flags.label().c_str(), row.seeds, row.action.mean,
                row.obs.mean);
  }
  std::printf("report: %s\n", (out / "report.md").c_str());
  return failures > 0 ? kNumeric : kOk;
}

int cmd_eval(const Globals& g, const std::string& checkpoint, const std::string& data, const std::string& split) {
  model::LoadedModel lm = model::load_model(checkpoint);
  sim::Dataset d = sim::load_dataset(data);
  auto seqs = model::make_sequences(d, split);
  model::MseReport r = model::evaluate(*lm.model, seqs);
  print_report(r);
  if (!g.out.empty()) {
    const fs::path out = g.out;
    prepare_out(out, g.force);
    eval::RunConfig c = resolve(g);
    c.model = lm.model->config();
    eval::write_run_config(out / "config.ini", c);
    write_eval_csv(out / (split + "_mse.csv"), seqs, r);
  }
  return kOk;
}

int cmd_latent(const Globals& g, const std::string& checkpoint, const std::string& data, const std::string& split) {
  model::LoadedModel lm = model::load_model(checkpoint);
  const auto& slots = lm.optimizer->slots();
  if (slots.empty() || slots.front().steps == 0) {
    std::fprintf(stderr, "warning: %s has never been trained; exporting anyway\n", checkpoint.c_str());
  }
  sim::Dataset d = sim::load_dataset(data);
  auto seqs = model::make_sequences(d, split);
  const fs::path out = require_out(g);
  prepare_out(out, g.force);
  eval::RunConfig c = resolve(g);
  c.model = lm.model->config();
  eval::write_run_config(out / "config.ini", c);
  eval::LatentSet latents = eval::collect_latents(*lm.model, seqs);
  eval::LatentMetrics metrics = eval::latent_metrics(latents);
  eval::write_latent_csv(out / "latent.csv", latents);
  eval::write_latent_metrics_csv(out / "latent_metrics.csv", metrics);
  if (metrics.silhouette) {
    std::printf("silhouette %.6f over %zu points\n", *metrics.silhouette, latents.label.size());
  } else {
    std::printf("silhouette not-applicable (needs two labels with two points each)\n");
  }
  return kOk;
}

int cmd_fft(const Globals& g, int n_rc, const std::string& mode, int n_drive, int n_free) {
  crc::ReservoirOptions o;
  o.n_neurons = n_rc;
  o.input_dim = 3;
  o.seed = g.seed.value_or(0);
  if (mode == "complex") {
    o.mode = crc::Mode::kComplex;
  } else if (mode == "real") {
    o.mode = crc::Mode::kReal;
  } else {
    throw ParameterError("--mode must be complex or real");
  }
  const fs::path out = require_out(g);
  prepare_out(out, g.force);
  {
    std::ofstream cfg(out / "config.ini");
    cfg << "[fft]\nn_rc=" << n_rc << "\nmode=" << mode << "\ninput_dim=3\ndrive_steps=" << n_drive
        << "\nfree_steps=" << n_free << "\nseed=" << o.seed << '\n';
    if (!cfg) throw IoError("cannot write config");
  }
  crc::ReservoirParams p = crc::ReservoirParams::init(o);
  crc::FreeResponse r = crc::free_response_spectrum(p, n_drive, n_free, derive_seed(o.seed, 7));
  auto write = [&](const fs::path& path, const Eigen::MatrixXd& m, const char* index) {
    std::ofstream f(path);
    f << index;
    for (Eigen::Index j = 0; j < m.cols(); ++j) f << ",n_" << j;
    f << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      f << i;
      for (Eigen::Index j = 0; j < m.cols(); ++j) f << ',' << io::format_double(m(i, j));
      f << '\n';
    }
    if (!f) throw IoError("cannot write " + path.string());
  };
  write(out / "driven_spectrum.csv", r.driven_spectrum, "bin");
  write(out / "free_spectrum.csv", r.free_spectrum, "bin");
  write(out / "free_trace.csv", r.free_trace, "step");
  std::printf("sustained amplitude ratio %.4f  free peak/median %.2f\n", crc::sustained_amplitude_ratio(r),
              crc::peak_to_median_ratio(r.free_spectrum));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic human-robot interaction modeling toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "INI file with run settings")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Seed (dataset, model or reservoir, depending on the command)");
  app.add_option("--out", g.out, "Output directory");
  app.add_flag("--force", g.force, "Overwrite existing outputs");
  app.add_option("--set", g.overrides, "Override a config key: section.key=value (repeatable)");

  bool full_scale = false;
  auto* gen = app.add_subcommand("generate", "Generate the synthetic dataset");
  gen->add_flag("--full-scale", full_scale, "11/3/3 trajectories of 900 steps per condition");

  std::string data, ablation, checkpoint, split = "test", mode = "complex";
  auto* train = app.add_subcommand("train", "Train one model");
  train->add_option("--data", data, "Dataset directory")->required();
  train->add_option("--ablation", ablation, "Flag cell such as +D+A+C or -D-A-C");

  int jobs = 0;
  std::vector<std::uint64_t> seeds;
  auto* ablate = app.add_subcommand("ablate", "Train and test all eight flag cells over several seeds");
  ablate->add_option("--data", data, "Dataset directory")->required();
  ablate->add_option("--jobs", jobs, "Parallel worker processes");
  ablate->add_option("--seeds", seeds, "Model seeds")->delimiter(',');

  auto* ev = app.add_subcommand("eval", "One-step prediction errors of a checkpoint");
  ev->add_option("--model", checkpoint, "Checkpoint file")->required();
  ev->add_option("--data", data, "Dataset directory")->required();
  ev->add_option("--split", split, "train, val or test");

  auto* lat = app.add_subcommand("latent", "Export latent trajectories and cluster metrics");
  lat->add_option("--model", checkpoint, "Checkpoint file")->required();
  lat->add_option("--data", data, "Dataset directory")->required();
  lat->add_option("--split", split, "train, val or test");

  int n_rc = 100, n_drive = 100, n_free = 400;
  auto* fft = app.add_subcommand("fft", "Driven and free-response spectra of a reservoir");
  fft->add_option("--n-rc", n_rc, "Neurons");
  fft->add_option("--mode", mode, "complex or real");
  fft->add_option("--drive", n_drive, "Random-input steps");
  fft->add_option("--free", n_free, "Zero-input steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_generate(g, full_scale);
    if (*train) return cmd_train(g, data, ablation);
    if (*ablate) return cmd_ablate(g, data, jobs, seeds);
    if (*ev) return cmd_eval(g, checkpoint, data, split);
    if (*lat) return cmd_latent(g, checkpoint, data, split);
    if (*fft) return cmd_fft(g, n_rc, mode, n_drive, n_free);
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kNumeric;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIo;
  }
  return kUsage;
}
