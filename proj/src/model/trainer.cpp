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

#include "phri/model/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "phri/common/error.hpp"
#include "phri/nn/optimizer.hpp"

namespace phri::model {
namespace {

std::span<const double> row_span(const Matrix& m, Eigen::Index r, std::vector<double>& buf) {
  buf.resize(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) buf[static_cast<std::size_t>(j)] = m(r, j);
  return buf;
}

std::vector<Matrix> snapshot(const nn::ParameterSet& params) {
  std::vector<Matrix> out;
  out.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) out.push_back(params[i].value);
  return out;
}

void restore(nn::ParameterSet& params, const std::vector<Matrix>& values) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i].value = values[i];
}

bool all_finite(const nn::ParameterSet& params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].value.allFinite()) return false;
  }
  return true;
}

// Runs the mean path over several trajectories at once, calling visit(k, t,
// prediction_row_index, prediction) for each active trajectory k at step t.
template <typename Visit>
void mean_rollout(const PhriModel& model, const std::vector<const Sequence*>& seqs, bool include_last, Visit visit) {
  const ModelConfig& c = model.config();
  std::vector<Histories> hist(seqs.size(), model.initial_histories());
  Eigen::Index max_t = 0;
  for (const auto* s : seqs) max_t = std::max(max_t, s->steps());
  std::vector<std::size_t> active;
  std::vector<double> buf_s, buf_a;
  for (Eigen::Index t = 0; t < max_t; ++t) {
    active.clear();
    for (std::size_t k = 0; k < seqs.size(); ++k) {
      const Eigen::Index limit = include_last ? seqs[k]->steps() : seqs[k]->steps() - 1;
      if (t < limit) active.push_back(k);
    }
    if (active.empty()) break;
    const auto n = static_cast<Eigen::Index>(active.size());
    Matrix obs(n, c.obs_dim), rs(n, c.n_rc), ra(n, c.n_rc);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::size_t k = active[static_cast<std::size_t>(i)];
      obs.row(i) = seqs[k]->obs.row(t);
      rs.row(i) = crc::readout_real(hist[k].s).transpose();
      ra.row(i) = crc::readout_real(hist[k].a).transpose();
    }
    Prediction p = model.predict(obs, rs, ra);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::size_t k = active[static_cast<std::size_t>(i)];
      visit(k, t, i, p);
      model.step_histories(hist[k], row_span(p.state, i, buf_s), row_span(seqs[k]->action, t, buf_a));
    }
  }
}

}  // namespace

Eigen::RowVectorXd Sequence::action_in_data_units(const Eigen::RowVectorXd& a) const {
  if (action_scale.size() == 0) return a;
  return a.cwiseProduct(action_scale) + action_mean;
}

std::vector<Sequence> make_sequences(const sim::Dataset& dataset, const std::string& split) {
  std::vector<Sequence> out;
  for (std::size_t i = 0; i < dataset.trajectories.size(); ++i) {
    const auto& rec = dataset.manifest.trajectories[i];
    if (rec.split != split) continue;
    const auto& t = dataset.trajectories[i];
    Sequence s;
    s.id = rec.id;
    s.obs = dataset.manifest.observation_stats.apply(t.observations);
    s.action = dataset.manifest.action_stats.apply(t.actions);
    s.action_mean = dataset.manifest.action_stats.mean.transpose();
    s.action_scale = dataset.manifest.action_stats.scale.transpose();
    s.labels = t.labels;
    out.push_back(std::move(s));
  }
  return out;
}

Summary summarize(std::vector<double> values) {
  Summary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / n);
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  s.median = values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  return s;
}

MseReport evaluate(const PhriModel& model, const std::vector<Sequence>& sequences) {
  std::vector<const Sequence*> seqs;
  for (const auto& s : sequences) {
    if (s.steps() >= 2) seqs.push_back(&s);
  }
  if (seqs.empty()) throw ParameterError("evaluation needs at least one trajectory with two or more steps");
  const ModelConfig& c = model.config();
  std::vector<double> act_sq(seqs.size(), 0.0), obs_sq(seqs.size(), 0.0);
  mean_rollout(model, seqs, false, [&](std::size_t k, Eigen::Index t, Eigen::Index i, const Prediction& p) {
    const Sequence& s = *seqs[k];
    const Eigen::RowVectorXd predicted = c.flags.dynamics ? s.action_in_data_units(p.action.row(i)) : p.action.row(i);
    act_sq[k] += (predicted - s.action_in_data_units(s.action.row(t))).squaredNorm();
    obs_sq[k] += (p.next_obs.row(i) - seqs[k]->obs.row(t + 1)).squaredNorm();
  });
  MseReport r;
  for (std::size_t k = 0; k < seqs.size(); ++k) {
    const double steps = static_cast<double>(seqs[k]->steps() - 1);
    r.action_per_trajectory.push_back(act_sq[k] / (steps * c.action_dim));
    r.obs_per_trajectory.push_back(obs_sq[k] / (steps * c.obs_dim));
  }
  r.action = summarize(r.action_per_trajectory);
  r.obs = summarize(r.obs_per_trajectory);
  return r;
}

Matrix encode_latent(const PhriModel& model, const Sequence& sequence) {
  Matrix out(sequence.steps(), model.config().latent_dim);
  mean_rollout(model, {&sequence}, true,
               [&](std::size_t, Eigen::Index t, Eigen::Index i, const Prediction& p) { out.row(t) = p.state.row(i); });
  return out;
}

LossTerms accumulate_batch_gradient(PhriModel& model, const std::vector<const Sequence*>& batch, Rng& noise,
                                    int chunk_steps, const std::function<void()>& after_chunk) {
  if (chunk_steps < 1) throw ParameterError("chunk length must be positive");
  const ModelConfig& c = model.config();
  std::vector<const Sequence*> seqs;
  for (const auto* s : batch) {
    if (s->steps() >= 2) seqs.push_back(s);
  }
  LossTerms terms;
  if (seqs.empty()) return terms;
  const double per_batch = 1.0 / static_cast<double>(seqs.size());

  std::vector<Histories> hist(seqs.size(), model.initial_histories());
  Eigen::Index last = 0;  // transitions run for t < steps - 1
  for (const auto* s : seqs) last = std::max(last, s->steps() - 1);
  std::vector<double> buf_s, buf_a;

  for (Eigen::Index t0 = 0; t0 < last; t0 += chunk_steps) {
    const Eigen::Index t1 = std::min<Eigen::Index>(t0 + chunk_steps, last);
    Eigen::Index n = 0;
    for (const auto* s : seqs) n += std::max<Eigen::Index>(0, std::min(t1, s->steps() - 1) - t0);

    RowBatch rows;
    rows.obs.resize(n, c.obs_dim);
    rows.action.resize(n, c.action_dim);
    rows.next_obs.resize(n, c.obs_dim);
    rows.readout_s.resize(n, c.n_rc);
    rows.readout_a.resize(n, c.n_rc);
    rows.noise_s.resize(n, c.latent_dim);
    rows.noise_a.resize(n, c.action_dim);
    rows.weight.resize(n);

    Eigen::Index r = 0;
    std::vector<std::size_t> active;
    for (Eigen::Index t = t0; t < t1; ++t) {
      active.clear();
      for (std::size_t k = 0; k < seqs.size(); ++k) {
        if (t < seqs[k]->steps() - 1) active.push_back(k);
      }
      const auto m = static_cast<Eigen::Index>(active.size());
      for (Eigen::Index i = 0; i < m; ++i) {
        const std::size_t k = active[static_cast<std::size_t>(i)];
        const Sequence& s = *seqs[k];
        rows.obs.row(r + i) = s.obs.row(t);
        rows.action.row(r + i) = s.action.row(t);
        rows.next_obs.row(r + i) = s.obs.row(t + 1);
        rows.readout_s.row(r + i) = crc::readout_real(hist[k].s).transpose();
        rows.readout_a.row(r + i) = crc::readout_real(hist[k].a).transpose();
        for (int j = 0; j < c.latent_dim; ++j) rows.noise_s(r + i, j) = noise.normal();
        for (int j = 0; j < c.action_dim; ++j) rows.noise_a(r + i, j) = noise.normal();
        rows.weight(r + i) = per_batch / static_cast<double>(s.steps() - 1);
      }
      // Histories advance with this step's latent sample; they stay constants
      // in the loss graph.
      Matrix states = model.history_state(rows.obs.middleRows(r, m), rows.readout_s.middleRows(r, m),
                                          rows.noise_s.middleRows(r, m));
      for (Eigen::Index i = 0; i < m; ++i) {
        const std::size_t k = active[static_cast<std::size_t>(i)];
        model.step_histories(hist[k], row_span(states, i, buf_s), row_span(rows.action, r + i, buf_a));
      }
      r += m;
    }

    Tape tape;
    LossGraph g = model.loss(tape, rows);
    tape.backward(g.loss);
    terms += g.terms;
    if (after_chunk) after_chunk();
  }
  return terms;
}

TrainResult train(PhriModel& model, nn::AmsGrad& optimizer, const std::vector<Sequence>& train_set,
                  const std::vector<Sequence>& val_set, const TrainOptions& options) {
  const ModelConfig& c = model.config();
  if (train_set.empty()) throw ParameterError("training set is empty");
  Rng shuffle(derive_seed(c.seed, 3));
  Rng noise(derive_seed(c.seed, 2));
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  std::vector<Matrix> last_good = snapshot(model.params());
  auto abort = [&](const std::string& why) {
    restore(model.params(), last_good);
    result.aborted = true;
    result.message = why;
    return result;
  };

  for (int epoch = 1; epoch <= c.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(shuffle.next() % i);
      std::swap(order[i - 1], order[j]);
    }
    double loss_sum = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(c.batch_size)) {
      std::vector<const Sequence*> batch;
      for (std::size_t i = start; i < std::min(order.size(), start + static_cast<std::size_t>(c.batch_size)); ++i) {
        batch.push_back(&train_set[order[i]]);
      }
      auto update = [&] {
        nn::clip_gradient_norm(model.params(), c.clip_norm);
        optimizer.step(model.params());
        model.params().zero_grad();
      };
      model.params().zero_grad();
      LossTerms terms;
      try {
        if (options.step_per_chunk) {
          terms = accumulate_batch_gradient(model, batch, noise, options.chunk_steps, update);
        } else {
          terms = accumulate_batch_gradient(model, batch, noise, options.chunk_steps);
        }
      } catch (const NumericError& e) {
        return abort("epoch " + std::to_string(epoch) + ": " + e.what());
      }
      if (!std::isfinite(terms.total())) return abort("epoch " + std::to_string(epoch) + ": non-finite loss");
      if (!options.step_per_chunk) update();
      loss_sum += terms.total();
      ++batches;
    }
    if (!all_finite(model.params())) return abort("epoch " + std::to_string(epoch) + ": non-finite parameters");

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / batches;
    if (!val_set.empty()) {
      MseReport v = evaluate(model, val_set);
      rec.val_action_mse = v.action.mean;
      rec.val_obs_mse = v.obs.mean;
      if (!std::isfinite(rec.val_action_mse) || !std::isfinite(rec.val_obs_mse)) {
        return abort("epoch " + std::to_string(epoch) + ": non-finite validation error");
      }
    }
    last_good = snapshot(model.params());
    result.curve.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);
  }
  return result;
}

}  // namespace phri::model
