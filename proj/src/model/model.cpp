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

#include "phri/model/model.hpp"

#include <optional>
#include <string>

#include "phri/common/error.hpp"
#include "phri/nn/ops.hpp"

namespace phri::model {

LossTerms& LossTerms::operator+=(const LossTerms& o) {
  reconstruction += o.reconstruction;
  kl_state += o.kl_state;
  kl_policy += o.kl_policy;
  auxiliary += o.auxiliary;
  return *this;
}

crc::ReservoirOptions reservoir_options(const ModelConfig& config, bool for_actions) {
  crc::ReservoirOptions o;
  o.n_neurons = config.n_rc;
  o.input_dim = for_actions ? config.action_dim : config.latent_dim;
  o.seed = derive_seed(config.seed, for_actions ? 0xA11 : 0x511);
  o.mode = config.flags.complex ? crc::Mode::kComplex : crc::Mode::kReal;
  return o;
}

// Every module is always built, in this order, so two configurations with
// the same seed start from identical weights whatever their flags.
struct PhriModel::Modules {
  nn::FcnStack proj_s;
  nn::FcnStack proj_a;
  nn::FcnStack enc;
  nn::NormalHead enc_head;
  nn::FcnStack prior_s;
  nn::NormalHead prior_s_head;
  nn::FcnStack pol;
  nn::NormalHead pol_head;
  nn::FcnStack prior_a;
  nn::NormalHead prior_a_head;
  nn::FcnStack dyn;
  nn::Linear dyn_out;
  nn::FcnStack dec;
  nn::StudentTHead dec_head;

  Modules(nn::ParameterSet& p, const ModelConfig& c, Rng& rng)
      : proj_s(p, "history_s", c.n_rc, c.width, rng),
        proj_a(p, "history_a", c.n_rc, c.width, rng),
        enc(p, "encoder", c.obs_dim + c.width, c.width, rng),
        enc_head(p, "encoder.head", c.width, c.latent_dim, rng),
        prior_s(p, "prior_s", c.width, c.width, rng),
        prior_s_head(p, "prior_s.head", c.width, c.latent_dim, rng),
        pol(p, "policy", c.latent_dim + c.width, c.width, rng),
        pol_head(p, "policy.head", c.width, c.action_dim, rng),
        prior_a(p, "prior_a", c.width, c.width, rng),
        prior_a_head(p, "prior_a.head", c.width, c.action_dim, rng),
        dyn(p, "dynamics", c.latent_dim + c.action_dim, c.width, rng),
        dyn_out(p, "dynamics.out", c.width, c.latent_dim, rng),
        dec(p, "decoder", c.latent_dim, c.width, rng),
        dec_head(p, "decoder.head", c.width, c.obs_dim, rng, c.initial_dof) {}
};

PhriModel::PhriModel(const ModelConfig& config)
    : PhriModel(config, crc::ReservoirParams::init(reservoir_options(config, false)),
                crc::ReservoirParams::init(reservoir_options(config, true))) {}

PhriModel::PhriModel(const ModelConfig& config, crc::ReservoirParams state_reservoir,
                     crc::ReservoirParams action_reservoir)
    : config_(config),
      res_s_(std::move(state_reservoir)),
      res_a_(std::move(action_reservoir)),
      init_rng_(derive_seed(config.seed, 1)) {
  config_.validate();
  if (res_s_.n_neurons() != config_.n_rc || res_s_.input_dim() != config_.latent_dim ||
      res_a_.n_neurons() != config_.n_rc || res_a_.input_dim() != config_.action_dim) {
    throw ParameterError("reservoir shapes do not match the model configuration");
  }
  m_ = std::make_unique<Modules>(params_, config_, init_rng_);
}

PhriModel::~PhriModel() = default;

Var PhriModel::project_state_history(Tape& tape, const Var& readout) const { return m_->proj_s(tape, readout); }

Var PhriModel::project_action_history(Tape& tape, const Var& readout) const { return m_->proj_a(tape, readout); }

nn::DiagNormal PhriModel::encode_state(Tape& tape, const Var& obs, const Var& history) const {
  return m_->enc_head(tape, m_->enc(tape, nn::concat_cols({obs, history})));
}

nn::DiagNormal PhriModel::prior_state(Tape& tape, const Var& history) const {
  return m_->prior_s_head(tape, m_->prior_s(tape, history));
}

nn::DiagNormal PhriModel::policy(Tape& tape, const Var& state, const Var& history) const {
  return m_->pol_head(tape, m_->pol(tape, nn::concat_cols({state, history})));
}

nn::DiagNormal PhriModel::prior_action(Tape& tape, const Var& history) const {
  return m_->prior_a_head(tape, m_->prior_a(tape, history));
}

Var PhriModel::dynamics(Tape& tape, const Var& state, const Var& action) const {
  return m_->dyn_out(tape, m_->dyn(tape, nn::concat_cols({state, action})));
}

nn::DiagStudentT PhriModel::decode(Tape& tape, const Var& state) const {
  return m_->dec_head(tape, m_->dec(tape, state));
}

namespace {

void check_rows(const RowBatch& r, const ModelConfig& c) {
  const Eigen::Index n = r.rows();
  auto fits = [n](const Matrix& m, int cols) { return m.rows() == n && m.cols() == cols; };
  if (n < 1 || !fits(r.action, c.action_dim) || !fits(r.next_obs, c.obs_dim) || !fits(r.readout_s, c.n_rc) ||
      !fits(r.readout_a, c.n_rc) || !fits(r.noise_s, c.latent_dim) || !fits(r.noise_a, c.action_dim) ||
      r.obs.cols() != c.obs_dim || r.weight.size() != n) {
    throw ParameterError("row batch shapes do not match the model configuration");
  }
}

}  // namespace

LossGraph PhriModel::loss(Tape& tape, const RowBatch& rows) const {
  check_rows(rows, config_);
  const AblationFlags& f = config_.flags;
  const bool uses_policy = f.dynamics || f.auxiliary;

  Var hs = project_state_history(tape, tape.constant(rows.readout_s));
  Var ha = project_action_history(tape, tape.constant(rows.readout_a));

  nn::DiagNormal q = encode_state(tape, tape.constant(rows.obs), hs);
  nn::DiagNormal ps = prior_state(tape, hs);
  Var s = nn::reparameterized_sample(q, tape.constant(rows.noise_s));

  LossGraph out;
  out.state = s;
  std::optional<nn::DiagNormal> pi;
  if (uses_policy) pi = policy(tape, s, ha);

  if (f.dynamics) {
    out.action = config_.teacher_forcing ? tape.constant(rows.action)
                                         : nn::reparameterized_sample(*pi, tape.constant(rows.noise_a));
    out.next_state = dynamics(tape, s, out.action);
  } else if (config_.no_dynamics_wiring == NoDynamicsWiring::kOnesAction) {
    out.action = tape.constant(Matrix::Ones(rows.rows(), config_.action_dim));
    out.next_state = dynamics(tape, s, out.action);
  } else {
    out.next_state = s;
  }

  // Per-row terms, each n x 1, combined with their weights.
  std::vector<Var> parts;
  auto add_term = [&](const Var& per_row, double beta, double& slot) {
    if (beta == 0.0) return;
    Var w = nn::weighted_sum(per_row, rows.weight * beta);
    slot = w.value()(0, 0);
    parts.push_back(w);
  };
  add_term(nn::scale(nn::log_prob(decode(tape, out.next_state), tape.constant(rows.next_obs)), -1.0), 1.0,
           out.terms.reconstruction);
  add_term(nn::kl_diag_normal(q, ps), config_.beta_state, out.terms.kl_state);
  if (uses_policy) {
    add_term(nn::kl_diag_normal(*pi, prior_action(tape, ha)), config_.beta_policy, out.terms.kl_policy);
    if (f.auxiliary) {
      add_term(nn::scale(nn::log_prob(*pi, tape.constant(rows.action)), -1.0), config_.beta_aux,
               out.terms.auxiliary);
    }
  }
  Var total = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) total = nn::add(total, parts[i]);
  out.loss = total;
  return out;
}

Matrix PhriModel::history_state(const Matrix& obs, const Matrix& readout_s, const Matrix& noise_s) const {
  Tape tape;
  Var hs = project_state_history(tape, tape.constant(readout_s));
  nn::DiagNormal q = encode_state(tape, tape.constant(obs), hs);
  if (config_.history_from_mean) return q.mean.value();
  return nn::reparameterized_sample(q, tape.constant(noise_s)).value();
}

Prediction PhriModel::predict(const Matrix& obs, const Matrix& readout_s, const Matrix& readout_a) const {
  Tape tape;
  Var hs = project_state_history(tape, tape.constant(readout_s));
  nn::DiagNormal q = encode_state(tape, tape.constant(obs), hs);
  Prediction p;
  p.state = q.mean.value();
  Var next = q.mean;
  if (config_.flags.dynamics) {
    Var ha = project_action_history(tape, tape.constant(readout_a));
    nn::DiagNormal pi = policy(tape, q.mean, ha);
    p.action = pi.mean.value();
    next = dynamics(tape, q.mean, pi.mean);
  } else {
    // Without explicit dynamics the policy never reaches the prediction
    // path; the action stand-in is the all-ones vector.
    p.action = Matrix::Ones(obs.rows(), config_.action_dim);
    if (config_.no_dynamics_wiring == NoDynamicsWiring::kOnesAction) {
      next = dynamics(tape, q.mean, tape.constant(p.action));
    }
  }
  p.next_obs = decode(tape, next).loc.value();
  return p;
}

Histories PhriModel::initial_histories() const {
  return {crc::ReservoirState::zeros(config_.n_rc), crc::ReservoirState::zeros(config_.n_rc)};
}

void PhriModel::step_histories(Histories& h, std::span<const double> state, std::span<const double> action) const {
  h.s = crc::step(res_s_, h.s, state);
  h.a = crc::step(res_a_, h.a, action);
}

}  // namespace phri::model
