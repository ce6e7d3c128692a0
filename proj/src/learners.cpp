#include "mbl/learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mbl/game.hpp"

namespace mbl {

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "mbl-dpu") return Algorithm::kMblDpu;
  if (name == "mbl-lc") return Algorithm::kMblLc;
  if (name == "cross") return Algorithm::kCross;
  if (name == "faq") return Algorithm::kFaq;
  if (name == "wolf-phc") return Algorithm::kWolfPhc;
  throw std::invalid_argument("unknown algorithm: " + name);
}

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kMblDpu: return "mbl-dpu";
    case Algorithm::kMblLc: return "mbl-lc";
    case Algorithm::kCross: return "cross";
    case Algorithm::kFaq: return "faq";
    case Algorithm::kWolfPhc: return "wolf-phc";
  }
  return "unknown";
}

namespace {

// Zero-allocation view of the bias point; empty config.bias means uniform.
struct BiasView {
  const std::vector<double>* explicit_bias;
  double uniform_value;
  double operator[](int h) const {
    return explicit_bias ? (*explicit_bias)[h] : uniform_value;
  }
};

BiasView bias_view(const LearnerConfig& config, int n) {
  if (config.bias.empty()) return BiasView{nullptr, 1.0 / n};
  if (static_cast<int>(config.bias.size()) != n) {
    throw std::invalid_argument("bias vector length does not match action count");
  }
  return BiasView{&config.bias, 0.0};
}

bool uses_policy_from_q(Algorithm a) {
  return a == Algorithm::kMblLc || a == Algorithm::kFaq;
}

}  // namespace

void validate_config(const LearnerConfig& config, int num_actions,
                     double max_shifted_payoff) {
  if (!(config.theta > 0.0)) throw std::invalid_argument("theta must be positive");
  if (config.mutation < 0.0) throw std::invalid_argument("M must be nonnegative");
  if (!config.bias.empty()) {
    double sum = 0.0;
    for (double v : config.bias) {
      if (!(v > 0.0)) throw std::invalid_argument("bias must be strictly interior");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("bias must sum to one");
    if (static_cast<int>(config.bias.size()) != num_actions) {
      throw std::invalid_argument("bias length does not match action count");
    }
  }
  switch (config.algorithm) {
    case Algorithm::kMblDpu:
    case Algorithm::kCross: {
      const double m = config.algorithm == Algorithm::kCross ? 0.0 : config.mutation;
      const double bound = 1.0 / (std::max(max_shifted_payoff, 0.0) + m);
      if (!(config.theta < bound)) {
        throw std::invalid_argument(
            "theta violates the stability bound theta < 1/(C + M)");
      }
      break;
    }
    case Algorithm::kMblLc:
    case Algorithm::kFaq:
      if (!(config.tau > 0.0)) throw std::invalid_argument("tau must be positive");
      if (!(config.beta > 0.0)) throw std::invalid_argument("beta must be positive");
      break;
    case Algorithm::kWolfPhc:
      if (!(config.delta_lose > config.delta_win)) {
        throw std::invalid_argument("WoLF-PHC requires delta_lose > delta_win");
      }
      if (!(config.delta_win > 0.0)) throw std::invalid_argument("delta_win must be positive");
      if (!(config.q_alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
      break;
  }
}

LearnerState make_learner_state(const LearnerConfig& config,
                                std::span<const double> initial_policy) {
  LearnerState st;
  st.policy.assign(initial_policy.begin(), initial_policy.end());
  const int n = static_cast<int>(st.policy.size());
  if (uses_policy_from_q(config.algorithm)) {
    st.q.resize(n);
    for (int h = 0; h < n; ++h) {
      if (!(st.policy[h] > 0.0)) {
        throw std::invalid_argument("logistic-choice learners need an interior initial policy");
      }
      st.q[h] = std::log(st.policy[h]) / config.tau;
    }
    st.policy = logistic_policy(st.q, config.tau);
  } else if (config.algorithm == Algorithm::kWolfPhc) {
    st.q.assign(n, 0.0);
    st.avg_policy = st.policy;
  }
  return st;
}

std::vector<double> logistic_policy(std::span<const double> q, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  double qmax = q[0];
  for (double v : q) qmax = std::max(qmax, v);
  std::vector<double> x(q.size());
  double z = 0.0;
  for (std::size_t h = 0; h < q.size(); ++h) {
    x[h] = std::exp(tau * (q[h] - qmax));
    z += x[h];
  }
  for (double& v : x) v /= z;
  return x;
}

int act(LearnerState& state, const LearnerConfig& config, RngStream& rng) {
  if (uses_policy_from_q(config.algorithm)) {
    state.policy = logistic_policy(state.q, config.tau);
  }
  return sample_action(std::span<const double>(state.policy), rng);
}

void mbl_dpu_step(LearnerState& state, const LearnerConfig& config, int action,
                  double reward) {
  if (reward < 0.0) {
    throw std::invalid_argument("negative reward: payoffs must be shifted nonnegative");
  }
  auto& x = state.policy;
  const int n = static_cast<int>(x.size());
  const auto c = bias_view(config, n);
  const double m = config.algorithm == Algorithm::kCross ? 0.0 : config.mutation;
  const double before = [&] {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }();
  for (int h = 0; h < n; ++h) {
    const double gain = h == action ? (1.0 - x[h]) * reward : -x[h] * reward;
    x[h] += config.theta * gain + config.theta * m * (c[h] - x[h]);
  }
  // The exact update preserves the component sum; fold the last-ulp rounding
  // residual into the chosen component so long runs cannot drift.
  double after = 0.0;
  for (double v : x) after += v;
  x[action] -= after - before;
  ++state.step;
}

void cross_step(LearnerState& state, const LearnerConfig& config, int action,
                double reward) {
  LearnerConfig plain = config;
  plain.algorithm = Algorithm::kCross;
  mbl_dpu_step(state, plain, action, reward);
}

void mbl_lc_step(LearnerState& state, const LearnerConfig& config, int action,
                 double reward) {
  if (reward < 0.0) {
    throw std::invalid_argument("negative reward: payoffs must be shifted nonnegative");
  }
  const double xh = state.policy[action];
  const auto c = bias_view(config, static_cast<int>(state.policy.size()));
  const double cap = std::min(config.beta / xh, 1.0);
  state.q[action] += cap * config.theta * (reward + config.mutation * c[action] / xh);
  ++state.step;
}

void faq_step(LearnerState& state, const LearnerConfig& config, int action,
              double reward) {
  const double xh = state.policy[action];
  const double cap = std::min(config.beta / xh, 1.0);
  const double alpha =
      config.theta / (1.0 + config.faq_kappa * static_cast<double>(state.step));
  state.q[action] += cap * alpha * (reward - state.q[action]);
  ++state.step;
}

void wolf_phc_step(LearnerState& state, const LearnerConfig& config, int action,
                   double reward) {
  auto& x = state.policy;
  const int n = static_cast<int>(x.size());

  const double alpha =
      config.q_alpha0 / (1.0 + config.q_kappa * static_cast<double>(state.step));
  state.q[action] += alpha * (reward - state.q[action]);

  auto& avg = state.avg_policy;
  const double inv = 1.0 / static_cast<double>(state.avg_count);
  for (int h = 0; h < n; ++h) avg[h] += (x[h] - avg[h]) * inv;
  ++state.avg_count;

  double current = 0.0, historical = 0.0;
  for (int h = 0; h < n; ++h) {
    current += x[h] * state.q[h];
    historical += avg[h] * state.q[h];
  }
  const double delta = current > historical ? config.delta_win : config.delta_lose;

  int best = 0;  // ties broken by lowest index
  for (int h = 1; h < n; ++h) {
    if (state.q[h] > state.q[best]) best = h;
  }
  for (int h = 0; h < n; ++h) {
    x[h] += h == best ? delta : -delta / (n - 1);
  }
  double sum = 0.0;
  for (double& v : x) {
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  for (double& v : x) v /= sum;
  ++state.step;
}

void observe(LearnerState& state, const LearnerConfig& config, int action,
             double reward) {
  switch (config.algorithm) {
    case Algorithm::kMblDpu: mbl_dpu_step(state, config, action, reward); break;
    // mbl_dpu_step already drops the mutation term for kCross configs
    case Algorithm::kCross: mbl_dpu_step(state, config, action, reward); break;
    case Algorithm::kMblLc: mbl_lc_step(state, config, action, reward); break;
    case Algorithm::kFaq: faq_step(state, config, action, reward); break;
    case Algorithm::kWolfPhc: wolf_phc_step(state, config, action, reward); break;
  }
}

double adaptive_mutation(double violation_estimate, double factor, double floor_m) {
  if (violation_estimate < 0.0) {
    throw std::invalid_argument("violation estimate must be nonnegative");
  }
  if (!(factor > 0.0 && factor < 1.0)) {
    throw std::invalid_argument("factor must lie in (0, 1)");
  }
  return std::max(floor_m, factor * violation_estimate);
}

}  // namespace mbl
