#include "mbl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mbl {

RollingStd::RollingStd(int dim, std::size_t window) : dim_(dim), window_(window) {
  if (window_ < 1) throw std::invalid_argument("window must be at least 1");
  sum_.assign(dim_, 0.0);
}

void RollingStd::push(std::span<const double> value) {
  if (static_cast<int>(value.size()) != dim_) {
    throw std::invalid_argument("rolling std dimension mismatch");
  }
  if (anchor_.empty()) anchor_.assign(value.begin(), value.end());

  if (ring_.size() == window_) {
    const auto& old = ring_[head_];
    for (int d = 0; d < dim_; ++d) {
      const double dv = old[d] - anchor_[d];
      sum_[d] -= dv;
      sum_sq_ -= dv * dv;
    }
    ring_[head_].assign(value.begin(), value.end());
    head_ = (head_ + 1) % window_;
  } else {
    ring_.emplace_back(value.begin(), value.end());
  }
  for (int d = 0; d < dim_; ++d) {
    const double dv = value[d] - anchor_[d];
    sum_[d] += dv;
    sum_sq_ += dv * dv;
  }
  if (++pushes_since_rebuild_ >= window_) rebuild_around_current();
}

void RollingStd::rebuild_around_current() {
  pushes_since_rebuild_ = 0;
  const std::size_t newest = ring_.size() == window_
                                 ? (head_ + window_ - 1) % window_
                                 : ring_.size() - 1;
  anchor_ = ring_[newest];
  sum_.assign(dim_, 0.0);
  sum_sq_ = 0.0;
  for (const auto& v : ring_) {
    for (int d = 0; d < dim_; ++d) {
      const double dv = v[d] - anchor_[d];
      sum_[d] += dv;
      sum_sq_ += dv * dv;
    }
  }
}

double RollingStd::value() const {
  const double n = static_cast<double>(ring_.size());
  if (n < 1.0) return 0.0;
  double mean_sq = 0.0;
  for (double s : sum_) mean_sq += (s / n) * (s / n);
  const double var = sum_sq_ / n - mean_sq;
  return std::sqrt(std::max(0.0, var));
}

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::vector<double> flatten_profile(const MixedProfile& p) {
  std::vector<double> out;
  for (const auto& x : p.strategies()) out.insert(out.end(), x.begin(), x.end());
  return out;
}

// One simultaneous learner step of every player from frozen policies;
// returns H = dX/theta into `h_out` (flattened).
void one_step_drift_sample(const Game& game, const LearnerConfig& config,
                           const std::vector<std::vector<double>>& x,
                           RngStream& rng, std::vector<double>& h_out) {
  const int np = game.num_players();
  PureProfile a;
  a.actions.resize(np);
  for (int i = 0; i < np; ++i) {
    a.actions[i] = sample_action(std::span<const double>(x[i]), rng);
  }
  const std::size_t idx = game.profile_index(a);
  std::size_t base = 0;
  for (int i = 0; i < np; ++i) {
    LearnerState st;
    st.policy = x[i];
    mbl_dpu_step(st, config, a.actions[i], game.payoff_at(i, idx));
    const int n = game.action_count(i);
    for (int h = 0; h < n; ++h) {
      h_out[base + h] = (st.policy[h] - x[i][h]) / config.theta;
    }
    base += n;
  }
}

constexpr int kDriftChunks = 256;  // fixed chunk grid keeps reductions ordered

}  // namespace

DriftEstimate empirical_drift(const LearnerConfig& config, const Game& game,
                              const MixedProfile& x, std::uint64_t samples,
                              std::uint64_t seed, bool parallel) {
  if (config.algorithm != Algorithm::kMblDpu && config.algorithm != Algorithm::kCross) {
    throw std::invalid_argument("empirical drift is defined for MBL-DPU and Cross only");
  }
  const bool mutating = config.algorithm == Algorithm::kMblDpu && config.mutation > 0.0;
  if (mutating && !x.interior()) {
    throw std::invalid_argument("drift estimation with mutation needs an interior profile");
  }
  if (samples < 10000) throw std::invalid_argument("need at least 1e4 samples");
  for (int i = 0; i < game.num_players(); ++i) {
    validate_config(config, game.action_count(i), game.max_payoff(i));
    if (game.min_payoff(i) < 0.0) {
      throw std::invalid_argument("empirical drift expects a shifted (nonnegative) game");
    }
  }

  std::size_t dim = 0;
  for (int i = 0; i < game.num_players(); ++i) dim += game.action_count(i);

  // Per-chunk partial sums, combined afterwards in fixed chunk order so the
  // result does not depend on the number of threads.
  std::vector<std::vector<double>> chunk_sum(kDriftChunks, std::vector<double>(dim, 0.0));
  std::vector<std::vector<double>> chunk_sq(kDriftChunks, std::vector<double>(dim, 0.0));

  const auto& xs = x.strategies();
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int chunk = 0; chunk < kDriftChunks; ++chunk) {
    const std::uint64_t begin = samples * chunk / kDriftChunks;
    const std::uint64_t end = samples * (chunk + 1) / kDriftChunks;
    std::vector<double> h(dim);
    auto& sum = chunk_sum[chunk];
    auto& sq = chunk_sq[chunk];
    for (std::uint64_t s = begin; s < end; ++s) {
      RngStream rng = RngStream::for_run_player(seed, s, 0, 2);
      one_step_drift_sample(game, config, xs, rng, h);
      for (std::size_t d = 0; d < dim; ++d) {
        sum[d] += h[d];
        sq[d] += h[d] * h[d];
      }
    }
  }

  std::vector<double> total(dim, 0.0), total_sq(dim, 0.0);
  for (int chunk = 0; chunk < kDriftChunks; ++chunk) {
    for (std::size_t d = 0; d < dim; ++d) {
      total[d] += chunk_sum[chunk][d];
      total_sq[d] += chunk_sq[chunk][d];
    }
  }

  DriftEstimate est;
  est.point = x;
  est.samples = samples;
  const double n = static_cast<double>(samples);
  std::size_t base = 0;
  for (int i = 0; i < game.num_players(); ++i) {
    const int ni = game.action_count(i);
    std::vector<double> mean(ni), se(ni);
    for (int h = 0; h < ni; ++h) {
      mean[h] = total[base + h] / n;
      const double var =
          std::max(0.0, (total_sq[base + h] - n * mean[h] * mean[h]) / (n - 1.0));
      se[h] = std::sqrt(var / n);
    }
    est.drift.push_back(std::move(mean));
    est.standard_errors.push_back(std::move(se));
    base += ni;
  }
  return est;
}

std::vector<double> ode_approximation_error(const Game& game,
                                            const LearnerConfig& config,
                                            const MixedProfile& x0,
                                            std::span<const double> theta_list,
                                            double horizon, int ensemble_size,
                                            std::uint64_t seed, bool parallel) {
  if (config.algorithm != Algorithm::kMblDpu) {
    throw std::invalid_argument("scaling check is defined for MBL-DPU only");
  }
  for (std::size_t i = 1; i < theta_list.size(); ++i) {
    if (!(theta_list[i] < theta_list[i - 1])) {
      throw std::invalid_argument("theta list must be strictly decreasing");
    }
  }
  if (ensemble_size < 1) throw std::invalid_argument("ensemble size must be positive");
  if (horizon < 0.0) throw std::invalid_argument("horizon must be nonnegative");

  std::vector<double> errors(theta_list.size(), 0.0);
  if (horizon == 0.0 || theta_list.empty()) return errors;

  const auto shifted = shift_nonnegative(game);
  const int np = game.num_players();
  std::size_t dim = 0;
  for (int i = 0; i < np; ++i) dim += game.action_count(i);

  constexpr int kCheckpoints = 50;
  std::vector<double> times(kCheckpoints);
  for (int j = 0; j < kCheckpoints; ++j) {
    times[j] = horizon * static_cast<double>(j + 1) / kCheckpoints;
  }

  MutationParams mutation = [&] {
    std::vector<double> ms(np, config.mutation);
    std::vector<std::vector<double>> cs;
    for (int i = 0; i < np; ++i) {
      cs.push_back(config.bias.empty()
                       ? std::vector<double>(game.action_count(i),
                                             1.0 / game.action_count(i))
                       : config.bias);
    }
    return MutationParams(std::move(ms), std::move(cs));
  }();
  const auto phi = integrate_rmd(game, mutation, x0, horizon, 1e-12, times);
  if (phi.states.size() != times.size()) {
    throw std::runtime_error("ODE reference did not produce all checkpoints");
  }

  for (std::size_t ti = 0; ti < theta_list.size(); ++ti) {
    const double theta = theta_list[ti];
    LearnerConfig cfg = config;
    cfg.theta = theta;
    for (int i = 0; i < np; ++i) {
      validate_config(cfg, game.action_count(i), shifted.game.max_payoff(i));
    }
    const std::uint64_t steps = static_cast<std::uint64_t>(std::llround(horizon / theta));
    std::vector<std::uint64_t> checkpoint_steps(kCheckpoints);
    for (int j = 0; j < kCheckpoints; ++j) {
      checkpoint_steps[j] = std::min<std::uint64_t>(
          steps, static_cast<std::uint64_t>(std::llround(times[j] / theta)));
    }

    // per-run checkpoint states, reduced over runs in fixed order
    std::vector<std::vector<double>> run_values(
        ensemble_size, std::vector<double>(kCheckpoints * dim, 0.0));

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int run = 0; run < ensemble_size; ++run) {
      std::vector<LearnerState> states(np);
      std::vector<RngStream> rngs;
      rngs.reserve(np);
      for (int i = 0; i < np; ++i) {
        states[i] = make_learner_state(cfg, x0.strategy(i));
        rngs.push_back(RngStream::for_run_player(seed, (ti << 32) + run, i, 1));
      }
      PureProfile a;
      a.actions.resize(np);
      int next_cp = 0;
      auto record = [&](std::uint64_t step) {
        while (next_cp < kCheckpoints && checkpoint_steps[next_cp] == step) {
          std::size_t base = 0;
          for (int i = 0; i < np; ++i) {
            std::copy(states[i].policy.begin(), states[i].policy.end(),
                      run_values[run].begin() + next_cp * dim + base);
            base += game.action_count(i);
          }
          ++next_cp;
        }
      };
      record(0);
      for (std::uint64_t t = 1; t <= steps; ++t) {
        for (int i = 0; i < np; ++i) a.actions[i] = act(states[i], cfg, rngs[i]);
        const std::size_t idx = shifted.game.profile_index(a);
        for (int i = 0; i < np; ++i) {
          observe(states[i], cfg, a.actions[i], shifted.game.payoff_at(i, idx));
        }
        record(t);
      }
    }

    double sup_err = 0.0;
    std::vector<double> mean(dim);
    for (int j = 0; j < kCheckpoints; ++j) {
      std::fill(mean.begin(), mean.end(), 0.0);
      for (int run = 0; run < ensemble_size; ++run) {
        for (std::size_t d = 0; d < dim; ++d) {
          mean[d] += run_values[run][j * dim + d];
        }
      }
      for (double& v : mean) v /= ensemble_size;
      const auto ref = flatten_profile(phi.states[j]);
      sup_err = std::max(sup_err, distance(mean, ref));
    }
    errors[ti] = sup_err;
  }
  return errors;
}

ConvergenceReport convergence_metrics(std::span<const MixedProfile> run,
                                      const MixedProfile& target, double radius,
                                      std::size_t window) {
  if (window < 2) throw std::invalid_argument("window must be at least 2");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (run.size() < window) throw std::invalid_argument("run shorter than window");

  const auto tgt = flatten_profile(target);
  const int np = target.num_players();

  ConvergenceReport report;
  report.rolling_std.resize(np);

  std::vector<RollingStd> stds;
  for (int i = 0; i < np; ++i) {
    stds.emplace_back(static_cast<int>(target.strategy(i).size()), window);
  }

  std::size_t inside_tail = 0;
  for (std::size_t t = 0; t < run.size(); ++t) {
    const auto flat = flatten_profile(run[t]);
    const double d = distance(flat, tgt);
    if (d < radius) {
      if (!report.hit_time) report.hit_time = t;
      if (t + window >= run.size()) ++inside_tail;
    }
    for (int i = 0; i < np; ++i) {
      stds[i].push(run[t].strategy(i));
      report.rolling_std[i].push_back(stds[i].value());
    }
    if (t + 1 == run.size()) report.final_distance = d;
  }
  report.final_window_fraction =
      static_cast<double>(inside_tail) / static_cast<double>(window);
  return report;
}

ConvergenceTracker::ConvergenceTracker(const MixedProfile& target, double radius,
                                       std::size_t final_window)
    : target_(flatten_profile(target)), radius_(radius), final_window_(final_window) {
  window_distances_.assign(final_window_, 0.0);
}

std::vector<double> ConvergenceTracker::flatten(const MixedProfile& p) {
  return flatten_profile(p);
}

void ConvergenceTracker::push(std::span<const double> flat_state) {
  const double d = distance(flat_state, target_);
  last_distance_ = d;
  if (d < radius_) {
    if (!hit_time_) hit_time_ = step_;
    open_excursion_ = 0;
  } else {
    ++open_excursion_;
  }
  window_distances_[window_pos_] = d;
  window_pos_ = (window_pos_ + 1) % final_window_;
  if (window_pos_ == 0) window_full_ = true;
  ++step_;
}

double ConvergenceTracker::min_distance_in_final_window() const {
  const std::size_t n = window_full_ ? final_window_ : window_pos_;
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::min(m, window_distances_[i]);
  return m;
}

double ConvergenceTracker::fraction_inside_final_window() const {
  const std::size_t n = window_full_ ? final_window_ : window_pos_;
  if (n == 0) return 0.0;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (window_distances_[i] < radius_) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(n);
}

}  // namespace mbl
