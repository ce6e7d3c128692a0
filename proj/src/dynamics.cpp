#include "mbl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mbl {

MutationParams::MutationParams(std::vector<double> strengths,
                               std::vector<std::vector<double>> biases,
                               bool allow_plain_rd)
    : strengths_(std::move(strengths)), biases_(std::move(biases)) {
  if (strengths_.empty() || strengths_.size() != biases_.size()) {
    throw std::invalid_argument("mutation strengths/biases shape mismatch");
  }
  for (double m : strengths_) {
    if (!std::isfinite(m) || m < 0.0 || (m == 0.0 && !allow_plain_rd)) {
      throw std::invalid_argument(
          "mutation strengths must be positive (zero only with the plain-RD flag)");
    }
  }
  for (const auto& c : biases_) {
    double sum = 0.0;
    for (double v : c) {
      if (!(v > 0.0)) throw std::invalid_argument("bias points must be strictly interior");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("bias points must sum to one");
    }
  }
}

MutationParams MutationParams::uniform_bias(const Game& game, double strength,
                                            bool allow_plain_rd) {
  std::vector<double> ms(game.num_players(), strength);
  std::vector<std::vector<double>> cs;
  for (int i = 0; i < game.num_players(); ++i) {
    cs.emplace_back(game.action_count(i), 1.0 / game.action_count(i));
  }
  return MutationParams(std::move(ms), std::move(cs), allow_plain_rd);
}

double MutationParams::min_strength() const {
  double m = strengths_[0];
  for (double v : strengths_) m = std::min(m, v);
  return m;
}

Tangent rmd_field(const Game& game, const MutationParams& mutation,
                  const MixedProfile& profile) {
  if (mutation.num_players() != game.num_players()) {
    throw std::invalid_argument("mutation parameters do not match game");
  }
  Tangent out(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    const auto f = fitness(game, profile, i);
    const auto& x = profile.strategy(i);
    double avg = 0.0;
    for (std::size_t h = 0; h < x.size(); ++h) avg += x[h] * f[h];
    auto& v = out[i];
    v.resize(x.size());
    for (std::size_t h = 0; h < x.size(); ++h) {
      v[h] = x[h] * (f[h] - avg) + mutation.strength(i) * (mutation.bias(i)[h] - x[h]);
    }
  }
  return out;
}

double tangent_norm(const Tangent& t) {
  double s = 0.0;
  for (const auto& v : t) {
    for (double c : v) s += c * c;
  }
  return std::sqrt(s);
}

namespace {

// ---- flat <-> per-player helpers -----------------------------------------

std::vector<double> flatten(const std::vector<std::vector<double>>& xs) {
  std::vector<double> out;
  for (const auto& v : xs) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<std::vector<double>> unflatten(const Game& game, const std::vector<double>& y) {
  std::vector<std::vector<double>> out;
  std::size_t k = 0;
  for (int i = 0; i < game.num_players(); ++i) {
    out.emplace_back(y.begin() + k, y.begin() + k + game.action_count(i));
    k += game.action_count(i);
  }
  return out;
}

std::vector<double> field_flat(const Game& game, const MutationParams& mutation,
                               const std::vector<double>& y) {
  // Evaluates the RMD polynomial directly on raw coordinates; intermediate
  // Runge-Kutta stages may sit slightly off the simplex.
  std::vector<double> out(y.size());
  std::size_t base = 0;
  auto xs = unflatten(game, y);
  for (int i = 0; i < game.num_players(); ++i) {
    const int n = game.action_count(i);
    // fitness by enumeration, tolerant of non-normalized stage values
    std::vector<double> f(n, 0.0);
    std::vector<int> a(game.num_players(), 0);
    for (std::size_t idx = 0; idx < game.num_profiles(); ++idx) {
      double prob = 1.0;
      for (int j = 0; j < game.num_players(); ++j) {
        if (j != i) prob *= xs[j][a[j]];
      }
      f[a[i]] += prob * game.payoff_at(i, idx);
      for (int j = game.num_players() - 1; j >= 0; --j) {
        if (++a[j] < game.action_count(j)) break;
        a[j] = 0;
      }
    }
    double avg = 0.0;
    for (int h = 0; h < n; ++h) avg += xs[i][h] * f[h];
    for (int h = 0; h < n; ++h) {
      out[base + h] = xs[i][h] * (f[h] - avg) +
                      mutation.strength(i) * (mutation.bias(i)[h] - xs[i][h]);
    }
    base += n;
  }
  return out;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

// Dormand-Prince 5(4) coefficients.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kB5[7] = {35.0 / 384,     0.0,  500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,  0.0,        7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

constexpr double kMaxStep = 1.0;

// Renormalizes each player's block onto the simplex when the sum drifts by
// more than 1e-12; returns true if anything changed.
bool renormalize_state(const Game& game, std::vector<double>& y) {
  bool touched = false;
  std::size_t base = 0;
  for (int i = 0; i < game.num_players(); ++i) {
    const int n = game.action_count(i);
    double sum = 0.0;
    bool negative = false;
    for (int h = 0; h < n; ++h) {
      if (y[base + h] < 0.0) negative = true;
      sum += y[base + h];
    }
    if (negative || std::abs(sum - 1.0) > 1e-12) {
      double clipped = 0.0;
      for (int h = 0; h < n; ++h) {
        if (y[base + h] < 0.0) y[base + h] = 0.0;
        clipped += y[base + h];
      }
      for (int h = 0; h < n; ++h) y[base + h] /= clipped;
      touched = true;
    }
    base += n;
  }
  return touched;
}

MixedProfile profile_from_flat(const Game& game, const std::vector<double>& y) {
  return MixedProfile(unflatten(game, y));
}

// ---- reduced coordinates ---------------------------------------------------

int reduced_dim(const Game& game) {
  int m = 0;
  for (int i = 0; i < game.num_players(); ++i) m += game.action_count(i) - 1;
  return m;
}

std::vector<double> reduce(const Game& game, const std::vector<double>& full) {
  std::vector<double> out;
  std::size_t base = 0;
  for (int i = 0; i < game.num_players(); ++i) {
    const int n = game.action_count(i);
    out.insert(out.end(), full.begin() + base, full.begin() + base + n - 1);
    base += n;
  }
  return out;
}

std::vector<double> expand(const Game& game, const std::vector<double>& reduced) {
  std::vector<double> out;
  std::size_t k = 0;
  for (int i = 0; i < game.num_players(); ++i) {
    const int n = game.action_count(i);
    double head = 0.0;
    for (int h = 0; h < n - 1; ++h) {
      out.push_back(reduced[k + h]);
      head += reduced[k + h];
    }
    out.push_back(1.0 - head);
    k += static_cast<std::size_t>(n - 1);
  }
  return out;
}

// E[r_i | a_i = h, a_j = l] for all (h, l); the partial derivative of the
// fitness f_ih with respect to x_jl under multilinearity.
std::vector<std::vector<double>> pair_conditional_payoff(
    const Game& game, const std::vector<std::vector<double>>& xs, int i, int j) {
  const int ni = game.action_count(i);
  const int nj = game.action_count(j);
  std::vector<std::vector<double>> g(ni, std::vector<double>(nj, 0.0));
  std::vector<int> a(game.num_players(), 0);
  for (std::size_t idx = 0; idx < game.num_profiles(); ++idx) {
    double prob = 1.0;
    for (int m = 0; m < game.num_players(); ++m) {
      if (m != i && m != j) prob *= xs[m][a[m]];
    }
    g[a[i]][a[j]] += prob * game.payoff_at(i, idx);
    for (int m = game.num_players() - 1; m >= 0; --m) {
      if (++a[m] < game.action_count(m)) break;
      a[m] = 0;
    }
  }
  return g;
}

}  // namespace

OdeTrajectory integrate_rmd(const Game& game, const MutationParams& mutation,
                            const MixedProfile& x0, double horizon, double tol,
                            const std::vector<double>& sample_times) {
  if (!x0.compatible_with(game)) throw std::invalid_argument("x0 does not match game");
  if (horizon < 0.0) throw std::invalid_argument("horizon must be nonnegative");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");

  OdeTrajectory traj;
  std::vector<double> y = flatten(x0.strategies());
  const std::size_t dim = y.size();

  const bool record_all = sample_times.empty();
  std::size_t next_sample = 0;
  if (record_all) {
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
  } else {
    while (next_sample < sample_times.size() && sample_times[next_sample] <= 0.0) {
      traj.times.push_back(sample_times[next_sample]);
      traj.states.push_back(x0);
      ++next_sample;
    }
  }

  double t = 0.0;
  if (horizon > 0.0) {
    std::vector<std::vector<double>> k(7, std::vector<double>(dim));
    std::vector<double> ytmp(dim), y5(dim), y4(dim);
    k[0] = field_flat(game, mutation, y);
    double h = std::min({kMaxStep, horizon, 1e-2});
    std::size_t iterations = 0;

    while (t < horizon) {
      if (++iterations > 20000000) {  // step budget for pathological inputs
        traj.step_underflow = true;
        break;
      }
      h = std::min(h, horizon - t);
      if (!record_all && next_sample < sample_times.size()) {
        h = std::min(h, sample_times[next_sample] - t);
      }
      if (h < 1e-14 * std::max(1.0, std::abs(t))) {
        traj.step_underflow = true;  // report last good state
        break;
      }

      for (int s = 1; s < 7; ++s) {
        for (std::size_t d = 0; d < dim; ++d) {
          double acc = y[d];
          for (int q = 0; q < s; ++q) acc += h * kA[s][q] * k[q][d];
          ytmp[d] = acc;
        }
        k[s] = field_flat(game, mutation, ytmp);
      }
      double err = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        double a5 = y[d], a4 = y[d];
        for (int s = 0; s < 7; ++s) {
          a5 += h * kB5[s] * k[s][d];
          a4 += h * kB4[s] * k[s][d];
        }
        y5[d] = a5;
        y4[d] = a4;
        const double sk = tol + tol * std::max(std::abs(y[d]), std::abs(a5));
        const double e = (a5 - a4) / sk;
        err += e * e;
      }
      err = std::sqrt(err / static_cast<double>(dim));

      if (err <= 1.0) {
        t += h;
        y = y5;
        if (renormalize_state(game, y)) {
          ++traj.renormalizations;
          k[0] = field_flat(game, mutation, y);
        } else {
          k[0] = k[6];  // FSAL
        }
        if (record_all) {
          traj.times.push_back(t);
          traj.states.push_back(profile_from_flat(game, y));
        } else {
          while (next_sample < sample_times.size() &&
                 t >= sample_times[next_sample] - 1e-12) {
            traj.times.push_back(sample_times[next_sample]);
            traj.states.push_back(profile_from_flat(game, y));
            ++next_sample;
          }
        }
      }
      const double factor =
          std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
      h = std::min(h * factor, kMaxStep);
    }
  }

  traj.terminal = profile_from_flat(game, y);
  traj.terminal_field_norm = norm2(field_flat(game, mutation, y));
  return traj;
}

Eigen::MatrixXd reduced_jacobian(const Game& game, const MutationParams& mutation,
                                 const MixedProfile& profile) {
  if (!profile.compatible_with(game)) {
    throw std::invalid_argument("profile dimensions do not match game");
  }
  const int np = game.num_players();
  const auto& xs = profile.strategies();
  const int m = reduced_dim(game);
  Eigen::MatrixXd jac(m, m);

  std::vector<std::vector<double>> fit(np);
  std::vector<double> avg(np, 0.0);
  for (int i = 0; i < np; ++i) {
    fit[i] = fitness(game, profile, i);
    for (int h = 0; h < game.action_count(i); ++h) avg[i] += xs[i][h] * fit[i][h];
  }

  int row0 = 0;
  for (int i = 0; i < np; ++i) {
    const int ni = game.action_count(i);
    int col0 = 0;
    for (int j = 0; j < np; ++j) {
      const int nj = game.action_count(j);
      // full-coordinate block A[h][l] = d v_ih / d x_jl
      std::vector<std::vector<double>> block(ni, std::vector<double>(nj, 0.0));
      if (i == j) {
        for (int h = 0; h < ni; ++h) {
          for (int l = 0; l < ni; ++l) {
            double val = -xs[i][h] * fit[i][l];
            if (h == l) val += fit[i][h] - avg[i] - mutation.strength(i);
            block[h][l] = val;
          }
        }
      } else {
        const auto g = pair_conditional_payoff(game, xs, i, j);
        for (int l = 0; l < nj; ++l) {
          double mix = 0.0;  // sum_k x_ik dF_ik/dx_jl
          for (int k = 0; k < ni; ++k) mix += xs[i][k] * g[k][l];
          for (int h = 0; h < ni; ++h) {
            block[h][l] = xs[i][h] * (g[h][l] - mix);
          }
        }
      }
      // substitute x_{j,last} = 1 - sum of the rest
      for (int h = 0; h < ni - 1; ++h) {
        for (int l = 0; l < nj - 1; ++l) {
          jac(row0 + h, col0 + l) = block[h][l] - block[h][nj - 1];
        }
      }
      col0 += nj - 1;
    }
    row0 += ni - 1;
  }
  return jac;
}

EquilibriumResult find_equilibrium(const Game& game, const MutationParams& mutation,
                                   const MixedProfile& x_init) {
  if (!x_init.compatible_with(game)) {
    throw std::invalid_argument("x_init does not match game");
  }
  constexpr double kResidualTarget = 1e-12;
  constexpr int kMaxNewton = 100;

  EquilibriumResult result;
  std::vector<double> y = flatten(x_init.strategies());

  auto residual_of = [&](const std::vector<double>& full) {
    return norm2(field_flat(game, mutation, full));
  };

  auto interior_ok = [&](const std::vector<double>& full) {
    for (double v : full) {
      if (!(v > 0.0) || !(v < 1.0)) return false;
    }
    return true;
  };

  int total_newton = 0;
  for (int round = 0; round < 4; ++round) {
    if (round > 0) {
      // Newton stalled: relax along the flow toward the attractor, then retry.
      const double horizon = 50.0 + 20.0 / std::max(mutation.min_strength(), 1e-3);
      auto traj = integrate_rmd(game, mutation, profile_from_flat(game, y),
                                horizon * round, 1e-12);
      y = flatten(traj.terminal.strategies());
      result.used_integration_fallback = true;
    }
    if (!interior_ok(y)) {
      // start Newton from a point nudged inside
      MixedProfile start = profile_from_flat(game, y);
      std::vector<std::vector<double>> xs = start.strategies();
      for (int i = 0; i < game.num_players(); ++i) {
        const double eps = 1e-6;
        double sum = 0.0;
        for (double& v : xs[i]) {
          v = std::max(v, eps);
          sum += v;
        }
        for (double& v : xs[i]) v /= sum;
      }
      y = flatten(xs);
    }

    double res = residual_of(y);
    for (int it = 0; it < kMaxNewton && res > kResidualTarget; ++it) {
      ++total_newton;
      MixedProfile xp = profile_from_flat(game, y);
      Eigen::MatrixXd jac = reduced_jacobian(game, mutation, xp);
      std::vector<double> g = reduce(game, field_flat(game, mutation, y));
      Eigen::VectorXd rhs(g.size());
      for (std::size_t d = 0; d < g.size(); ++d) rhs(static_cast<int>(d)) = -g[d];
      Eigen::VectorXd delta = jac.partialPivLu().solve(rhs);

      std::vector<double> yr = reduce(game, y);
      double lambda = 1.0;
      bool improved = false;
      while (lambda >= 1.0 / 1024.0) {
        std::vector<double> trial = yr;
        for (std::size_t d = 0; d < trial.size(); ++d) {
          trial[d] += lambda * delta(static_cast<int>(d));
        }
        std::vector<double> full = expand(game, trial);
        if (interior_ok(full)) {
          const double r2 = residual_of(full);
          if (r2 < res) {
            y = std::move(full);
            res = r2;
            improved = true;
            break;
          }
        }
        lambda *= 0.5;
      }
      if (!improved) break;
    }
    if (res <= kResidualTarget) break;
  }

  result.profile = profile_from_flat(game, y);
  result.residual = residual_of(y);
  result.newton_iterations = total_newton;
  result.converged = result.residual <= kResidualTarget && result.profile.interior();
  return result;
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::kAsymptoticallyStable:
      return "asymptotically-stable";
    case Stability::kUnstable:
      return "unstable";
    case Stability::kMarginal:
      return "marginal";
  }
  return "unknown";
}

StabilityReport stability_spectrum(const Game& game, const MutationParams& mutation,
                                   const MixedProfile& profile) {
  const double residual = tangent_norm(rmd_field(game, mutation, profile));
  if (residual > 1e-8) {
    throw std::invalid_argument("stability_spectrum requires an equilibrium (field norm <= 1e-8)");
  }
  Eigen::MatrixXd jac = reduced_jacobian(game, mutation, profile);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(jac);

  StabilityReport report;
  report.equilibrium = profile;
  report.residual_norm = residual;
  double max_re = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < jac.rows(); ++i) {
    const std::complex<double> ev = solver.eigenvalues()(i);
    report.eigenvalues.push_back(ev);
    max_re = std::max(max_re, ev.real());
  }
  // +-1e-8 band absorbs eigensolver noise on trace-zero matrices.
  if (max_re < -1e-8) {
    report.classification = Stability::kAsymptoticallyStable;
  } else if (max_re > 1e-8) {
    report.classification = Stability::kUnstable;
  } else {
    report.classification = Stability::kMarginal;
  }
  return report;
}

}  // namespace mbl
