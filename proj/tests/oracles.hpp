// Test-only oracles, independent of the library's computation paths.
#ifndef MBL_TESTS_ORACLES_HPP_
#define MBL_TESTS_ORACLES_HPP_

#include <cmath>
#include <vector>

#include "mbl/dynamics.hpp"
#include "mbl/game.hpp"
#include "mbl/rng.hpp"

namespace mbl::oracles {

// Expected payoff by recursive descent over players (the library uses an
// iterative odometer over flat indices); long double accumulation.
inline long double expected_payoff_recursive(const Game& game, const MixedProfile& x,
                                             int player, int depth,
                                             std::vector<int>& actions) {
  if (depth == game.num_players()) {
    long double p = 1.0L;
    for (int i = 0; i < game.num_players(); ++i) {
      p *= static_cast<long double>(x.strategy(i)[actions[i]]);
    }
    PureProfile a{actions};
    return p * static_cast<long double>(game.payoff(player, a));
  }
  long double total = 0.0L;
  for (int h = 0; h < game.action_count(depth); ++h) {
    actions[depth] = h;
    total += expected_payoff_recursive(game, x, player, depth + 1, actions);
  }
  return total;
}

inline double expected_payoff(const Game& game, const MixedProfile& x, int player) {
  std::vector<int> actions(game.num_players(), 0);
  return static_cast<double>(expected_payoff_recursive(game, x, player, 0, actions));
}

// Fitness component via a pinned-action profile: replaces player's strategy
// with the vertex at h and reuses the recursive expectation.
inline double fitness_component(const Game& game, const MixedProfile& x, int player,
                                int h) {
  auto xs = x.strategies();
  for (auto& v : xs[player]) v = 0.0;
  xs[player][h] = 1.0;
  return oracles::expected_payoff(game, MixedProfile(xs), player);
}

// Central finite differences of the reduced RMD field.
inline Eigen::MatrixXd reduced_jacobian_fd(const Game& game,
                                           const MutationParams& mutation,
                                           const MixedProfile& x, double step = 1e-6) {
  const int np = game.num_players();
  int m = 0;
  for (int i = 0; i < np; ++i) m += game.action_count(i) - 1;

  auto reduce = [&](const MixedProfile& p) {
    std::vector<double> y;
    for (int i = 0; i < np; ++i) {
      const auto& v = p.strategy(i);
      y.insert(y.end(), v.begin(), v.end() - 1);
    }
    return y;
  };
  auto expand = [&](const std::vector<double>& y) {
    std::vector<std::vector<double>> xs;
    std::size_t k = 0;
    for (int i = 0; i < np; ++i) {
      const int n = game.action_count(i);
      std::vector<double> v(y.begin() + k, y.begin() + k + n - 1);
      double head = 0.0;
      for (double c : v) head += c;
      v.push_back(1.0 - head);
      xs.push_back(std::move(v));
      k += n - 1;
    }
    return xs;
  };
  auto reduced_field = [&](const std::vector<double>& y) {
    // evaluate the field polynomially on raw (possibly off-simplex) points
    const auto xs = expand(y);
    std::vector<double> out;
    for (int i = 0; i < np; ++i) {
      const int n = game.action_count(i);
      std::vector<double> f(n, 0.0);
      std::vector<int> a(np, 0);
      for (std::size_t idx = 0; idx < game.num_profiles(); ++idx) {
        double prob = 1.0;
        for (int j = 0; j < np; ++j) {
          if (j != i) prob *= xs[j][a[j]];
        }
        f[a[i]] += prob * game.payoff_at(i, idx);
        for (int j = np - 1; j >= 0; --j) {
          if (++a[j] < game.action_count(j)) break;
          a[j] = 0;
        }
      }
      double avg = 0.0;
      for (int h = 0; h < n; ++h) avg += xs[i][h] * f[h];
      for (int h = 0; h < n - 1; ++h) {
        out.push_back(xs[i][h] * (f[h] - avg) +
                      mutation.strength(i) * (mutation.bias(i)[h] - xs[i][h]));
      }
    }
    return out;
  };

  const std::vector<double> y0 = reduce(x);
  Eigen::MatrixXd jac(m, m);
  for (int j = 0; j < m; ++j) {
    auto yp = y0, ym = y0;
    yp[j] += step;
    ym[j] -= step;
    const auto fp = reduced_field(yp);
    const auto fm = reduced_field(ym);
    for (int r = 0; r < m; ++r) jac(r, j) = (fp[r] - fm[r]) / (2.0 * step);
  }
  return jac;
}

// Random interior profile (flat Dirichlet per player).
inline MixedProfile random_interior(const Game& game, RngStream& rng) {
  std::vector<std::vector<double>> xs;
  for (int i = 0; i < game.num_players(); ++i) {
    std::vector<double> x(game.action_count(i));
    double sum = 0.0;
    for (double& v : x) {
      v = rng.next_exponential();
      sum += v;
    }
    for (double& v : x) v /= sum;
    xs.push_back(std::move(x));
  }
  return MixedProfile(std::move(xs));
}

// Random small game with payoffs in [lo, hi].
inline Game random_game(RngStream& rng, double lo, double hi, int max_actions = 3) {
  const int np = 2 + static_cast<int>(rng.next_u64() % 2);
  std::vector<int> counts;
  for (int i = 0; i < np; ++i) {
    counts.push_back(2 + static_cast<int>(rng.next_u64() % (max_actions - 1)));
  }
  std::size_t profiles = 1;
  for (int c : counts) profiles *= c;
  std::vector<std::vector<double>> tensors;
  for (int i = 0; i < np; ++i) {
    std::vector<double> t(profiles);
    for (double& v : t) v = lo + (hi - lo) * rng.next_unit();
    tensors.push_back(std::move(t));
  }
  return Game(std::move(counts), std::move(tensors));
}

}  // namespace mbl::oracles

#endif  // MBL_TESTS_ORACLES_HPP_
