#include "mbl/game.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mbl {

namespace {
constexpr double kSumTolerance = 1e-9;
}

MixedProfile::MixedProfile(std::vector<std::vector<double>> strategies)
    : strategies_(std::move(strategies)) {
  if (strategies_.empty()) {
    throw std::invalid_argument("mixed profile needs at least one player");
  }
  for (const auto& x : strategies_) {
    if (x.size() < 2) {
      throw std::invalid_argument("each player needs at least two actions");
    }
    double sum = 0.0;
    for (double p : x) {
      if (!std::isfinite(p) || p < 0.0) {
        throw std::invalid_argument("strategy components must be finite and nonnegative");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw std::invalid_argument("strategy components must sum to one within 1e-9");
    }
  }
}

MixedProfile MixedProfile::uniform(const Game& game) {
  std::vector<std::vector<double>> xs;
  xs.reserve(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    xs.emplace_back(game.action_count(i), 1.0 / game.action_count(i));
  }
  return MixedProfile(std::move(xs));
}

bool MixedProfile::interior() const {
  for (const auto& x : strategies_) {
    for (double p : x) {
      if (p <= 0.0) return false;
    }
  }
  return true;
}

MixedProfile MixedProfile::renormalized() const {
  auto xs = strategies_;
  for (auto& x : xs) {
    double sum = 0.0;
    for (double p : x) sum += p;
    if (sum <= 0.0) throw std::invalid_argument("cannot renormalize a zero vector");
    for (double& p : x) p /= sum;
  }
  return MixedProfile(std::move(xs));
}

bool MixedProfile::compatible_with(const Game& game) const {
  if (num_players() != game.num_players()) return false;
  for (int i = 0; i < num_players(); ++i) {
    if (static_cast<int>(strategies_[i].size()) != game.action_count(i)) return false;
  }
  return true;
}

Game::Game(std::vector<int> action_counts,
           std::vector<std::vector<double>> payoff_tensors)
    : action_counts_(std::move(action_counts)), payoffs_(std::move(payoff_tensors)) {
  const int n = static_cast<int>(action_counts_.size());
  if (n < 2) throw std::invalid_argument("a game needs at least two players");
  for (int c : action_counts_) {
    if (c < 2) throw std::invalid_argument("every player needs at least two actions");
  }
  if (static_cast<int>(payoffs_.size()) != n) {
    throw std::invalid_argument("one payoff tensor required per player");
  }
  num_profiles_ = 1;
  for (int c : action_counts_) num_profiles_ *= static_cast<std::size_t>(c);
  strides_.assign(n, 1);
  for (int i = n - 2; i >= 0; --i) {
    strides_[i] = strides_[i + 1] * static_cast<std::size_t>(action_counts_[i + 1]);
  }
  for (const auto& tensor : payoffs_) {
    if (tensor.size() != num_profiles_) {
      throw std::invalid_argument("payoff tensor shape does not match action counts");
    }
    for (double v : tensor) {
      if (!std::isfinite(v)) throw std::invalid_argument("payoffs must be finite");
    }
  }
}

std::size_t Game::profile_index(const PureProfile& profile) const {
  if (profile.actions.size() != strides_.size()) {
    throw std::invalid_argument("pure profile has wrong number of players");
  }
  std::size_t idx = 0;
  for (std::size_t i = 0; i < strides_.size(); ++i) {
    const int a = profile.actions[i];
    if (a < 0 || a >= action_counts_[i]) {
      throw std::invalid_argument("action index out of range");
    }
    idx += strides_[i] * static_cast<std::size_t>(a);
  }
  return idx;
}

double Game::max_payoff(int player) const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : payoffs_[player]) m = std::max(m, v);
  return m;
}

double Game::min_payoff(int player) const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : payoffs_[player]) m = std::min(m, v);
  return m;
}

Game build_game(std::vector<int> action_counts,
                std::vector<std::vector<double>> payoff_tensors) {
  return Game(std::move(action_counts), std::move(payoff_tensors));
}

namespace {

void check_compatible(const Game& game, const MixedProfile& profile) {
  if (!profile.compatible_with(game)) {
    throw std::invalid_argument("profile dimensions do not match game");
  }
}

}  // namespace

double expected_payoff(const Game& game, const MixedProfile& profile, int player) {
  check_compatible(game, profile);
  const int n = game.num_players();
  std::vector<int> a(n, 0);
  double total = 0.0;
  for (std::size_t idx = 0; idx < game.num_profiles(); ++idx) {
    double prob = 1.0;
    for (int i = 0; i < n; ++i) prob *= profile.strategy(i)[a[i]];
    if (prob != 0.0) total += prob * game.payoff_at(player, idx);
    for (int i = n - 1; i >= 0; --i) {
      if (++a[i] < game.action_count(i)) break;
      a[i] = 0;
    }
  }
  return total;
}

std::vector<double> fitness(const Game& game, const MixedProfile& profile, int player) {
  check_compatible(game, profile);
  const int n = game.num_players();
  std::vector<double> f(game.action_count(player), 0.0);
  std::vector<int> a(n, 0);
  for (std::size_t idx = 0; idx < game.num_profiles(); ++idx) {
    double prob = 1.0;
    for (int i = 0; i < n; ++i) {
      if (i != player) prob *= profile.strategy(i)[a[i]];
    }
    if (prob != 0.0) f[a[player]] += prob * game.payoff_at(player, idx);
    for (int i = n - 1; i >= 0; --i) {
      if (++a[i] < game.action_count(i)) break;
      a[i] = 0;
    }
  }
  return f;
}

double nash_violation(const Game& game, const MixedProfile& profile) {
  check_compatible(game, profile);
  double worst = 0.0;
  for (int i = 0; i < game.num_players(); ++i) {
    const auto f = fitness(game, profile, i);
    double payoff = 0.0;
    for (int h = 0; h < game.action_count(i); ++h) payoff += profile.strategy(i)[h] * f[h];
    for (double fh : f) worst = std::max(worst, fh - payoff);
  }
  return std::max(0.0, worst);
}

ShiftedGame shift_nonnegative(const Game& game) {
  std::vector<double> shifts(game.num_players(), 0.0);
  std::vector<std::vector<double>> tensors;
  tensors.reserve(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    shifts[i] = std::max(0.0, -game.min_payoff(i));
    std::vector<double> t(game.payoff_tensor(i).begin(), game.payoff_tensor(i).end());
    for (double& v : t) v += shifts[i];
    tensors.push_back(std::move(t));
  }
  return ShiftedGame{Game(game.action_counts(), std::move(tensors)), std::move(shifts)};
}

int sample_action(std::span<const double> probabilities, RngStream& rng) {
  const double u = rng.next_unit();
  double acc = 0.0;
  const int n = static_cast<int>(probabilities.size());
  for (int h = 0; h < n; ++h) {
    acc += probabilities[h];
    if (u < acc) return h;
  }
  return n - 1;  // guards against accumulated rounding at u ~ 1
}

int sample_action(const MixedProfile& profile, int player, RngStream& rng) {
  return sample_action(std::span<const double>(profile.strategy(player)), rng);
}

}  // namespace mbl
