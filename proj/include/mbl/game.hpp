#ifndef MBL_GAME_HPP_
#define MBL_GAME_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mbl/rng.hpp"

namespace mbl {

// Joint pure-strategy profile: one action index per player.
struct PureProfile {
  std::vector<int> actions;
};

class Game;

// One probability vector per player. Validated on construction: components
// nonnegative, per-player sums within 1e-9 of one. Inputs are never silently
// renormalized; call renormalized() explicitly when that is wanted.
class MixedProfile {
 public:
  MixedProfile() = default;
  explicit MixedProfile(std::vector<std::vector<double>> strategies);

  static MixedProfile uniform(const Game& game);

  int num_players() const { return static_cast<int>(strategies_.size()); }
  const std::vector<double>& strategy(int player) const { return strategies_[player]; }
  const std::vector<std::vector<double>>& strategies() const { return strategies_; }

  // Strictly interior iff every component is positive.
  bool interior() const;

  MixedProfile renormalized() const;

  bool compatible_with(const Game& game) const;

 private:
  std::vector<std::vector<double>> strategies_;
};

// Finite normal-form game: per-player dense payoff tensors over pure
// profiles, stored row-major (last player's action varies fastest).
class Game {
 public:
  Game(std::vector<int> action_counts,
       std::vector<std::vector<double>> payoff_tensors);

  int num_players() const { return static_cast<int>(action_counts_.size()); }
  int action_count(int player) const { return action_counts_[player]; }
  const std::vector<int>& action_counts() const { return action_counts_; }
  std::size_t num_profiles() const { return num_profiles_; }

  std::size_t profile_index(const PureProfile& profile) const;
  std::size_t stride(int player) const { return strides_[player]; }

  double payoff(int player, const PureProfile& profile) const {
    return payoffs_[player][profile_index(profile)];
  }
  double payoff_at(int player, std::size_t flat_index) const {
    return payoffs_[player][flat_index];
  }
  std::span<const double> payoff_tensor(int player) const { return payoffs_[player]; }

  double max_payoff(int player) const;
  double min_payoff(int player) const;

 private:
  std::vector<int> action_counts_;
  std::vector<std::vector<double>> payoffs_;  // [player][flat profile index]
  std::vector<std::size_t> strides_;
  std::size_t num_profiles_ = 0;
};

Game build_game(std::vector<int> action_counts,
                std::vector<std::vector<double>> payoff_tensors);

// E[r_player | x], by full enumeration of pure profiles (exact at these sizes).
double expected_payoff(const Game& game, const MixedProfile& profile, int player);

// Component h is E[r_player | x, a_player = h].
std::vector<double> fitness(const Game& game, const MixedProfile& profile, int player);

// The epsilon certificate: max over players and actions of the gain a pure
// deviation yields over the current expected payoff, floored at zero.
double nash_violation(const Game& game, const MixedProfile& profile);

struct ShiftedGame {
  Game game;
  std::vector<double> shifts;  // C_i added to every payoff of player i
};

// Adds C_i = max(0, -min_a r_i(a)) per player so all payoffs are nonnegative.
// Leaves nash_violation at every profile unchanged.
ShiftedGame shift_nonnegative(const Game& game);

int sample_action(std::span<const double> probabilities, RngStream& rng);
int sample_action(const MixedProfile& profile, int player, RngStream& rng);

}  // namespace mbl

#endif  // MBL_GAME_HPP_
