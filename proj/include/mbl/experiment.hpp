#ifndef MBL_EXPERIMENT_HPP_
#define MBL_EXPERIMENT_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mbl/game.hpp"
#include "mbl/learners.hpp"

namespace mbl {

enum class InitScheme { kDirichletUniform, kExplicitList };

struct ExperimentConfig {
  std::string game_name;                  // catalog name, or empty when game_file is set
  std::string game_file;
  std::vector<LearnerConfig> learners;    // one per player
  std::uint64_t steps = 600000;
  int num_inits = 10;
  std::uint64_t master_seed = 42;
  InitScheme init_scheme = InitScheme::kDirichletUniform;
  std::vector<MixedProfile> explicit_inits;
  std::uint64_t record_stride = 100;
  std::uint64_t rolling_window = 5000;
  std::vector<std::pair<int, int>> projection = {{0, 0}, {1, 0}};  // (player, action)
};

struct RunRecord {
  int run_id = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> steps;             // recorded step indices
  std::vector<MixedProfile> profiles;
  std::vector<std::vector<double>> rolling_std; // [player][record index]
  std::uint64_t config_hash = 0;
};

void validate_experiment(const ExperimentConfig& config, const Game& game);

// Flat Dirichlet(1,...,1) draw per player from the run's init stream.
MixedProfile draw_initial_profile(const Game& game, std::uint64_t master_seed,
                                  int run);

// Per-step observer; receives the step index just completed (0 for the
// initial state) and the players' current policies.
using StepObserver =
    std::function<void(std::uint64_t, const std::vector<LearnerState>&)>;

// One self-play run on an already-shifted game. Learners act simultaneously,
// observe only their own reward, and update; fully determined by the streams.
void simulate_run(const Game& shifted_game,
                  const std::vector<LearnerConfig>& configs,
                  std::vector<LearnerState>& states,
                  std::vector<RngStream>& action_rngs, std::uint64_t steps,
                  const StepObserver& observer);

// The figure protocol: shift the game once, draw num_inits initial profiles,
// run each init, record strided profiles plus rolling-std series. Runs are
// independent; with parallel=true they are distributed over OpenMP threads
// and the output is bit-identical to the serial reference.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config,
                                      const Game& game, bool parallel = true);

std::uint64_t config_hash(const ExperimentConfig& config);

// Canonical key=value rendering used for hashing and provenance output.
std::string canonical_config_string(const ExperimentConfig& config);

}  // namespace mbl

#endif  // MBL_EXPERIMENT_HPP_
