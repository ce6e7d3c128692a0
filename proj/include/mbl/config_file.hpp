#ifndef MBL_CONFIG_FILE_HPP_
#define MBL_CONFIG_FILE_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mbl/experiment.hpp"
#include "mbl/game.hpp"

namespace mbl {

// Flat `key = value` text with dotted section keys; '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_config_text(const std::string& text);
KeyValues parse_config_file(const std::string& path);

// Game definition file: `players`, `actions` (comma list) and one
// `payoffs.<i>` per player holding a (possibly nested) bracketed array in
// row-major order. Flat lists are accepted too.
Game game_from_file(const std::string& path);

std::vector<double> parse_number_list(const std::string& text);
// "0.3,0.7;0.5,0.5" -> one probability vector per player
std::vector<std::vector<double>> parse_profile_text(const std::string& text);

struct SweepSpec {
  enum class Apply { kMutationInverse, kTau, kMutationInverseAndTau };
  std::vector<double> values;
  Apply apply = Apply::kMutationInverse;
};

struct LoadedExperiment {
  ExperimentConfig config;
  Game game;
  std::optional<SweepSpec> sweep;
};

// Resolves the game (catalog or file), expands learner.all / learner.<i>
// overrides into per-player configs, and validates.
LoadedExperiment load_experiment(const KeyValues& kv);
LoadedExperiment load_experiment_file(const std::string& path);

// Applies one sweep grid value (an inverse strength: M = 1/value, tau = value).
void apply_sweep_value(ExperimentConfig& config, const SweepSpec& spec, double value);

}  // namespace mbl

#endif  // MBL_CONFIG_FILE_HPP_
