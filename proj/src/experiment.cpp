#include "mbl/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "mbl/analysis.hpp"

namespace mbl {

void validate_experiment(const ExperimentConfig& config, const Game& game) {
  if (static_cast<int>(config.learners.size()) != game.num_players()) {
    throw std::invalid_argument("one learner config required per player");
  }
  if (config.num_inits < 1) throw std::invalid_argument("num_inits must be at least 1");
  // steps = 0 is the degenerate record-initial-only mode
  if (config.steps > 0 && config.steps < config.rolling_window) {
    throw std::invalid_argument("steps must be at least the rolling window");
  }
  if (config.record_stride < 1) throw std::invalid_argument("record stride must be positive");
  if (config.projection.empty()) {
    throw std::invalid_argument("projection must name at least one (player, action) pair");
  }
  for (const auto& [player, action] : config.projection) {
    if (player < 0 || player >= game.num_players() || action < 0 ||
        action >= game.action_count(player)) {
      throw std::invalid_argument("projection dimension out of range for game");
    }
  }
  if (config.init_scheme == InitScheme::kExplicitList) {
    if (static_cast<int>(config.explicit_inits.size()) != config.num_inits) {
      throw std::invalid_argument("explicit init list length must equal num_inits");
    }
    for (const auto& p : config.explicit_inits) {
      if (!p.compatible_with(game)) {
        throw std::invalid_argument("explicit init does not match game");
      }
    }
  }
}

MixedProfile draw_initial_profile(const Game& game, std::uint64_t master_seed,
                                  int run) {
  std::vector<std::vector<double>> xs;
  for (int i = 0; i < game.num_players(); ++i) {
    RngStream rng = RngStream::for_run_player(master_seed, run, i, 0);
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

void simulate_run(const Game& shifted_game,
                  const std::vector<LearnerConfig>& configs,
                  std::vector<LearnerState>& states,
                  std::vector<RngStream>& action_rngs, std::uint64_t steps,
                  const StepObserver& observer) {
  const int np = shifted_game.num_players();
  PureProfile a;
  a.actions.resize(np);
  if (observer) observer(0, states);
  for (std::uint64_t t = 1; t <= steps; ++t) {
    for (int i = 0; i < np; ++i) {
      a.actions[i] = act(states[i], configs[i], action_rngs[i]);
    }
    const std::size_t idx = shifted_game.profile_index(a);
    for (int i = 0; i < np; ++i) {
      observe(states[i], configs[i], a.actions[i], shifted_game.payoff_at(i, idx));
    }
    if (observer) observer(t, states);
  }
}

namespace {

RunRecord execute_run(const ExperimentConfig& config, const Game& raw_game,
                      const Game& shifted_game, std::uint64_t hash, int run) {
  const int np = raw_game.num_players();
  const MixedProfile init =
      config.init_scheme == InitScheme::kDirichletUniform
          ? draw_initial_profile(raw_game, config.master_seed, run)
          : config.explicit_inits[run];

  std::vector<LearnerState> states(np);
  std::vector<RngStream> rngs;
  rngs.reserve(np);
  for (int i = 0; i < np; ++i) {
    states[i] = make_learner_state(config.learners[i], init.strategy(i));
    rngs.push_back(RngStream::for_run_player(config.master_seed, run, i, 1));
  }

  RunRecord record;
  record.run_id = run;
  record.master_seed = config.master_seed;
  record.config_hash = hash;
  record.rolling_std.resize(np);

  std::vector<RollingStd> stds;
  for (int i = 0; i < np; ++i) {
    stds.emplace_back(raw_game.action_count(i), config.rolling_window);
  }

  // Rolling std is fed every raw step; profiles land in the record only at
  // stride boundaries.
  StepObserver observer = [&](std::uint64_t t, const std::vector<LearnerState>& st) {
    for (int i = 0; i < np; ++i) stds[i].push(st[i].policy);
    if (t % config.record_stride == 0) {
      record.steps.push_back(t);
      std::vector<std::vector<double>> xs;
      xs.reserve(np);
      for (int i = 0; i < np; ++i) xs.push_back(st[i].policy);
      record.profiles.emplace_back(std::move(xs));
      for (int i = 0; i < np; ++i) record.rolling_std[i].push_back(stds[i].value());
    }
  };

  simulate_run(shifted_game, config.learners, states, rngs, config.steps, observer);
  return record;
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& config,
                                      const Game& game, bool parallel) {
  validate_experiment(config, game);
  const ShiftedGame shifted = shift_nonnegative(game);
  for (int i = 0; i < game.num_players(); ++i) {
    validate_config(config.learners[i], game.action_count(i),
                    shifted.game.max_payoff(i));
  }
  const std::uint64_t hash = config_hash(config);

  std::vector<RunRecord> records(config.num_inits);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int run = 0; run < config.num_inits; ++run) {
    records[run] = execute_run(config, game, shifted.game, hash, run);
  }
  return records;
}

std::string canonical_config_string(const ExperimentConfig& config) {
  std::ostringstream out;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "game=" << (config.game_file.empty() ? config.game_name : config.game_file)
      << "\nsteps=" << config.steps << "\nnum_inits=" << config.num_inits
      << "\nseed=" << config.master_seed << "\nrecord_stride=" << config.record_stride
      << "\nrolling_window=" << config.rolling_window << "\ninit_scheme="
      << (config.init_scheme == InitScheme::kDirichletUniform ? "dirichlet-uniform"
                                                              : "explicit-list")
      << "\nprojection=";
  for (std::size_t k = 0; k < config.projection.size(); ++k) {
    if (k) out << ",";
    out << config.projection[k].first << ":" << config.projection[k].second;
  }
  out << "\n";
  for (std::size_t i = 0; i < config.learners.size(); ++i) {
    const auto& l = config.learners[i];
    out << "learner." << i << "=" << to_string(l.algorithm) << ";theta=" << num(l.theta)
        << ";M=" << num(l.mutation) << ";tau=" << num(l.tau) << ";beta=" << num(l.beta)
        << ";alpha0=" << num(l.q_alpha0) << ";kappa=" << num(l.q_kappa)
        << ";delta_win=" << num(l.delta_win) << ";delta_lose=" << num(l.delta_lose)
        << ";faq_kappa=" << num(l.faq_kappa) << ";c=";
    for (std::size_t h = 0; h < l.bias.size(); ++h) {
      if (h) out << ",";
      out << num(l.bias[h]);
    }
    out << "\n";
  }
  if (config.init_scheme == InitScheme::kExplicitList) {
    for (const auto& p : config.explicit_inits) {
      out << "init=";
      for (int i = 0; i < p.num_players(); ++i) {
        if (i) out << ";";
        const auto& x = p.strategy(i);
        for (std::size_t h = 0; h < x.size(); ++h) {
          if (h) out << ",";
          out << num(x[h]);
        }
      }
      out << "\n";
    }
  }
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  // FNV-1a over the canonical rendering
  const std::string text = canonical_config_string(config);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace mbl
