// Command-line laboratory for mutation-bias learning: self-play experiments,
// replicator-mutator ODE tooling, and the diagnostics connecting the two.
#include <CLI11.hpp>
#include <optional>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "mbl/analysis.hpp"
#include "mbl/catalog.hpp"
#include "mbl/config_file.hpp"
#include "mbl/csv.hpp"
#include "mbl/dynamics.hpp"
#include "mbl/experiment.hpp"
#include "mbl/svg_plot.hpp"

namespace {

using namespace mbl;

// Raised for bad invocations (unknown names, unreadable files); maps to exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string resolve_output(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  if (const char* dir = std::getenv("MBL_OUT_DIR"); dir && *dir) {
    std::filesystem::create_directories(dir);
    return std::string(dir) + "/" + path;
  }
  return path;
}

Game load_game_arg(const std::string& game, const std::string& game_file) {
  try {
    if (!game_file.empty()) return game_from_file(game_file);
    return catalog_game(game).game;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

MutationParams mutation_from_args(const Game& game, double m, const std::string& c_text,
                                  bool plain_rd) {
  if (m == 0.0 && !plain_rd) {
    throw UsageError("M = 0 selects plain replicator dynamics; pass --rd to confirm");
  }
  if (c_text.empty() || c_text == "uniform") {
    return MutationParams::uniform_bias(game, m, plain_rd);
  }
  auto cs = parse_profile_text(c_text);
  std::vector<double> ms(game.num_players(), m);
  return MutationParams(std::move(ms), std::move(cs), plain_rd);
}

MixedProfile profile_from_arg(const Game& game, const std::string& text) {
  if (text.empty() || text == "uniform") return MixedProfile::uniform(game);
  return MixedProfile(parse_profile_text(text));
}

void print_profile(const MixedProfile& p) {
  for (int i = 0; i < p.num_players(); ++i) {
    std::printf("  player %d: (", i);
    const auto& x = p.strategy(i);
    for (std::size_t h = 0; h < x.size(); ++h) {
      std::printf("%s%.9g", h ? ", " : "", x[h]);
    }
    std::printf(")\n");
  }
}

int cmd_catalog(const std::string& only) {
  for (const auto& name : catalog_names()) {
    if (!only.empty() && only != name) continue;
    const auto entry = catalog_game(name);
    std::printf("%s: %d players, actions", name.c_str(), entry.game.num_players());
    for (int i = 0; i < entry.game.num_players(); ++i) {
      std::printf(" %d", entry.game.action_count(i));
    }
    std::printf("\n");
    for (const auto& eq : entry.equilibria) {
      std::printf("  %s equilibrium:\n",
                  eq.kind == EquilibriumKind::kStrictVertex ? "strict-vertex" : "interior");
      for (std::size_t i = 0; i < eq.exact.size(); ++i) {
        std::printf("    player %zu: (", i);
        for (std::size_t h = 0; h < eq.exact[i].size(); ++h) {
          std::printf("%s%lld/%lld", h ? ", " : "", eq.exact[i][h].num, eq.exact[i][h].den);
        }
        std::printf(")\n");
      }
      std::printf("    violation: %.3e\n", nash_violation(entry.game, eq.profile()));
    }
  }
  return 0;
}

int cmd_ode(const Game& game, const MutationParams& mutation, const MixedProfile& x0,
            double horizon, double tol, const std::string& out) {
  const auto traj = integrate_rmd(game, mutation, x0, horizon, tol);
  std::printf("integrated to t = %.6g in %zu accepted steps (%d renormalizations)\n",
              traj.times.empty() ? 0.0 : traj.times.back(), traj.states.size(),
              traj.renormalizations);
  if (traj.step_underflow) std::printf("warning: step size underflow, stopped early\n");
  std::printf("terminal state (field norm %.3e):\n", traj.terminal_field_norm);
  print_profile(traj.terminal);
  std::printf("nash violation at terminal state: %.6g\n",
              nash_violation(game, traj.terminal));
  if (!out.empty()) {
    RunRecord rec;
    rec.run_id = 0;
    rec.rolling_std.assign(game.num_players(), {});
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      rec.steps.push_back(k);
      rec.profiles.push_back(traj.states[k]);
      for (int i = 0; i < game.num_players(); ++i) rec.rolling_std[i].push_back(0.0);
    }
    const std::string path = resolve_output(out);
    export_csv(std::vector<RunRecord>{rec}, path);
    std::printf("trajectory written to %s\n", path.c_str());
  }
  return 0;
}

int cmd_equilibrium(const Game& game, const MutationParams& mutation,
                    const MixedProfile& x0) {
  const auto result = find_equilibrium(game, mutation, x0);
  std::printf("%s after %d Newton iterations%s, residual %.3e\n",
              result.converged ? "converged" : "did NOT converge",
              result.newton_iterations,
              result.used_integration_fallback ? " (with integration fallback)" : "",
              result.residual);
  print_profile(result.profile);
  std::printf("nash violation: %.9g\n", nash_violation(game, result.profile));
  return result.converged ? 0 : 1;
}

int cmd_stability(const Game& game, const MutationParams& mutation,
                  const std::string& at) {
  MixedProfile point = at.empty() ? find_equilibrium(game, mutation,
                                                     MixedProfile::uniform(game)).profile
                                  : MixedProfile(parse_profile_text(at));
  const auto report = stability_spectrum(game, mutation, point);
  std::printf("equilibrium (field norm %.3e):\n", report.residual_norm);
  print_profile(report.equilibrium);
  double max_re = report.eigenvalues.front().real();
  std::printf("reduced Jacobian eigenvalues:\n");
  for (const auto& ev : report.eigenvalues) {
    std::printf("  %.9g %+.9gi\n", ev.real(), ev.imag());
    max_re = std::max(max_re, ev.real());
  }
  std::printf("max real part: %.9g\n", max_re);
  std::printf("classification: %s\n", to_string(report.classification));
  return 0;
}

int cmd_drift_check(const Game& game, const LearnerConfig& config, const MixedProfile& x,
                    std::uint64_t samples, std::uint64_t seed, bool serial) {
  const auto shifted = shift_nonnegative(game);
  const auto estimate = empirical_drift(config, shifted.game, x, samples, seed, !serial);
  std::vector<double> ms(game.num_players(), config.mutation);
  std::vector<std::vector<double>> cs;
  for (int i = 0; i < game.num_players(); ++i) {
    cs.push_back(config.bias.empty()
                     ? std::vector<double>(game.action_count(i), 1.0 / game.action_count(i))
                     : config.bias);
  }
  const auto field = rmd_field(shifted.game, MutationParams(ms, cs), x);
  std::printf("%-8s %-8s %12s %12s %12s %8s\n", "player", "action", "empirical",
              "rmd-field", "std-error", "z");
  int outside = 0, total = 0;
  for (int i = 0; i < game.num_players(); ++i) {
    for (int h = 0; h < game.action_count(i); ++h) {
      const double z =
          (estimate.drift[i][h] - field[i][h]) / estimate.standard_errors[i][h];
      std::printf("%-8d %-8d %12.6f %12.6f %12.6f %8.2f\n", i, h, estimate.drift[i][h],
                  field[i][h], estimate.standard_errors[i][h], z);
      ++total;
      if (std::abs(z) > 3.0) ++outside;
    }
  }
  std::printf("%d of %d components within 3 standard errors\n", total - outside, total);
  return 0;
}

int cmd_scaling(const Game& game, const LearnerConfig& config,
                const std::vector<double>& thetas, double horizon, int runs,
                std::uint64_t seed, bool serial) {
  const auto errors = ode_approximation_error(game, config, MixedProfile::uniform(game),
                                              thetas, horizon, runs, seed, !serial);
  std::printf("%-12s %-14s %s\n", "theta", "sup-error", "ratio-to-next");
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (i + 1 < errors.size()) {
      std::printf("%-12g %-14.6g %.3f\n", thetas[i], errors[i], errors[i] / errors[i + 1]);
    } else {
      std::printf("%-12g %-14.6g\n", thetas[i], errors[i]);
    }
  }
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_prefix,
                 bool plot, bool serial, bool mark_mutation_equilibrium) {
  std::optional<LoadedExperiment> maybe_loaded;
  try {
    maybe_loaded.emplace(load_experiment_file(config_path));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  LoadedExperiment& loaded = *maybe_loaded;

  std::string prefix = out_prefix;
  if (prefix.empty()) {
    prefix = std::filesystem::path(config_path).stem().string();
  }

  std::vector<double> sweep_values = {0.0};
  const bool has_sweep = loaded.sweep.has_value() && !loaded.sweep->values.empty();
  if (has_sweep) sweep_values = loaded.sweep->values;

  for (double value : sweep_values) {
    ExperimentConfig config = loaded.config;
    std::string tag;
    if (has_sweep) {
      apply_sweep_value(config, *loaded.sweep, value);
      char buf[32];
      std::snprintf(buf, sizeof buf, "_s%g", value);
      tag = buf;
    }
    const auto records = run_experiment(config, loaded.game, !serial);
    const std::string csv_path = resolve_output(prefix + tag + ".csv");
    export_csv(records, csv_path);
    std::printf("wrote %s (%d runs, %zu records each, config hash %016llx)\n",
                csv_path.c_str(), config.num_inits, records.front().steps.size(),
                static_cast<unsigned long long>(records.front().config_hash));
    if (plot) {
      // catalog games get the Nash equilibrium cross by default
      MixedProfile target = MixedProfile::uniform(loaded.game);
      if (mark_mutation_equilibrium) {
        std::vector<double> ms;
        std::vector<std::vector<double>> cs;
        for (int i = 0; i < loaded.game.num_players(); ++i) {
          const auto& l = config.learners[i];
          ms.push_back(l.mutation);
          cs.push_back(l.bias.empty()
                           ? std::vector<double>(loaded.game.action_count(i),
                                                 1.0 / loaded.game.action_count(i))
                           : l.bias);
        }
        target = find_equilibrium(loaded.game, MutationParams(ms, cs),
                                  MixedProfile::uniform(loaded.game))
                     .profile;
      } else if (!config.game_name.empty()) {
        target = catalog_game(config.game_name).equilibria.front().profile();
      }
      const std::string svg_path = resolve_output(prefix + tag + ".svg");
      render_plot(records, config.projection, target, svg_path);
      std::printf("wrote %s\n", svg_path.c_str());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mutation-bias learning laboratory"};
  app.require_subcommand(1);

  std::string game_name = "MP", game_file, c_text = "uniform", x_text = "uniform";
  double m_value = 0.05, horizon = 100.0, tol = 1e-10;
  bool plain_rd = false, serial = false;

  auto add_game_opts = [&](CLI::App* cmd) {
    cmd->add_option("--game", game_name, "catalog game name");
    cmd->add_option("--game-file", game_file, "game definition file");
  };
  auto add_mutation_opts = [&](CLI::App* cmd) {
    cmd->add_option("--M", m_value, "mutation strength");
    cmd->add_option("--c", c_text, "bias point, 'uniform' or per-player lists");
    cmd->add_flag("--rd", plain_rd, "allow M = 0 (plain replicator dynamics)");
  };

  auto* catalog_cmd = app.add_subcommand("catalog", "list built-in games and equilibria");
  std::string only;
  catalog_cmd->add_option("--game", only, "show a single game");

  auto* ode_cmd = app.add_subcommand("ode", "integrate the replicator-mutator dynamics");
  add_game_opts(ode_cmd);
  add_mutation_opts(ode_cmd);
  ode_cmd->add_option("--x0", x_text, "initial profile");
  ode_cmd->add_option("--horizon", horizon, "integration horizon");
  ode_cmd->add_option("--tol", tol, "local error tolerance");
  std::string ode_out;
  ode_cmd->add_option("--out", ode_out, "trajectory CSV path");

  auto* eq_cmd = app.add_subcommand("equilibrium", "locate a mutation equilibrium");
  add_game_opts(eq_cmd);
  add_mutation_opts(eq_cmd);
  eq_cmd->add_option("--x0", x_text, "Newton starting profile");

  auto* stab_cmd = app.add_subcommand("stability", "classify an equilibrium's spectrum");
  add_game_opts(stab_cmd);
  add_mutation_opts(stab_cmd);
  std::string at_text;
  stab_cmd->add_option("--at", at_text, "evaluate at this profile instead of solving");

  auto* drift_cmd = app.add_subcommand("drift-check",
                                       "compare empirical learner drift to the ODE field");
  add_game_opts(drift_cmd);
  std::string algorithm = "mbl-dpu";
  double theta = 1e-4;
  std::uint64_t samples = 1000000, seed = 42;
  drift_cmd->add_option("--algorithm", algorithm, "mbl-dpu or cross");
  drift_cmd->add_option("--theta", theta, "learning rate");
  drift_cmd->add_option("--M", m_value, "mutation strength");
  drift_cmd->add_option("--c", c_text, "bias point");
  drift_cmd->add_option("--x", x_text, "profile to probe");
  drift_cmd->add_option("--samples", samples, "one-step samples");
  drift_cmd->add_option("--seed", seed, "rng seed");
  drift_cmd->add_flag("--serial", serial, "disable OpenMP");

  auto* scaling_cmd = app.add_subcommand("scaling",
                                         "ensemble-mean error against the ODE flow");
  add_game_opts(scaling_cmd);
  std::vector<double> theta_list = {4e-4, 2e-4, 1e-4};
  int runs = 200;
  scaling_cmd->add_option("--theta-list", theta_list, "decreasing learning rates");
  scaling_cmd->add_option("--M", m_value, "mutation strength");
  scaling_cmd->add_option("--T", horizon, "comparison horizon");
  scaling_cmd->add_option("--runs", runs, "ensemble size per theta");
  scaling_cmd->add_option("--seed", seed, "rng seed");
  scaling_cmd->add_flag("--serial", serial, "disable OpenMP");

  auto* sim_cmd = app.add_subcommand("simulate", "run an experiment config");
  std::string config_path, out_prefix;
  bool plot = false, mark_xm = false;
  sim_cmd->add_option("config", config_path, "experiment config file")->required();
  sim_cmd->add_option("--out-prefix", out_prefix, "output file prefix");
  sim_cmd->add_flag("--plot", plot, "also render the projection scatter");
  sim_cmd->add_flag("--mark-mutation-equilibrium", mark_xm,
                    "mark x^M instead of the Nash equilibrium");
  sim_cmd->add_flag("--serial", serial, "disable OpenMP");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (catalog_cmd->parsed()) return cmd_catalog(only);
    const Game game = load_game_arg(game_name, game_file);
    if (ode_cmd->parsed()) {
      return cmd_ode(game, mutation_from_args(game, m_value, c_text, plain_rd),
                     profile_from_arg(game, x_text), horizon, tol, ode_out);
    }
    if (eq_cmd->parsed()) {
      return cmd_equilibrium(game, mutation_from_args(game, m_value, c_text, plain_rd),
                             profile_from_arg(game, x_text));
    }
    if (stab_cmd->parsed()) {
      return cmd_stability(game, mutation_from_args(game, m_value, c_text, plain_rd),
                           at_text);
    }
    if (drift_cmd->parsed()) {
      LearnerConfig cfg;
      cfg.algorithm = algorithm_from_string(algorithm);
      cfg.theta = theta;
      cfg.mutation = m_value;
      if (c_text != "uniform" && !c_text.empty()) cfg.bias = parse_number_list(c_text);
      return cmd_drift_check(game, cfg, profile_from_arg(game, x_text), samples, seed,
                             serial);
    }
    if (scaling_cmd->parsed()) {
      LearnerConfig cfg;
      cfg.algorithm = Algorithm::kMblDpu;
      cfg.mutation = m_value;
      return cmd_scaling(game, cfg, theta_list, horizon, runs, seed, serial);
    }
    if (sim_cmd->parsed()) {
      return cmd_simulate(config_path, out_prefix, plot, serial, mark_xm);
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
