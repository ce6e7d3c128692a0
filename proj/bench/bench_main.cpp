// Compares the serial reference implementations against the OpenMP kernels
// on representative workloads. Outputs are checked for equality, so this
// doubles as a quick consistency run.
#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mbl/analysis.hpp"
#include "mbl/catalog.hpp"
#include "mbl/experiment.hpp"

using namespace mbl;

namespace {

template <typename F>
double time_seconds(F&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void row(const std::string& name, double serial, double parallel, bool identical) {
  std::printf("%-28s %10.3fs %10.3fs %8.2fx   %s\n", name.c_str(), serial, parallel,
              serial / parallel, identical ? "outputs identical" : "OUTPUT MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled\n");
#endif
  std::printf("%-28s %11s %11s %9s\n", "workload", "serial", "parallel", "speedup");

  {
    const auto mp = catalog_game("MP");
    ExperimentConfig config;
    config.game_name = "MP";
    LearnerConfig l;
    l.algorithm = Algorithm::kMblDpu;
    l.theta = 1e-4;
    l.mutation = 0.05;
    config.learners = {l, l};
    config.steps = 100000;
    config.num_inits = 8;
    config.master_seed = 1;

    std::vector<RunRecord> serial_records, parallel_records;
    const double ts =
        time_seconds([&] { serial_records = run_experiment(config, mp.game, false); });
    const double tp =
        time_seconds([&] { parallel_records = run_experiment(config, mp.game, true); });
    bool same = serial_records.size() == parallel_records.size();
    for (std::size_t r = 0; same && r < serial_records.size(); ++r) {
      const auto& a = serial_records[r];
      const auto& b = parallel_records[r];
      same = a.steps == b.steps;
      for (std::size_t k = 0; same && k < a.profiles.size(); ++k) {
        for (int i = 0; same && i < 2; ++i) {
          same = a.profiles[k].strategy(i) == b.profiles[k].strategy(i);
        }
      }
    }
    row("MP ensemble (8 x 1e5)", ts, tp, same);
  }

  {
    const auto rps9 = catalog_game("RPS9");
    const auto shifted = shift_nonnegative(rps9.game);
    LearnerConfig cfg;
    cfg.algorithm = Algorithm::kMblDpu;
    cfg.theta = 1e-4;
    cfg.mutation = 0.05;
    const auto x = MixedProfile::uniform(rps9.game);

    DriftEstimate serial_est{{}, {}, {}, 0}, parallel_est{{}, {}, {}, 0};
    const double ts = time_seconds(
        [&] { serial_est = empirical_drift(cfg, shifted.game, x, 400000, 9, false); });
    const double tp = time_seconds(
        [&] { parallel_est = empirical_drift(cfg, shifted.game, x, 400000, 9, true); });
    bool same = true;
    for (int i = 0; i < 2; ++i) {
      for (int h = 0; h < 9; ++h) {
        same = same && serial_est.drift[i][h] == parallel_est.drift[i][h];
      }
    }
    row("RPS-9 drift (4e5 samples)", ts, tp, same);
  }

  {
    const auto mp = catalog_game("MP");
    LearnerConfig cfg;
    cfg.algorithm = Algorithm::kMblDpu;
    cfg.mutation = 0.05;
    const std::vector<double> thetas = {4e-4, 2e-4};
    std::vector<double> serial_err, parallel_err;
    const double ts = time_seconds([&] {
      serial_err = ode_approximation_error(mp.game, cfg, MixedProfile::uniform(mp.game),
                                           thetas, 2.0, 64, 5, false);
    });
    const double tp = time_seconds([&] {
      parallel_err = ode_approximation_error(mp.game, cfg, MixedProfile::uniform(mp.game),
                                             thetas, 2.0, 64, 5, true);
    });
    row("MP scaling (64-run means)", ts, tp, serial_err == parallel_err);
  }
  return 0;
}
