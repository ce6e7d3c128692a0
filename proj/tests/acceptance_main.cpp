// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Every tolerance is pinned in code.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mbl/analysis.hpp"
#include "mbl/catalog.hpp"
#include "mbl/csv.hpp"
#include "mbl/dynamics.hpp"
#include "mbl/experiment.hpp"
#include "mbl/game.hpp"
#include "mbl/learners.hpp"

using namespace mbl;

namespace {

constexpr std::uint64_t kSeed = 42;

int criteria_failed = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return std::string(buf);
}

void report(const std::string& label, bool pass, const std::string& detail,
            double seconds) {
  std::printf("%s: %s  %s  [%.1fs]\n", label.c_str(), pass ? "PASS" : "FAIL",
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++criteria_failed;
}

void report(int criterion, bool pass, const std::string& detail, double seconds) {
  report(fmt("criterion %d", criterion), pass, detail, seconds);
}

MutationParams uniform_mutation(const Game& game, double m, bool rd = false) {
  return MutationParams::uniform_bias(game, m, rd);
}

double max_real_part(const StabilityReport& report) {
  double m = report.eigenvalues.front().real();
  for (const auto& ev : report.eigenvalues) m = std::max(m, ev.real());
  return m;
}

// Self-play of one seeded run with full-resolution convergence tracking.
struct TrackedRun {
  double final_distance = 0.0;
  double final_rolling_std_max = 0.0;  // max over players at the last step
  std::optional<std::uint64_t> hit_time;
  double min_distance_final_window = 0.0;
  std::uint64_t open_excursion = 0;
};

TrackedRun tracked_selfplay(const Game& game, const LearnerConfig& learner,
                            const MixedProfile& target, double radius,
                            std::uint64_t steps, std::uint64_t final_window,
                            std::uint64_t seed, int run) {
  const auto shifted = shift_nonnegative(game);
  const int np = game.num_players();
  for (int i = 0; i < np; ++i) {
    validate_config(learner, game.action_count(i), shifted.game.max_payoff(i));
  }
  const MixedProfile init = draw_initial_profile(game, seed, run);
  std::vector<LearnerConfig> configs(np, learner);
  std::vector<LearnerState> states(np);
  std::vector<RngStream> rngs;
  for (int i = 0; i < np; ++i) {
    states[i] = make_learner_state(learner, init.strategy(i));
    rngs.push_back(RngStream::for_run_player(seed, run, i, 1));
  }

  ConvergenceTracker tracker(target, radius, final_window);
  std::vector<RollingStd> stds;
  for (int i = 0; i < np; ++i) stds.emplace_back(game.action_count(i), 5000);

  std::vector<double> flat;
  std::size_t dim = 0;
  for (int i = 0; i < np; ++i) dim += game.action_count(i);
  flat.resize(dim);

  StepObserver observer = [&](std::uint64_t, const std::vector<LearnerState>& st) {
    std::size_t base = 0;
    for (int i = 0; i < np; ++i) {
      std::copy(st[i].policy.begin(), st[i].policy.end(), flat.begin() + base);
      stds[i].push(st[i].policy);
      base += st[i].policy.size();
    }
    tracker.push(flat);
  };
  simulate_run(shifted.game, configs, states, rngs, steps, observer);

  TrackedRun out;
  out.final_distance = tracker.last_distance();
  out.hit_time = tracker.hit_time();
  out.min_distance_final_window = tracker.min_distance_in_final_window();
  out.open_excursion = tracker.open_excursion_length();
  for (int i = 0; i < np; ++i) {
    out.final_rolling_std_max = std::max(out.final_rolling_std_max, stds[i].value());
  }
  return out;
}

// ---------------------------------------------------------------------------

void criterion_1_catalog() {
  Timer timer;
  double worst = 0.0;
  for (const auto& name : catalog_names()) {
    const auto entry = catalog_game(name);
    for (const auto& eq : entry.equilibria) {
      worst = std::max(worst, nash_violation(entry.game, eq.profile()));
    }
  }
  const double elapsed = timer.seconds();
  report(1, worst <= 1e-9 && elapsed < 1.0,
         fmt("catalog equilibria: worst nash violation %.2e (<= 1e-9)", worst), elapsed);
}

void criterion_2_stability() {
  Timer timer;
  const auto mp = catalog_game("MP");
  const auto mp3 = catalog_game("MP3");

  const auto marginal = stability_spectrum(mp.game, uniform_mutation(mp.game, 0.0, true),
                                           mp.equilibria[0].profile());
  double worst_abs_re = 0.0;
  for (const auto& ev : marginal.eigenvalues) {
    worst_abs_re = std::max(worst_abs_re, std::abs(ev.real()));
  }
  const bool part_a = worst_abs_re < 1e-8;

  const auto mutation = uniform_mutation(mp.game, 1.0 / 20);
  const auto xm = find_equilibrium(mp.game, mutation, MixedProfile::uniform(mp.game));
  const auto stable = stability_spectrum(mp.game, mutation, xm.profile);
  const bool part_b = xm.converged && max_real_part(stable) < 0.0 &&
                      stable.classification == Stability::kAsymptoticallyStable;

  const auto unstable = stability_spectrum(mp3.game, uniform_mutation(mp3.game, 1.0 / 40),
                                           mp3.equilibria[0].profile());
  const bool part_c = max_real_part(unstable) > 0.0 &&
                      unstable.classification == Stability::kUnstable;

  const double elapsed = timer.seconds();
  report(2, part_a && part_b && part_c && elapsed < 5.0,
         fmt("RMD spectra: MP RD |Re|max %.1e; MP M=1/20 Re_max %.4f; 3MP M=1/40 "
             "Re_max %.4f",
             worst_abs_re, max_real_part(stable), max_real_part(unstable)),
         elapsed);
}

void criterion_3_eps_monotonicity() {
  Timer timer;
  bool ok = true;
  std::string detail = "eps(M) strictly decreasing:";
  for (const char* name : {"MP", "RPS3"}) {
    const auto entry = catalog_game(name);
    MixedProfile warm = MixedProfile::uniform(entry.game);
    double previous = std::numeric_limits<double>::infinity();
    std::vector<double> eps_values;
    for (double inv : {1.0, 10.0, 20.0, 30.0, 35.0, 40.0}) {
      const auto mut = uniform_mutation(entry.game, 1.0 / inv);
      const auto eq = find_equilibrium(entry.game, mut, warm);
      ok = ok && eq.converged;
      const double eps = nash_violation(entry.game, eq.profile);
      eps_values.push_back(eps);
      ok = ok && eps < previous;
      previous = eps;
      warm = eq.profile;
    }
    detail += fmt(" %s %.4f..%.4f", name, eps_values.front(), eps_values.back());
  }
  const double elapsed = timer.seconds();
  report(3, ok && elapsed < 10.0, detail, elapsed);
}

void criterion_4_drift() {
  Timer timer;
  int within = 0, total = 0;
  RngStream point_rng(kSeed);
  for (const char* name : {"MP", "RPS3"}) {
    const auto entry = catalog_game(name);
    const auto shifted = shift_nonnegative(entry.game);
    LearnerConfig cfg;
    cfg.algorithm = Algorithm::kMblDpu;
    cfg.theta = 1e-4;
    cfg.mutation = 1.0 / 20;
    const auto mutation = uniform_mutation(entry.game, 1.0 / 20);
    for (int point = 0; point < 10; ++point) {
      std::vector<std::vector<double>> xs;
      for (int i = 0; i < entry.game.num_players(); ++i) {
        std::vector<double> x(entry.game.action_count(i));
        double sum = 0.0;
        for (double& v : x) {
          v = point_rng.next_exponential();
          sum += v;
        }
        for (double& v : x) v /= sum;
        xs.push_back(std::move(x));
      }
      const MixedProfile x(xs);
      const auto est = empirical_drift(cfg, shifted.game, x, 1000000,
                                       kSeed + 1000 + point);
      const auto field = rmd_field(shifted.game, mutation, x);
      for (int i = 0; i < entry.game.num_players(); ++i) {
        for (int h = 0; h < entry.game.action_count(i); ++h) {
          ++total;
          if (std::abs(est.drift[i][h] - field[i][h]) <=
              3.0 * est.standard_errors[i][h]) {
            ++within;
          }
        }
      }
    }
  }
  const double fraction = static_cast<double>(within) / total;
  report(4, fraction >= 0.95,
         fmt("MBL-DPU drift vs RMD field: %d/%d components within 3 SE (%.1f%%)",
             within, total, 100.0 * fraction),
         timer.seconds());
}

void criterion_5_scaling() {
  Timer timer;
  const auto mp = catalog_game("MP");
  LearnerConfig cfg;
  cfg.algorithm = Algorithm::kMblDpu;
  cfg.mutation = 1.0 / 20;
  const std::vector<double> thetas = {4e-4, 2e-4, 1e-4};
  const auto errors = ode_approximation_error(mp.game, cfg,
                                              MixedProfile::uniform(mp.game), thetas,
                                              5.0, 200, kSeed);
  const bool monotone = errors[0] > errors[1] && errors[1] > errors[2];
  const double r1 = errors[0] / errors[1];
  const double r2 = errors[1] / errors[2];
  const bool ratios = r1 >= 1.3 && r1 <= 3.0 && r2 >= 1.3 && r2 <= 3.0;
  report(5, monotone && ratios,
         fmt("O(theta) scaling: errors %.4g %.4g %.4g; ratios %.2f %.2f (target "
             "[1.3, 3.0])",
             errors[0], errors[1], errors[2], r1, r2),
         timer.seconds());
}

void criterion_6_mp_selfplay() {
  Timer timer;
  const auto mp = catalog_game("MP");
  const auto mutation = uniform_mutation(mp.game, 1.0 / 20);
  const auto xm = find_equilibrium(mp.game, mutation, MixedProfile::uniform(mp.game));

  LearnerConfig cfg;
  cfg.algorithm = Algorithm::kMblDpu;
  cfg.theta = 1e-4;
  cfg.mutation = 1.0 / 20;

  int distance_ok = 0, std_ok = 0, hit_ok = 0, recurrence_ok = 0;
  double worst_distance = 0.0, worst_std = 0.0;
  for (int run = 0; run < 10; ++run) {
    const auto result = tracked_selfplay(mp.game, cfg, xm.profile, 0.05, 600000, 100000,
                                         kSeed, run);
    worst_distance = std::max(worst_distance, result.final_distance);
    worst_std = std::max(worst_std, result.final_rolling_std_max);
    if (result.final_distance < 0.05) ++distance_ok;
    if (result.final_rolling_std_max < 0.05) ++std_ok;
    if (result.hit_time.has_value()) ++hit_ok;
    // every excursion from the ball longer than 1e4 steps must be followed by
    // a re-entry inside the final 1e5-step window, so the only way to violate
    // is an open excursion longer than 1e4 at the end of the run
    if (result.open_excursion <= 10000) ++recurrence_ok;
  }
  const double elapsed = timer.seconds();
  report(6, distance_ok == 10 && std_ok == 10 && hit_ok == 10,
         fmt("MP self-play: final dist < 0.05 in %d/10 (worst %.3f); rolling std < "
             "0.05 in %d/10 (worst %.3f); ball hit in %d/10",
             distance_ok, worst_distance, std_ok, worst_std, hit_ok),
         elapsed);
  report("property recurrence", recurrence_ok == 10,
         fmt("0.05-ball re-entered after every >1e4-step excursion in the final 1e5 "
             "steps in %d/10 runs",
             recurrence_ok),
         elapsed);
}

void criterion_7_rps9_contrast() {
  Timer timer;
  const auto rps9 = catalog_game("RPS9");
  const auto mutation = uniform_mutation(rps9.game, 1.0 / 20);
  const auto xm = find_equilibrium(rps9.game, mutation, MixedProfile::uniform(rps9.game));

  auto run_all = [&](const LearnerConfig& cfg) {
    std::vector<double> finals;
    for (int run = 0; run < 10; ++run) {
      finals.push_back(tracked_selfplay(rps9.game, cfg, xm.profile, 0.15, 1000000,
                                        100000, kSeed, run)
                           .final_distance);
    }
    return finals;
  };

  LearnerConfig dpu;
  dpu.algorithm = Algorithm::kMblDpu;
  dpu.theta = 1e-4;
  dpu.mutation = 1.0 / 20;
  const auto dpu_finals = run_all(dpu);
  int dpu_inside = 0;
  double dpu_worst = 0.0;
  for (double d : dpu_finals) {
    if (d <= 0.15) ++dpu_inside;
    dpu_worst = std::max(dpu_worst, d);
  }

  auto range = [](const std::vector<double>& v) {
    double lo = v.front(), hi = v.front();
    for (double d : v) {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    return std::pair<double, double>{lo, hi};
  };

  LearnerConfig faq;
  faq.algorithm = Algorithm::kFaq;
  faq.theta = 5e-3;
  faq.tau = 20.0;
  faq.beta = 0.01;
  const auto faq_finals = run_all(faq);
  int faq_outside = 0;
  for (double d : faq_finals) {
    if (d > 0.15) ++faq_outside;
  }

  LearnerConfig wolf;
  wolf.algorithm = Algorithm::kWolfPhc;
  wolf.q_alpha0 = 0.1;
  wolf.q_kappa = 1e-4;
  wolf.delta_win = 0.5e-4;
  wolf.delta_lose = 1e-4;
  const auto wolf_finals = run_all(wolf);
  int wolf_outside = 0;
  for (double d : wolf_finals) {
    if (d > 0.15) ++wolf_outside;
  }

  const auto [dpu_lo, dpu_hi] = range(dpu_finals);
  const auto [faq_lo, faq_hi] = range(faq_finals);
  const auto [wolf_lo, wolf_hi] = range(wolf_finals);

  // pass is defined on the MBL-DPU half; the baseline halves are qualitative
  report(7, dpu_inside == 10,
         fmt("RPS-9 contrast: MBL-DPU within 0.15 in %d/10 (finals %.2f..%.2f); "
             "qualitative baselines outside 0.15: FAQ %d/10 (%.2f..%.2f), WoLF-PHC "
             "%d/10 (%.2f..%.2f)",
             dpu_inside, dpu_lo, dpu_hi, faq_outside, faq_lo, faq_hi, wolf_outside,
             wolf_lo, wolf_hi),
         timer.seconds());
}

void criterion_8_3mp_nonconvergence() {
  Timer timer;
  const auto mp3 = catalog_game("MP3");
  LearnerConfig cfg;
  cfg.algorithm = Algorithm::kMblDpu;
  cfg.theta = 1e-4;
  cfg.mutation = 1.0 / 20;

  int never_entered = 0;
  double closest = std::numeric_limits<double>::infinity();
  for (int run = 0; run < 10; ++run) {
    const auto result = tracked_selfplay(mp3.game, cfg, mp3.equilibria[0].profile(), 0.1,
                                         1000000, 200000, kSeed, run);
    closest = std::min(closest, result.min_distance_final_window);
    if (result.min_distance_final_window >= 0.1) ++never_entered;
  }
  report(8, never_entered == 10,
         fmt("3MP non-convergence: 0.1-ball avoided in final 2e5 steps in %d/10 "
             "(closest approach %.3f)",
             never_entered, closest),
         timer.seconds());
}

void criterion_9_property_suites() {
  Timer timer;
  std::string detail;
  bool ok = true;

  {  // exact simplex preservation over 1e6 random DPU/Cross steps
    LearnerConfig cfg;
    cfg.algorithm = Algorithm::kMblDpu;
    cfg.theta = 0.05;
    cfg.mutation = 0.2;
    cfg.bias = {0.4, 0.3, 0.3};
    RngStream rng(kSeed);
    LearnerState st;
    st.policy = {0.2, 0.5, 0.3};
    double worst = 0.0;
    bool in_range = true;
    for (int t = 0; t < 1000000; ++t) {
      const int a = static_cast<int>(rng.next_u64() % 3);
      const double r = 3.0 * rng.next_unit();
      if (t % 2 == 0) {
        mbl_dpu_step(st, cfg, a, r);
      } else {
        cross_step(st, cfg, a, r);
      }
      double sum = 0.0;
      for (double v : st.policy) {
        in_range = in_range && v >= 0.0 && v <= 1.0;
        sum += v;
      }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    const bool pass = worst <= 1e-14 && in_range;
    ok = ok && pass;
    detail += fmt("simplex drift %.1e; ", worst);
  }

  {  // softmax-after-update vs direct modified-payoff update
    RngStream rng(kSeed + 1);
    double worst = 0.0;
    for (int rep = 0; rep < 10000; ++rep) {
      const int n = 2 + static_cast<int>(rng.next_u64() % 4);
      std::vector<double> q(n);
      for (double& v : q) v = 2.0 * (rng.next_unit() - 0.5);
      const double tau = 0.5 + 39.5 * rng.next_unit();
      const int a = static_cast<int>(rng.next_u64() % n);
      const double dq = 0.4 * (rng.next_unit() - 0.25);
      const auto x = logistic_policy(q, tau);
      auto q2 = q;
      q2[a] += dq;
      const auto updated = logistic_policy(q2, tau);
      const double g = x[a] * (std::exp(tau * dq) - 1.0);
      const double r = g / (g + 1.0);
      for (int h = 0; h < n; ++h) {
        const double expect = h == a ? x[h] + (1.0 - x[h]) * r : x[h] - x[h] * r;
        worst = std::max(worst, std::abs(updated[h] - expect));
      }
    }
    ok = ok && worst <= 1e-12;
    detail += fmt("softmax equivalence %.1e; ", worst);
  }

  {  // logistic shift invariance
    RngStream rng(kSeed + 2);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
      std::vector<double> q(4), qs(4);
      const double c = 20.0 * (rng.next_unit() - 0.5);
      const double tau = 0.5 + 39.5 * rng.next_unit();
      for (int h = 0; h < 4; ++h) {
        q[h] = 4.0 * (rng.next_unit() - 0.5);
        qs[h] = q[h] + c;
      }
      const auto a = logistic_policy(q, tau);
      const auto b = logistic_policy(qs, tau);
      for (int h = 0; h < 4; ++h) worst = std::max(worst, std::abs(a[h] - b[h]));
    }
    ok = ok && worst <= 1e-12;
    detail += fmt("shift invariance %.1e; ", worst);
  }

  {  // analytic vs finite-difference reduced Jacobians
    double worst = 0.0;
    RngStream rng(kSeed + 3);
    for (const char* name : {"MP", "RPS3", "MP3"}) {
      const auto entry = catalog_game(name);
      const auto mut = uniform_mutation(entry.game, 0.05);
      for (int rep = 0; rep < 3; ++rep) {
        std::vector<std::vector<double>> xs;
        for (int i = 0; i < entry.game.num_players(); ++i) {
          std::vector<double> x(entry.game.action_count(i));
          double sum = 0.0;
          for (double& v : x) {
            v = rng.next_exponential();
            sum += v;
          }
          for (double& v : x) v /= sum;
          xs.push_back(std::move(x));
        }
        const MixedProfile x(xs);
        const auto analytic = reduced_jacobian(entry.game, mut, x);
        // central differences, step 1e-6, on the reduced field
        const int m = static_cast<int>(analytic.rows());
        auto reduced_field = [&](const MixedProfile& p) {
          const auto field = rmd_field(entry.game, mut, p);
          std::vector<double> out;
          for (int i = 0; i < entry.game.num_players(); ++i) {
            out.insert(out.end(), field[i].begin(), field[i].end() - 1);
          }
          return out;
        };
        int col = 0;
        for (int i = 0; i < entry.game.num_players(); ++i) {
          for (int h = 0; h < entry.game.action_count(i) - 1; ++h, ++col) {
            const double step = 1e-6;
            auto plus = x.strategies();
            auto minus = x.strategies();
            plus[i][h] += step;
            plus[i].back() -= step;
            minus[i][h] -= step;
            minus[i].back() += step;
            const auto fp = reduced_field(MixedProfile(plus));
            const auto fm = reduced_field(MixedProfile(minus));
            for (int row = 0; row < m; ++row) {
              const double fd = (fp[row] - fm[row]) / (2.0 * step);
              worst = std::max(worst, std::abs(analytic(row, col) - fd));
            }
          }
        }
      }
    }
    ok = ok && worst <= 1e-5;
    detail += fmt("jacobian FD gap %.1e; ", worst);
  }

  {  // byte-identical CSV across repeated seeded runs
    const auto mp = catalog_game("MP");
    ExperimentConfig config;
    config.game_name = "MP";
    LearnerConfig l;
    l.algorithm = Algorithm::kMblDpu;
    l.theta = 1e-3;
    l.mutation = 0.05;
    config.learners = {l, l};
    config.steps = 6000;
    config.num_inits = 2;
    config.master_seed = kSeed;
    config.record_stride = 100;
    config.rolling_window = 5000;

    const auto path_a = std::filesystem::temp_directory_path() / "mbl_acc_a.csv";
    const auto path_b = std::filesystem::temp_directory_path() / "mbl_acc_b.csv";
    export_csv(run_experiment(config, mp.game), path_a.string());
    export_csv(run_experiment(config, mp.game, /*parallel=*/false), path_b.string());
    auto slurp = [](const std::filesystem::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    const bool identical = slurp(path_a) == slurp(path_b) && !slurp(path_a).empty();
    ok = ok && identical;
    detail += fmt("CSV determinism %s", identical ? "byte-identical" : "MISMATCH");
  }

  const double elapsed = timer.seconds();
  report(9, ok && elapsed < 60.0, detail, elapsed);
}

}  // namespace

int main() {
  std::printf("acceptance suite (master seed %llu)\n",
              static_cast<unsigned long long>(kSeed));
  criterion_1_catalog();
  criterion_2_stability();
  criterion_3_eps_monotonicity();
  criterion_4_drift();
  criterion_5_scaling();
  criterion_6_mp_selfplay();
  criterion_7_rps9_contrast();
  criterion_8_3mp_nonconvergence();
  criterion_9_property_suites();
  if (criteria_failed == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria failed\n", criteria_failed);
  }
  return criteria_failed == 0 ? 0 : 1;
}
