#ifndef MBL_ANALYSIS_HPP_
#define MBL_ANALYSIS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mbl/dynamics.hpp"
#include "mbl/game.hpp"
#include "mbl/learners.hpp"

namespace mbl {

// Windowed standard deviation of a vector-valued series under the Euclidean
// metric: sqrt(mean over the trailing window of ||v - window mean||^2).
// Values are accumulated relative to an anchor so a constant series yields an
// exact zero; the anchor is refreshed periodically to keep the sums well
// conditioned over long runs.
class RollingStd {
 public:
  RollingStd(int dim, std::size_t window);

  void push(std::span<const double> value);
  double value() const;
  std::size_t count() const { return ring_.size(); }

 private:
  void rebuild_around_current();

  int dim_;
  std::size_t window_;
  std::vector<std::vector<double>> ring_;  // raw values, newest last
  std::size_t head_ = 0;                   // index of oldest element
  std::vector<double> anchor_;
  std::vector<double> sum_;                // sum of (v - anchor)
  double sum_sq_ = 0.0;                    // sum of ||v - anchor||^2
  std::size_t pushes_since_rebuild_ = 0;
};

struct DriftEstimate {
  MixedProfile point;
  Tangent drift;                          // Monte Carlo mean of (one-step dX)/theta
  std::vector<std::vector<double>> standard_errors;
  std::uint64_t samples = 0;
};

// Monte Carlo drift of the one-step learner transition at a frozen profile;
// all players step simultaneously, each sample restarts from x. Only defined
// for MBL-DPU and Cross. The game must already be shifted nonnegative.
DriftEstimate empirical_drift(const LearnerConfig& config, const Game& game,
                              const MixedProfile& x, std::uint64_t samples,
                              std::uint64_t seed, bool parallel = true);

// sup_t ||ensemble mean of X^theta(round(t/theta)) - Phi(x0, t)|| on a grid of
// 50 evenly spaced checkpoint times in (0, T], one value per theta. theta_list
// must be decreasing; MBL-DPU only; all runs share x0.
std::vector<double> ode_approximation_error(const Game& game,
                                            const LearnerConfig& config,
                                            const MixedProfile& x0,
                                            std::span<const double> theta_list,
                                            double horizon,
                                            int ensemble_size,
                                            std::uint64_t seed,
                                            bool parallel = true);

struct ConvergenceReport {
  double final_distance = 0.0;
  std::optional<std::uint64_t> hit_time;  // first step within the radius ball
  double final_window_fraction = 0.0;     // fraction of last-window samples inside
  std::vector<std::vector<double>> rolling_std;  // [player][step]
};

ConvergenceReport convergence_metrics(std::span<const MixedProfile> run,
                                      const MixedProfile& target, double radius,
                                      std::size_t window);

// Streaming variant for long runs where storing every profile is wasteful.
class ConvergenceTracker {
 public:
  ConvergenceTracker(const MixedProfile& target, double radius,
                     std::size_t final_window);

  void push(std::span<const double> flat_state);
  // flat concatenated state helper
  static std::vector<double> flatten(const MixedProfile& p);

  double last_distance() const { return last_distance_; }
  std::optional<std::uint64_t> hit_time() const { return hit_time_; }
  double min_distance_in_final_window() const;
  double fraction_inside_final_window() const;
  // length of the trailing run of samples outside the ball, and the longest
  // closed excursion inside the final window
  std::uint64_t open_excursion_length() const { return open_excursion_; }

 private:
  std::vector<double> target_;
  double radius_;
  std::size_t final_window_;
  std::uint64_t step_ = 0;
  double last_distance_ = 0.0;
  std::optional<std::uint64_t> hit_time_;
  std::vector<double> window_distances_;  // ring over the final window
  std::size_t window_pos_ = 0;
  bool window_full_ = false;
  std::uint64_t open_excursion_ = 0;
};

}  // namespace mbl

#endif  // MBL_ANALYSIS_HPP_
