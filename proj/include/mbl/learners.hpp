#ifndef MBL_LEARNERS_HPP_
#define MBL_LEARNERS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mbl/rng.hpp"

namespace mbl {

// All five rules sit behind one uncoupled interface: act from the current
// policy, observe only the own reward, update only the own state.
enum class Algorithm { kMblDpu, kMblLc, kCross, kFaq, kWolfPhc };

Algorithm algorithm_from_string(const std::string& name);
const char* to_string(Algorithm a);

struct LearnerConfig {
  Algorithm algorithm = Algorithm::kMblDpu;
  double theta = 1e-4;            // learning rate (FAQ uses it as alpha_0 with kappa decay)
  double mutation = 0.05;         // M
  std::vector<double> bias;       // c; empty means uniform
  double tau = 20.0;              // logistic temperature
  double beta = 0.01;             // frequency cap for MBL-LC / FAQ
  double q_alpha0 = 0.1;          // WoLF-PHC Q schedule alpha_t = alpha0 / (1 + kappa t)
  double q_kappa = 1e-4;
  double delta_win = 0.5e-4;      // WoLF-PHC policy steps, delta_lose > delta_win
  double delta_lose = 1.0e-4;
  double faq_kappa = 0.0;         // FAQ alpha_t = theta / (1 + faq_kappa t); constant by default
};

struct LearnerState {
  std::vector<double> policy;
  std::vector<double> q;            // action values (MBL-LC, FAQ, WoLF-PHC)
  std::vector<double> avg_policy;   // WoLF-PHC only
  std::uint64_t step = 0;           // completed updates
  std::uint64_t avg_count = 1;      // WoLF-PHC running-average denominator
};

// Throws when theta violates the stability bound theta < 1/(C + M) for
// MBL-DPU/Cross (C = the player's largest shifted payoff), when delta_lose
// <= delta_win for WoLF-PHC, or on other invalid parameters.
void validate_config(const LearnerConfig& config, int num_actions,
                     double max_shifted_payoff);

// Initial policy must be strictly interior for MBL-LC / FAQ, whose Q values
// are chosen so the logistic policy reproduces it exactly.
LearnerState make_learner_state(const LearnerConfig& config,
                                std::span<const double> initial_policy);

// Softmax with temperature tau; max-subtraction keeps it overflow-safe and
// invariant under adding a constant to all action values.
std::vector<double> logistic_policy(std::span<const double> q, double tau);

// Samples from the current policy; MBL-LC and FAQ refresh the policy from Q
// first.
int act(LearnerState& state, const LearnerConfig& config, RngStream& rng);

void mbl_dpu_step(LearnerState& state, const LearnerConfig& config, int action,
                  double reward);
void cross_step(LearnerState& state, const LearnerConfig& config, int action,
                double reward);
void mbl_lc_step(LearnerState& state, const LearnerConfig& config, int action,
                 double reward);
void faq_step(LearnerState& state, const LearnerConfig& config, int action,
              double reward);
void wolf_phc_step(LearnerState& state, const LearnerConfig& config, int action,
                   double reward);

// Dispatch on config.algorithm.
void observe(LearnerState& state, const LearnerConfig& config, int action,
             double reward);

// Optional mutation-strength controller: M <- max(floor, factor * violation).
// Off by default; not wired into the self-play loop.
double adaptive_mutation(double violation_estimate, double factor, double floor_m);

}  // namespace mbl

#endif  // MBL_LEARNERS_HPP_
