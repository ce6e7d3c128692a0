#ifndef MBL_DYNAMICS_HPP_
#define MBL_DYNAMICS_HPP_

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "mbl/game.hpp"

namespace mbl {

// Per-player tangent directions, same shape as a MixedProfile.
using Tangent = std::vector<std::vector<double>>;

// Mutation strengths M_i and strictly interior bias points c_i. M_i = 0 is
// rejected unless the profile was built with allow_plain_rd.
class MutationParams {
 public:
  MutationParams(std::vector<double> strengths,
                 std::vector<std::vector<double>> biases,
                 bool allow_plain_rd = false);

  static MutationParams uniform_bias(const Game& game, double strength,
                                     bool allow_plain_rd = false);

  int num_players() const { return static_cast<int>(strengths_.size()); }
  double strength(int player) const { return strengths_[player]; }
  const std::vector<double>& bias(int player) const { return biases_[player]; }
  double min_strength() const;

 private:
  std::vector<double> strengths_;
  std::vector<std::vector<double>> biases_;
};

// Right-hand side of the replicator-mutator dynamics:
//   v_ih = x_ih (f_ih(x) - sum_k x_ik f_ik(x)) + M_i (c_ih - x_ih),
// with fitness f_ih(x) = E[r_i | x, a_i = h]. Per-player components sum to 0.
Tangent rmd_field(const Game& game, const MutationParams& mutation,
                  const MixedProfile& profile);

double tangent_norm(const Tangent& t);

struct OdeTrajectory {
  std::vector<double> times;
  std::vector<MixedProfile> states;
  MixedProfile terminal;
  double terminal_field_norm = 0.0;
  int renormalizations = 0;
  bool step_underflow = false;
};

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) integration of the RMD
// field. Per-step local error is held below tol (absolute and relative); max
// step 1.0. States drifting off the simplex by more than 1e-12 are
// renormalized and counted. When sample_times is nonempty, states are
// recorded exactly at those times instead of at every accepted step.
OdeTrajectory integrate_rmd(const Game& game, const MutationParams& mutation,
                            const MixedProfile& x0, double horizon,
                            double tol = 1e-10,
                            const std::vector<double>& sample_times = {});

struct EquilibriumResult {
  MixedProfile profile;
  double residual = 0.0;
  bool converged = false;
  int newton_iterations = 0;
  bool used_integration_fallback = false;
};

// Damped Newton on reduced coordinates (last component of each player
// substituted), falling back to long-horizon integration when Newton stalls.
// Converged means field norm <= 1e-12 at a strictly interior profile.
EquilibriumResult find_equilibrium(const Game& game, const MutationParams& mutation,
                                   const MixedProfile& x_init);

// Jacobian of the RMD field in reduced coordinates, assembled analytically
// from the multilinear fitness. Size sum_i (n_i - 1).
Eigen::MatrixXd reduced_jacobian(const Game& game, const MutationParams& mutation,
                                 const MixedProfile& profile);

enum class Stability { kAsymptoticallyStable, kUnstable, kMarginal };

const char* to_string(Stability s);

struct StabilityReport {
  MixedProfile equilibrium;
  std::vector<std::complex<double>> eigenvalues;
  Stability classification = Stability::kMarginal;
  double residual_norm = 0.0;
};

// Spectrum of the reduced Jacobian at an equilibrium (field norm <= 1e-8
// required). Real parts within +-1e-8 of zero classify as marginal.
StabilityReport stability_spectrum(const Game& game, const MutationParams& mutation,
                                   const MixedProfile& profile);

}  // namespace mbl

#endif  // MBL_DYNAMICS_HPP_
