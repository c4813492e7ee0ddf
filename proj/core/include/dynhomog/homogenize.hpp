#ifndef DYNHOMOG_HOMOGENIZE_HPP
#define DYNHOMOG_HOMOGENIZE_HPP

#include <Eigen/Dense>
#include <complex>

#include "dynhomog/cell.hpp"
#include "dynhomog/spectral.hpp"

namespace dynhomog {

/// Condition-number cap for the coupled eigenfield solve; beyond it the
/// system is reported as singular rather than silently regularized.
inline constexpr double kConditionCap = 1e12;

/// Response vectors of the coupled eigenfield system. For prescribed cell
/// averages the eigenfields are
///   eigenstress   = phi * <sigma> + (1/D0)   * psi   * <udot>
///   eigenvelocity = (1/rho0) * theta * <sigma> + gamma * <udot>.
/// Vectors span every subregion; entries of excluded (inactive) unknowns are
/// exactly zero. phi and gamma are dimensionless, psi and theta carry
/// 1/velocity units.
struct EigenfieldSolution {
  Eigen::VectorXcd phi;
  Eigen::VectorXcd psi;
  Eigen::VectorXcd theta;
  Eigen::VectorXcd gamma;
  double omega = 0.0;
  double q = 0.0;
  bool trivial = false;
  // Pivot-ratio condition proxy of the block matrix; 0 when trivial or not
  // estimated. Large values flag proximity to a comparison-medium resonance.
  double condition_estimate = 0.0;

  Eigen::VectorXcd eigenstress(std::complex<double> avg_stress,
                               std::complex<double> avg_velocity,
                               const ReferenceMedium& ref) const;
  Eigen::VectorXcd eigenvelocity(std::complex<double> avg_stress,
                                 std::complex<double> avg_velocity,
                                 const ReferenceMedium& ref) const;
};

/// Overall constitutive parameters at one (omega, q):
///   <strain>   = compliance * <sigma> + coupling_s1 * <udot>
///   <momentum> = coupling_s2 * <sigma> + density * <udot>.
/// For real q, compliance and density are real to rounding and
/// coupling_s1 = conj(coupling_s2); stored complex so those structure
/// properties can be verified rather than assumed.
struct EffectiveParams {
  std::complex<double> compliance;   // D-bar
  std::complex<double> density;      // rho-bar
  std::complex<double> coupling_s1;  // velocity -> strain, 1/velocity units
  std::complex<double> coupling_s2;  // stress -> momentum, 1/velocity units
  double omega = 0.0;
  double q = 0.0;
};

/// Averaged constitutive state for one prescribed (<sigma>, <udot>) pair.
struct AveragedFields {
  std::complex<double> avg_stress;
  std::complex<double> avg_velocity;
  std::complex<double> avg_strain;
  std::complex<double> avg_momentum;
  std::complex<double> energy;  // real and non-negative up to rounding
};

/// Solve the coupled system for the two unit right-hand sides directly (one LU of
/// the full Hermitian block matrix). Throws SingularSystem when the estimated
/// condition number exceeds kConditionCap.
EigenfieldSolution solve_eigenfields(const AssembledSystem& sys,
                                     const ReferenceMedium& ref);

/// Reusable variant for frequency scans: factorization and solution storage
/// persist across calls, so repeated solves of same-sized systems do not
/// allocate. One instance per thread.
class EigenfieldSolver {
 public:
  const EigenfieldSolution& solve(const AssembledSystem& sys,
                                  const ReferenceMedium& ref);

 private:
  Eigen::MatrixXcd block_;
  Eigen::MatrixXcd rhs_;
  Eigen::MatrixXcd solution_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  EigenfieldSolution sol_;
};

/// Closed-form route via the Schur complements
///   phi = [-A_D + (1/nu^2) B A_rho^{-1} B]^{-1} f, ...
/// Requires matching active sets (square coupling block) and invertible
/// sub-blocks; kept as an independent cross-check of solve_eigenfields.
EigenfieldSolution solve_eigenfields_closed_form(const AssembledSystem& sys,
                                                 const ReferenceMedium& ref);

/// D-bar = D0 (1 - f.phi), S1 = -f.psi, S2 = -f.theta, rho-bar = rho0 (1 - f.gamma).
EffectiveParams effective_params(const EigenfieldSolution& sol,
                                 const AssembledSystem& sys,
                                 const ReferenceMedium& ref);

AveragedFields apply_constitutive(const EffectiveParams& params,
                                  std::complex<double> avg_stress,
                                  std::complex<double> avg_velocity);

}  // namespace dynhomog

#endif
