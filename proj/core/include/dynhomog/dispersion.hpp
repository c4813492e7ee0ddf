#ifndef DYNHOMOG_DISPERSION_HPP
#define DYNHOMOG_DISPERSION_HPP

#include <complex>
#include <utility>
#include <vector>

#include "dynhomog/homogenize.hpp"
#include "dynhomog/spectral.hpp"

namespace dynhomog {

inline constexpr double kDefaultTolRoot = 1e-10;

/// Frequency scan controls for the root search at one wavenumber. Frequencies
/// are raw (rad/time); the grid resolution is applied in scaled frequency
/// nu = omega*a/c0 with `steps_per_unit` points per unit of nu.
struct ScanParams {
  double omega_min = 0.0;  // 0 means "just above zero"
  double omega_max = 0.0;  // required
  int steps_per_unit = 400;
  double tol_root = kDefaultTolRoot;
  double eps_pole = kDefaultEpsPole;
};

/// One accepted root of the overall dispersion relation.
struct BranchPoint {
  double q = 0.0;
  double omega = 0.0;
  int branch = 0;  // 1-based, ascending omega at fixed q
  EffectiveParams params;
  std::complex<double> d_eff;
  std::complex<double> rho_eff;
  double phase_velocity = 0.0;
  double residual = 0.0;  // certificate: scaled |R| at the accepted root
};

/// Points of one branch over a q-grid, ordered by ascending q. Band-edge
/// flattening is fine; a non-monotone frequency sequence is flagged (it
/// usually means the fixed-count branch indexing crossed a gap).
struct DispersionBranch {
  int branch = 0;
  std::vector<BranchPoint> points;
  bool monotone = true;
};

/// Regroup per-wavenumber root lists (ascending q, equal length) into
/// branches.
std::vector<DispersionBranch> group_branches(
    const std::vector<std::vector<BranchPoint>>& roots_per_q);

/// Scaled dispersion residual
///   R = (D/D0)(rho/rho0) v^2 - (1 + v S1)(1 + v S2),  v = (omega/q)/c0,
/// real for real q away from poles. Throws NearPole within pole windows and
/// in the immediate neighborhood of comparison-medium resonances (where the
/// residual itself diverges).
double residual(const DiscretizedCell& dcell, const SpectralBasis& basis,
                double omega, double q, double eps_pole = kDefaultEpsPole);
double residual(const SpectralWorkspace& workspace, double omega,
                double eps_pole = kDefaultEpsPole);

/// Reference-medium pole frequencies omega = c0 |xi + q| over the basis
/// wavenumbers, ascending, limited to (0, omega_max]. The xi = 0 line is not
/// included: no computed quantity is singular there, and the acoustic branch
/// of a cell homogenized against its own average lies asymptotically on it.
std::vector<double> pole_frequencies(const DiscretizedCell& dcell,
                                     const SpectralBasis& basis, double q,
                                     double omega_max);

/// All dispersion roots in the scan range, ascending. Sign changes of the
/// residual are bracketed on a pole-split grid and refined by bisection; a
/// root is accepted only if its final residual passes the certificate, so
/// sign flips across response poles are rejected.
std::vector<BranchPoint> scan_roots(const DiscretizedCell& dcell,
                                    const SpectralBasis& basis, double q,
                                    const ScanParams& scan);

/// Lowest n_branches roots tagged 1..n. Throws InsufficientRoots when the
/// scan range contains fewer.
std::vector<BranchPoint> find_branches(const DiscretizedCell& dcell,
                                       const SpectralBasis& basis, double q,
                                       int n_branches, const ScanParams& scan);

/// Uncoupled on-branch parameters D_eff = D/(1+v S1), rho_eff = rho/(1+v S2).
std::pair<std::complex<double>, std::complex<double>> effective_on_branch(
    const EffectiveParams& params, double q, double omega);

/// Long-wavelength limit of (D_eff, rho_eff) along the first branch,
/// extrapolated from qa in {0.05, 0.02, 0.01}.
struct QuasiStaticLimit {
  std::complex<double> compliance;
  std::complex<double> density;
};
QuasiStaticLimit quasi_static_limit(const DiscretizedCell& dcell,
                                    const SpectralBasis& basis);

}  // namespace dynhomog

#endif
