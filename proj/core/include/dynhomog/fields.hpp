#ifndef DYNHOMOG_FIELDS_HPP
#define DYNHOMOG_FIELDS_HPP

#include <complex>
#include <span>
#include <vector>

#include "dynhomog/homogenize.hpp"
#include "dynhomog/spectral.hpp"

namespace dynhomog {

/// Pointwise periodic parts of the reconstructed fields over a sample grid,
/// together with their spectral representation (in cell-scaled variables) so
/// derivatives can be evaluated without differencing.
struct FieldProfile {
  std::vector<double> x;
  std::vector<std::complex<double>> stress;
  std::vector<std::complex<double>> velocity;
  std::vector<std::complex<double>> strain;    // D(x) * stress
  std::vector<std::complex<double>> momentum;  // rho(x) * velocity

  std::complex<double> avg_stress;
  std::complex<double> avg_velocity;
  double omega = 0.0;
  double q = 0.0;

  // Fourier data of the periodic parts: signed scaled wavenumbers and the
  // corresponding (scaled) stress/velocity coefficients.
  std::vector<double> xi_scaled;
  std::vector<std::complex<double>> coef_stress;
  std::vector<std::complex<double>> coef_velocity;
  double period = 0.0;
  double stress_unit = 0.0;    // rho0 c0^2
  double velocity_unit = 0.0;  // c0
};

/// Interface-aligned grid with `per_subregion` midpoint samples per subregion.
std::vector<double> default_grid(const DiscretizedCell& dcell,
                                 int per_subregion = 16);
/// Uniform midpoint grid of n samples over the cell.
std::vector<double> uniform_grid(const UnitCell& cell, int n);

/// Reconstruct sigma(x), udot(x) from the solved eigenfields at prescribed
/// cell averages, and derive strain/momentum through the local constitutive
/// relations.
FieldProfile reconstruct(const EigenfieldSolution& sol, const DiscretizedCell& dcell,
                         const SpectralBasis& basis, std::complex<double> avg_stress,
                         std::complex<double> avg_velocity,
                         std::span<const double> grid);

/// RMS residuals of the pointwise balance laws
///   (d/dx + iq) sigma + i omega p   and   (d/dx + iq) udot + i omega eps
/// over the profile grid, relative to the participating field magnitudes.
/// The `fluctuation` pair has the grid-mean of the residual removed, isolating
/// the resolved nonuniform content.
struct LocalResiduals {
  double momentum = 0.0;
  double kinematic = 0.0;
  double momentum_fluctuation = 0.0;
  double kinematic_fluctuation = 0.0;
};
LocalResiduals local_residuals(const FieldProfile& profile,
                               const DiscretizedCell& dcell, double omega,
                               double q);

}  // namespace dynhomog

#endif
