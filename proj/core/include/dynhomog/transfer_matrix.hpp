#ifndef DYNHOMOG_TRANSFER_MATRIX_HPP
#define DYNHOMOG_TRANSFER_MATRIX_HPP

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "dynhomog/cell.hpp"

namespace dynhomog {

/// Exact plane-wave reference solution for layered cells, propagating the
/// continuous (displacement, traction) state across the layers. Used as the
/// independent ground truth for dispersion, mode shapes and the
/// field-integration homogenization.

/// 2x2 propagator of the (u, sigma) state across one layer; determinant 1.
Eigen::Matrix2cd layer_propagator(const Layer& layer, double omega);

/// Half-trace of the ordered product of layer propagators across the cell.
/// The exact dispersion relation is cos(q a) = monodromy_trace(cell, omega);
/// |half-trace| <= 1 on propagating bands and > 1 inside stop bands.
double monodromy_trace(const UnitCell& cell, double omega);

/// Lowest n_branches roots of monodromy_trace(omega) = cos(q a), ascending.
/// q in [0, pi/a]; bisection to ~1e-13 relative.
std::vector<double> exact_dispersion(const UnitCell& cell, double q,
                                     int n_branches);

/// Stop bands (|half-trace| > 1) up to omega_max, as (lower, upper) pairs.
std::vector<std::pair<double, double>> gap_intervals(const UnitCell& cell,
                                                     double omega_max);

/// Right/left-going wave amplitudes within one layer, referenced to the
/// layer's left edge: u(x) = fw e^{ik(x-xl)} + bw e^{-ik(x-xl)}.
struct LayerWaveState {
  std::complex<double> forward;
  std::complex<double> backward;
  double wavenumber = 0.0;  // k_j = omega sqrt(rho_j D_j)
};

/// Pointwise periodic parts of the exact fields at one position.
struct FieldSample {
  std::complex<double> displacement;
  std::complex<double> stress;
  std::complex<double> velocity;
  std::complex<double> momentum;
  std::complex<double> strain;
};

/// One Bloch mode of the exact solution, with closed-form cell averages of
/// the periodic parts. Normalized to <u> = 1 when that average is resolvable.
class ModeShape {
 public:
  ModeShape(const UnitCell& cell, double q, double omega,
            std::vector<LayerWaveState> layers,
            std::complex<double> avg_displacement, std::complex<double> avg_stress,
            std::complex<double> avg_momentum, std::complex<double> avg_strain);

  double omega() const { return omega_; }
  double q() const { return q_; }
  const std::vector<LayerWaveState>& layers() const { return layers_; }

  std::complex<double> avg_displacement() const { return avg_displacement_; }
  std::complex<double> avg_stress() const { return avg_stress_; }
  std::complex<double> avg_momentum() const { return avg_momentum_; }
  std::complex<double> avg_strain() const { return avg_strain_; }
  /// <udot> = -i omega <u>.
  std::complex<double> avg_velocity() const;

  /// Periodic parts (full fields times e^{-iqx}) at x, wrapped into the cell.
  FieldSample sample_periodic(double x) const;

  /// Peak displacement amplitude, for normalization thresholds.
  double displacement_scale() const;
  /// Peak stress amplitude omega * z_j * (|fw| + |bw|) over the layers.
  double stress_scale() const;

 private:
  UnitCell cell_;  // owned copy; modes outlive the cell they were built from
  double q_;
  double omega_;
  std::vector<LayerWaveState> layers_;
  std::complex<double> avg_displacement_;
  std::complex<double> avg_stress_;
  std::complex<double> avg_momentum_;
  std::complex<double> avg_strain_;
};

/// Exact Bloch mode at an on-branch (q, omega); throws NotOnBranch when the
/// pair does not satisfy the dispersion relation to 1e-10.
ModeShape mode_shape(const UnitCell& cell, double q, double omega);

/// Field-integration homogenization from the exact mode:
///   D_eff = i q <u> / <sigma>,  rho_eff = <p> / (-i omega <u>).
std::pair<std::complex<double>, std::complex<double>> field_integration_homog(
    const ModeShape& mode);

}  // namespace dynhomog

#endif
