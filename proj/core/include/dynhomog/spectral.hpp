#ifndef DYNHOMOG_SPECTRAL_HPP
#define DYNHOMOG_SPECTRAL_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "dynhomog/cell.hpp"

namespace dynhomog {

inline constexpr double kDefaultEpsPole = 1e-8;

/// Truncated Fourier basis xi = +-2*pi*n/a for n = 1..n_max (xi = 0 excluded).
/// Internally everything is evaluated in cell-scaled variables, where the
/// wavenumbers are simply +-2*pi*n.
class SpectralBasis {
 public:
  explicit SpectralBasis(int n_max);

  int n_max() const { return n_max_; }
  /// Positive scaled wavenumber of pair n (0-based): 2*pi*(n+1).
  double xi_scaled(int n) const;

 private:
  int n_max_;
};

/// Subregion shape factor g_alpha(xi) = (1/l) * integral of e^{i xi x} over
/// the subregion = e^{i xi x_alpha} * sin(xi l/2) / (xi l/2). Returns 1 in the
/// xi -> 0 limit; |g| <= 1 always.
std::complex<double> g_alpha(const Subregion& s, double xi);

/// Helmholtz kernel A(xi) = nu^2 / (nu^2 - (xi+q)^2), real for real q.
/// Throws NearPole when the denominator is within eps_pole (relative) of zero.
double kernel_A(double xi, double omega, double q, const ReferenceMedium& ref,
                double eps_pole = kDefaultEpsPole);

/// B(xi) = (xi + q) * A(xi).
double kernel_B(double xi, double omega, double q, const ReferenceMedium& ref,
                double eps_pole = kDefaultEpsPole);

/// The linear system produced at one (omega, q): consistency matrices for the
/// eigenstress and eigenvelocity unknowns plus their coupling block, restricted
/// to the active subregions of each field. All entries are in cell-scaled
/// (dimensionless) variables; for real q the square blocks are Hermitian and
/// the full coupling matrix satisfies B[u][s] = conj(B[s][u]).
struct AssembledSystem {
  Eigen::MatrixXcd stress_matrix;    // active-stress x active-stress
  Eigen::MatrixXcd velocity_matrix;  // active-velocity x active-velocity
  Eigen::MatrixXcd coupling_matrix;  // active-stress x active-velocity
  Eigen::VectorXd fraction_stress;   // f restricted to active-stress rows
  Eigen::VectorXd fraction_velocity;
  std::vector<int> stress_index;  // active row -> subregion index
  std::vector<int> velocity_index;
  int subregion_count = 0;

  double omega = 0.0;  // raw
  double q = 0.0;      // raw
  double nu_hat = 0.0;  // omega * a / c0
  double q_hat = 0.0;   // q * a
  bool trivial = false;  // no active subregions at all

  std::size_t stress_size() const { return stress_index.size(); }
  std::size_t velocity_size() const { return velocity_index.size(); }
};

/// Relative Hermitian defect max_ij |M - M^H| / max_ij |M| (0 for empty).
double hermitian_defect(const Eigen::MatrixXcd& m);

/// Caches everything that is frequency-independent at a fixed wavenumber q
/// (shape factors, fractions, diagonal corrections) so that sweeps over omega
/// only reweight the kernel sums. Holds mutable scratch storage, so construct
/// one instance per thread.
class SpectralWorkspace {
 public:
  SpectralWorkspace(const DiscretizedCell& dcell, const SpectralBasis& basis,
                    double q);

  AssembledSystem assemble(double omega, double eps_pole = kDefaultEpsPole) const;
  /// Same, but reuses the matrix storage of `sys` (no allocation in steady
  /// state); the form frequency scans should use.
  void assemble_into(AssembledSystem& sys, double omega,
                     double eps_pole = kDefaultEpsPole) const;

  double q() const { return q_; }
  double q_hat() const { return q_hat_; }
  const DiscretizedCell& dcell() const { return *dcell_; }
  const SpectralBasis& basis() const { return basis_; }

 private:
  const DiscretizedCell* dcell_;
  SpectralBasis basis_;
  double q_;
  double q_hat_;
  double period_;
  double c0_;

  // Column n holds w_n[alpha] = f_alpha * g_alpha(+xi_n) (scaled variables).
  Eigen::MatrixXcd weighted_shape_;
  Eigen::VectorXd fractions_;
  // Diagonal corrections f_alpha / (D_alpha/D0 - 1), f_alpha / (rho_alpha/rho0 - 1)
  // for active subregions (zero placeholder for inactive ones).
  Eigen::VectorXd diag_stress_;
  Eigen::VectorXd diag_velocity_;
  std::vector<int> stress_index_;
  std::vector<int> velocity_index_;

  // Per-frequency scratch, sized once.
  mutable Eigen::VectorXd kernel_plus_, kernel_minus_;
  mutable Eigen::VectorXd kernel_b_plus_, kernel_b_minus_;
  mutable Eigen::MatrixXcd weighted_scratch_;  // alpha x n_xi
  mutable Eigen::MatrixXcd geom_scratch_;      // alpha x alpha
  mutable Eigen::MatrixXcd a_geom_, b_geom_;
};

/// One-shot assembly at (omega, q).
AssembledSystem assemble(const DiscretizedCell& dcell, const SpectralBasis& basis,
                         double omega, double q,
                         double eps_pole = kDefaultEpsPole);

}  // namespace dynhomog

#endif
