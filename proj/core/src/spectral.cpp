#include "dynhomog/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dynhomog {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sin(z)/z with the removable singularity filled in.
double sinc(double z) {
  if (std::abs(z) < 1e-8) return 1.0 - z * z / 6.0;
  return std::sin(z) / z;
}

// A(xi) in scaled variables; denominator guarded by the pole window.
double kernel_a_scaled(double xi_hat, double nu_hat, double q_hat,
                       double eps_pole, double omega, double q) {
  const double nu2 = nu_hat * nu_hat;
  const double k = xi_hat + q_hat;
  const double k2 = k * k;
  const double denom = nu2 - k2;
  if (std::abs(denom) <= eps_pole * std::max(nu2, k2)) {
    throw NearPole("kernel denominator nu^2 - (xi+q)^2 within pole window at xi_hat=" +
                       std::to_string(xi_hat),
                   omega, q);
  }
  return nu2 / denom;
}

}  // namespace

SpectralBasis::SpectralBasis(int n_max) : n_max_(n_max) {
  if (n_max < 1) throw Error("spectral basis needs n_max >= 1");
}

double SpectralBasis::xi_scaled(int n) const { return kTwoPi * (n + 1); }

std::complex<double> g_alpha(const Subregion& s, double xi) {
  const double half_phase = 0.5 * xi * s.length;
  const double magnitude = sinc(half_phase);
  const double phase = xi * s.center;
  return std::complex<double>(magnitude * std::cos(phase), magnitude * std::sin(phase));
}

double kernel_A(double xi, double omega, double q, const ReferenceMedium& ref,
                double eps_pole) {
  const double nu = ref.nu(omega);
  return kernel_a_scaled(xi, nu, q, eps_pole, omega, q);
}

double kernel_B(double xi, double omega, double q, const ReferenceMedium& ref,
                double eps_pole) {
  return (xi + q) * kernel_A(xi, omega, q, ref, eps_pole);
}

double hermitian_defect(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

SpectralWorkspace::SpectralWorkspace(const DiscretizedCell& dcell,
                                     const SpectralBasis& basis, double q)
    : dcell_(&dcell),
      basis_(basis),
      q_(q),
      period_(dcell.cell().period()),
      c0_(dcell.reference().wave_speed()) {
  q_hat_ = q * period_;

  const auto subregions = dcell.subregions();
  const Eigen::Index n_sub = static_cast<Eigen::Index>(subregions.size());
  const Eigen::Index n_xi = basis.n_max();

  weighted_shape_.resize(n_sub, n_xi);
  fractions_.resize(n_sub);
  diag_stress_ = Eigen::VectorXd::Zero(n_sub);
  diag_velocity_ = Eigen::VectorXd::Zero(n_sub);

  const ReferenceMedium& ref = dcell.reference();
  for (Eigen::Index alpha = 0; alpha < n_sub; ++alpha) {
    const Subregion& s = subregions[alpha];
    fractions_(alpha) = s.fraction;

    // Scaled copy of the subregion: positions in units of the period.
    Subregion scaled = s;
    scaled.center = s.center / period_;
    scaled.length = s.length / period_;
    for (Eigen::Index n = 0; n < n_xi; ++n) {
      weighted_shape_(alpha, n) = s.fraction * g_alpha(scaled, basis.xi_scaled(n));
    }

    if (s.active_stress) {
      stress_index_.push_back(static_cast<int>(alpha));
      diag_stress_(alpha) = s.fraction / (s.compliance / ref.compliance - 1.0);
    }
    if (s.active_velocity) {
      velocity_index_.push_back(static_cast<int>(alpha));
      diag_velocity_(alpha) = s.fraction / (s.density / ref.density - 1.0);
    }
  }
}

AssembledSystem SpectralWorkspace::assemble(double omega, double eps_pole) const {
  AssembledSystem sys;
  assemble_into(sys, omega, eps_pole);
  return sys;
}

void SpectralWorkspace::assemble_into(AssembledSystem& sys, double omega,
                                      double eps_pole) const {
  sys.omega = omega;
  sys.q = q_;
  sys.q_hat = q_hat_;
  sys.nu_hat = omega * period_ / c0_;
  sys.stress_index = stress_index_;
  sys.velocity_index = velocity_index_;
  sys.subregion_count = static_cast<int>(dcell_->size());

  if (stress_index_.empty() && velocity_index_.empty()) {
    sys.trivial = true;
    return;
  }
  sys.trivial = false;

  const Eigen::Index n_xi = basis_.n_max();
  kernel_plus_.resize(n_xi);
  kernel_minus_.resize(n_xi);
  kernel_b_plus_.resize(n_xi);
  kernel_b_minus_.resize(n_xi);
  for (Eigen::Index n = 0; n < n_xi; ++n) {
    const double xi = basis_.xi_scaled(n);
    const double ap = kernel_a_scaled(xi, sys.nu_hat, q_hat_, eps_pole, omega, q_);
    const double am = kernel_a_scaled(-xi, sys.nu_hat, q_hat_, eps_pole, omega, q_);
    kernel_plus_(n) = ap;
    kernel_minus_(n) = am;
    kernel_b_plus_(n) = (xi + q_hat_) * ap;
    kernel_b_minus_(n) = (-xi + q_hat_) * am;
  }

  // Geometric sums over the basis, grouped by sign so each half is an exactly
  // Hermitian combination of rank-1 terms w w^H:
  //   sum_{xi>0} A(xi) w w^H  +  conj( sum_{xi>0} A(-xi) w w^H ).
  const Eigen::MatrixXcd& g = weighted_shape_;
  weighted_scratch_.noalias() = g * kernel_plus_.asDiagonal();
  a_geom_.noalias() = weighted_scratch_ * g.adjoint();
  weighted_scratch_.noalias() = g * kernel_minus_.asDiagonal();
  geom_scratch_.noalias() = weighted_scratch_ * g.adjoint();
  a_geom_ += geom_scratch_.conjugate();

  weighted_scratch_.noalias() = g * kernel_b_plus_.asDiagonal();
  b_geom_.noalias() = weighted_scratch_ * g.adjoint();
  weighted_scratch_.noalias() = g * kernel_b_minus_.asDiagonal();
  geom_scratch_.noalias() = weighted_scratch_ * g.adjoint();
  b_geom_ += geom_scratch_.conjugate();

  const auto ns = static_cast<Eigen::Index>(stress_index_.size());
  const auto nv = static_cast<Eigen::Index>(velocity_index_.size());

  sys.stress_matrix.resize(ns, ns);
  sys.fraction_stress.resize(ns);
  for (Eigen::Index i = 0; i < ns; ++i) {
    const int si = stress_index_[i];
    sys.fraction_stress(i) = fractions_(si);
    for (Eigen::Index j = 0; j < ns; ++j) {
      sys.stress_matrix(i, j) = a_geom_(si, stress_index_[j]);
    }
    sys.stress_matrix(i, i) += diag_stress_(si);
  }

  sys.velocity_matrix.resize(nv, nv);
  sys.fraction_velocity.resize(nv);
  for (Eigen::Index i = 0; i < nv; ++i) {
    const int vi = velocity_index_[i];
    sys.fraction_velocity(i) = fractions_(vi);
    for (Eigen::Index j = 0; j < nv; ++j) {
      sys.velocity_matrix(i, j) = a_geom_(vi, velocity_index_[j]);
    }
    sys.velocity_matrix(i, i) += diag_velocity_(vi);
  }

  sys.coupling_matrix.resize(ns, nv);
  for (Eigen::Index i = 0; i < ns; ++i) {
    for (Eigen::Index j = 0; j < nv; ++j) {
      sys.coupling_matrix(i, j) = b_geom_(stress_index_[i], velocity_index_[j]);
    }
  }
}

AssembledSystem assemble(const DiscretizedCell& dcell, const SpectralBasis& basis,
                         double omega, double q, double eps_pole) {
  return SpectralWorkspace(dcell, basis, q).assemble(omega, eps_pole);
}

}  // namespace dynhomog
