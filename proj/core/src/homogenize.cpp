#include "dynhomog/homogenize.hpp"

#include <limits>
#include <string>

namespace dynhomog {

namespace {

using Complex = std::complex<double>;

Eigen::VectorXcd scatter(const Eigen::VectorXcd& packed,
                         const std::vector<int>& index, Eigen::Index size) {
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(size);
  for (Eigen::Index i = 0; i < packed.size(); ++i) full(index[i]) = packed(i);
  return full;
}

Eigen::Index full_size(const AssembledSystem& sys) {
  return static_cast<Eigen::Index>(sys.subregion_count);
}

EigenfieldSolution zero_solution(const AssembledSystem& sys, Eigen::Index size) {
  EigenfieldSolution sol;
  sol.phi = Eigen::VectorXcd::Zero(size);
  sol.psi = Eigen::VectorXcd::Zero(size);
  sol.theta = Eigen::VectorXcd::Zero(size);
  sol.gamma = Eigen::VectorXcd::Zero(size);
  sol.omega = sys.omega;
  sol.q = sys.q;
  return sol;
}

}  // namespace

Eigen::VectorXcd EigenfieldSolution::eigenstress(Complex avg_stress,
                                                 Complex avg_velocity,
                                                 const ReferenceMedium& ref) const {
  return phi * avg_stress + psi * (avg_velocity / ref.compliance);
}

Eigen::VectorXcd EigenfieldSolution::eigenvelocity(Complex avg_stress,
                                                   Complex avg_velocity,
                                                   const ReferenceMedium& ref) const {
  return theta * (avg_stress / ref.density) + gamma * avg_velocity;
}

const EigenfieldSolution& EigenfieldSolver::solve(const AssembledSystem& sys,
                                                  const ReferenceMedium& ref) {
  const Eigen::Index n_full = full_size(sys);
  sol_.omega = sys.omega;
  sol_.q = sys.q;
  sol_.phi = Eigen::VectorXcd::Zero(n_full);
  sol_.psi = Eigen::VectorXcd::Zero(n_full);
  sol_.theta = Eigen::VectorXcd::Zero(n_full);
  sol_.gamma = Eigen::VectorXcd::Zero(n_full);
  sol_.condition_estimate = 0.0;
  sol_.trivial = sys.trivial;
  if (sys.trivial) return sol_;

  const auto ns = static_cast<Eigen::Index>(sys.stress_size());
  const auto nv = static_cast<Eigen::Index>(sys.velocity_size());
  const Eigen::Index n = ns + nv;
  const double inv_nu = 1.0 / sys.nu_hat;

  block_.resize(n, n);
  block_.topLeftCorner(ns, ns) = -sys.stress_matrix;
  block_.bottomRightCorner(nv, nv) = -sys.velocity_matrix;
  block_.topRightCorner(ns, nv) = inv_nu * sys.coupling_matrix;
  block_.bottomLeftCorner(nv, ns) = inv_nu * sys.coupling_matrix.adjoint();

  rhs_.resize(n, 2);
  rhs_.setZero();
  rhs_.col(0).head(ns) = sys.fraction_stress.cast<Complex>();
  rhs_.col(1).tail(nv) = sys.fraction_velocity.cast<Complex>();

  lu_.compute(block_);
  // Condition proxy, cheap enough for frequency scans: collapsing pivots and
  // exploding response magnitudes are the two signatures of the
  // comparison-medium resonances this guard exists for. (A norm-based
  // estimate costs several extra triangular solves per call.)
  double pivot_max = 0.0;
  double pivot_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = std::abs(lu_.matrixLU()(i, i));
    pivot_max = std::max(pivot_max, p);
    pivot_min = std::min(pivot_min, p);
  }
  solution_ = lu_.solve(rhs_);
  const double response_bound =
      block_.cwiseAbs().rowwise().sum().maxCoeff() *
      solution_.cwiseAbs().maxCoeff() /
      std::max(rhs_.cwiseAbs().maxCoeff(), 1e-300);
  const double condition = std::max(pivot_max / pivot_min, response_bound);
  if (!(condition < kConditionCap)) {
    throw SingularSystem("eigenfield system condition estimate " +
                             std::to_string(condition) + " exceeds cap at omega=" +
                             std::to_string(sys.omega) + ", q=" + std::to_string(sys.q),
                         sys.omega, sys.q);
  }

  sol_.condition_estimate = condition;
  const double c0 = ref.wave_speed();
  // Column 0: unit average stress. Column 1: unit average velocity (scaled).
  // The velocity-block results and psi/theta are converted from cell-scaled
  // to raw 1/velocity semantics by 1/c0.
  for (Eigen::Index i = 0; i < ns; ++i) {
    sol_.phi(sys.stress_index[i]) = solution_(i, 0);
    sol_.psi(sys.stress_index[i]) = solution_(i, 1) / c0;
  }
  for (Eigen::Index i = 0; i < nv; ++i) {
    sol_.theta(sys.velocity_index[i]) = solution_(ns + i, 0) / c0;
    sol_.gamma(sys.velocity_index[i]) = solution_(ns + i, 1);
  }
  return sol_;
}

EigenfieldSolution solve_eigenfields(const AssembledSystem& sys,
                                     const ReferenceMedium& ref) {
  EigenfieldSolver solver;
  return solver.solve(sys, ref);
}

EigenfieldSolution solve_eigenfields_closed_form(const AssembledSystem& sys,
                                                 const ReferenceMedium& ref) {
  const Eigen::Index n_full = full_size(sys);
  if (sys.trivial) {
    EigenfieldSolution sol = zero_solution(sys, n_full);
    sol.trivial = true;
    return sol;
  }
  if (sys.stress_index != sys.velocity_index) {
    throw Error("closed-form eigenfield solve requires matching active sets");
  }

  const double nu2 = sys.nu_hat * sys.nu_hat;
  const Eigen::MatrixXcd& a_d = sys.stress_matrix;
  const Eigen::MatrixXcd& a_rho = sys.velocity_matrix;
  const Eigen::MatrixXcd& b = sys.coupling_matrix;
  const Eigen::VectorXcd f = sys.fraction_stress.cast<Complex>();

  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu_rho(a_rho);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu_d(a_d);

  const Eigen::MatrixXcd schur_d = -a_d + (b * lu_rho.solve(b)) / nu2;
  const Eigen::MatrixXcd schur_rho = -a_rho + (b * lu_d.solve(b)) / nu2;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu_schur_d(schur_d);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu_schur_rho(schur_rho);

  const double c0 = ref.wave_speed();
  const double inv_nu = 1.0 / sys.nu_hat;

  EigenfieldSolution sol = zero_solution(sys, n_full);
  sol.phi = scatter(lu_schur_d.solve(f), sys.stress_index, n_full);
  sol.psi = scatter(inv_nu * lu_schur_d.solve(b * lu_rho.solve(f)),
                    sys.stress_index, n_full) / c0;
  sol.theta = scatter(inv_nu * lu_schur_rho.solve(b * lu_d.solve(f)),
                      sys.velocity_index, n_full) / c0;
  sol.gamma = scatter(lu_schur_rho.solve(f), sys.velocity_index, n_full);
  return sol;
}

EffectiveParams effective_params(const EigenfieldSolution& sol,
                                 const AssembledSystem& sys,
                                 const ReferenceMedium& ref) {
  EffectiveParams params;
  params.omega = sys.omega;
  params.q = sys.q;
  if (sol.trivial) {
    params.compliance = ref.compliance;
    params.density = ref.density;
    params.coupling_s1 = 0.0;
    params.coupling_s2 = 0.0;
    return params;
  }

  Complex f_phi = 0.0, f_psi = 0.0, f_theta = 0.0, f_gamma = 0.0;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(sys.stress_size()); ++i) {
    const int alpha = sys.stress_index[i];
    f_phi += sys.fraction_stress(i) * sol.phi(alpha);
    f_psi += sys.fraction_stress(i) * sol.psi(alpha);
  }
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(sys.velocity_size()); ++i) {
    const int alpha = sys.velocity_index[i];
    f_theta += sys.fraction_velocity(i) * sol.theta(alpha);
    f_gamma += sys.fraction_velocity(i) * sol.gamma(alpha);
  }

  params.compliance = ref.compliance * (1.0 - f_phi);
  params.coupling_s1 = -f_psi;
  params.coupling_s2 = -f_theta;
  params.density = ref.density * (1.0 - f_gamma);
  return params;
}

AveragedFields apply_constitutive(const EffectiveParams& params,
                                  Complex avg_stress, Complex avg_velocity) {
  AveragedFields out;
  out.avg_stress = avg_stress;
  out.avg_velocity = avg_velocity;
  out.avg_strain = params.compliance * avg_stress + params.coupling_s1 * avg_velocity;
  out.avg_momentum = params.coupling_s2 * avg_stress + params.density * avg_velocity;
  // Expanded quadratic form: real-valued exactly when the parameter structure
  // (real compliance/density, conjugate couplings) holds.
  out.energy = 0.5 * (params.compliance * avg_stress * std::conj(avg_stress) +
                      params.density * avg_velocity * std::conj(avg_velocity) +
                      params.coupling_s2 * avg_stress * std::conj(avg_velocity) +
                      params.coupling_s1 * std::conj(avg_stress) * avg_velocity);
  return out;
}

}  // namespace dynhomog
