#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dynhomog/dispersion.hpp"
#include "dynhomog/fields.hpp"
#include "dynhomog/transfer_matrix.hpp"
#include "fixtures.hpp"
#include "spectral_oracle.hpp"

using namespace dynhomog;
using Complex = std::complex<double>;

namespace {
constexpr double kPi = std::numbers::pi;

struct OnBranchState {
  DiscretizedCell dcell;
  SpectralBasis basis;
  EigenfieldSolution sol;
  ModeShape mode;
  FieldProfile profile;
};

// Micromechanical reconstruction at the exact mode's averages, on the
// bilayer branch `branch` at wavenumber q.
OnBranchState bilayer_on_branch(int per_layer, int n_max, double q, int branch,
                                int grid_per_subregion = 16) {
  const UnitCell cell = dynhomog::testing::test_bilayer();
  DiscretizedCell dcell = discretize(cell, std::vector<int>{per_layer, per_layer},
                                     reference_from_average(cell));
  SpectralBasis basis(n_max);
  ScanParams scan;
  scan.omega_max = 16.0;
  const std::vector<BranchPoint> points =
      find_branches(dcell, basis, q, branch, scan);
  const double omega = points[branch - 1].omega;

  const std::vector<double> exact = exact_dispersion(cell, q, branch);
  ModeShape mode = mode_shape(cell, q, exact[branch - 1]);

  const AssembledSystem sys = assemble(dcell, basis, omega, q);
  EigenfieldSolution sol = solve_eigenfields(sys, dcell.reference());
  FieldProfile profile =
      reconstruct(sol, dcell, basis, mode.avg_stress(), mode.avg_velocity(),
                  default_grid(dcell, grid_per_subregion));
  return OnBranchState{std::move(dcell), basis, std::move(sol), std::move(mode),
                       std::move(profile)};
}

double rms_mismatch(const std::vector<Complex>& got,
                    const std::vector<Complex>& want) {
  double err = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    err += std::norm(got[i] - want[i]);
    norm += std::norm(want[i]);
  }
  return std::sqrt(err / norm);
}
}  // namespace

TEST_CASE("reconstruction of a cell identical to the reference is flat") {
  const UnitCell cell = build_cell({{2.0, 0.5, 1.0}});
  const DiscretizedCell dcell = discretize(cell, {3}, reference_from_average(cell));
  const SpectralBasis basis(4);
  const double q = 0.7;
  const AssembledSystem sys = assemble(dcell, basis, q, q);  // c0 = 1: on-branch
  const EigenfieldSolution sol = solve_eigenfields(sys, dcell.reference());
  const Complex sigma(1.3, -0.4);
  const Complex udot = sigma / std::sqrt(2.0 * 0.5) / 2.0 * 1.0;  // any value

  const FieldProfile profile =
      reconstruct(sol, dcell, basis, sigma, udot, default_grid(dcell));
  for (std::size_t i = 0; i < profile.x.size(); ++i) {
    CHECK(std::abs(profile.stress[i] - sigma) < 1e-13);
    CHECK(std::abs(profile.velocity[i] - udot) < 1e-13);
  }
}

TEST_CASE("subregion averages of the reconstruction match the matrix route") {
  const UnitCell cell = dynhomog::testing::test_bilayer();
  const DiscretizedCell dcell =
      discretize(cell, {3, 3}, reference_from_average(cell));
  const int n_max = 6;
  const SpectralBasis basis(n_max);
  const double omega = 1.1, q = 1.3;
  const AssembledSystem sys = assemble(dcell, basis, omega, q);
  const ReferenceMedium& ref = dcell.reference();
  const EigenfieldSolution sol = solve_eigenfields(sys, ref);

  const Complex sigma(0.8, 0.1);
  const Complex udot(-0.2, 0.5);

  // Simpson grid: 65 endpoint-inclusive samples per subregion. The
  // reconstructed periodic parts are trigonometric polynomials, so the
  // quadrature converges fast regardless of material interfaces.
  const int samples = 64;  // even
  std::vector<double> grid;
  for (const Subregion& s : dcell.subregions()) {
    const double left = s.center - 0.5 * s.length;
    for (int k = 0; k <= samples; ++k) {
      grid.push_back(left + k * s.length / samples);
    }
  }
  const FieldProfile profile = reconstruct(sol, dcell, basis, sigma, udot, grid);

  // Route 1: Simpson quadrature of the sampled periodic perturbation over
  // each subregion.
  // Route 2: the averaged-field matrices applied to the eigenfields, built
  // independently by the brute-force oracle.
  const auto brute = dynhomog::testing::brute_force_assemble(dcell, n_max, omega, q);
  const Eigen::VectorXcd eigenstress = sol.eigenstress(sigma, udot, ref);
  const Eigen::VectorXcd eigenvelocity = sol.eigenvelocity(sigma, udot, ref);

  const double c0 = ref.wave_speed();
  const double a = cell.period();
  const double nu_hat = omega * a / c0;
  const auto subs = dcell.subregions();
  for (std::size_t alpha = 0; alpha < subs.size(); ++alpha) {
    Complex quad = 0.0;
    for (int k = 0; k <= samples; ++k) {
      const double w = (k == 0 || k == samples) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      quad += w * (profile.stress[alpha * (samples + 1) + k] - sigma);
    }
    quad /= 3.0 * samples;

    // brute matrices carry f_alpha on the row; divide it out to get the
    // subregion-average form. The coupling is stored scaled by the period,
    // and the scaled system uses (1/nu_hat) as the velocity weight with
    // z0-normalized velocities.
    Complex matrix_route = 0.0;
    for (std::size_t beta = 0; beta < subs.size(); ++beta) {
      const Complex a_tilde = brute.stress[alpha][beta] -
                              ((alpha == beta)
                                   ? subs[alpha].fraction * ref.compliance /
                                         (subs[alpha].compliance - ref.compliance)
                                   : Complex(0.0));
      const Complex b_tilde = brute.coupling[alpha][beta];
      matrix_route += (a_tilde * eigenstress(beta) -
                       b_tilde / nu_hat * (eigenvelocity(beta) *
                                           ref.impedance())) /
                      subs[alpha].fraction;
    }
    CHECK(std::abs(quad - matrix_route) < 1e-6 * std::abs(sigma));
  }
}

TEST_CASE("periodic parts average to zero over the cell") {
  const UnitCell cell = dynhomog::testing::test_bilayer();
  const DiscretizedCell dcell =
      discretize(cell, {5, 5}, reference_from_average(cell));
  const SpectralBasis basis(8);
  const AssembledSystem sys = assemble(dcell, basis, 1.7, 1.1);
  const EigenfieldSolution sol = solve_eigenfields(sys, dcell.reference());
  const Complex sigma(1.0, 0.3);
  const Complex udot(0.4, -0.2);
  const FieldProfile profile = reconstruct(sol, dcell, basis, sigma, udot,
                                           uniform_grid(cell, 256));

  Complex mean_stress = 0.0, mean_velocity = 0.0;
  double norm_stress = 0.0, norm_velocity = 0.0;
  for (std::size_t i = 0; i < profile.x.size(); ++i) {
    mean_stress += profile.stress[i] - sigma;
    mean_velocity += profile.velocity[i] - udot;
    norm_stress += std::abs(profile.stress[i]);
    norm_velocity += std::abs(profile.velocity[i]);
  }
  mean_stress /= 256.0;
  mean_velocity /= 256.0;
  norm_stress /= 256.0;
  norm_velocity /= 256.0;
  CHECK(std::abs(mean_stress) < 1e-10 * norm_stress);
  CHECK(std::abs(mean_velocity) < 1e-10 * norm_velocity);
}

TEST_CASE("on-branch reconstruction matches the exact mode shape") {
  const double q = 0.5 * kPi;
  const OnBranchState coarse = bilayer_on_branch(5, 15, q, 1);
  const OnBranchState fine = bilayer_on_branch(15, 15, q, 1);

  auto mode_samples = [](const OnBranchState& s) {
    std::vector<Complex> stress, velocity;
    for (double x : s.profile.x) {
      const FieldSample sample = s.mode.sample_periodic(x);
      stress.push_back(sample.stress);
      velocity.push_back(sample.velocity);
    }
    return std::pair(stress, velocity);
  };

  const auto [exact_stress_f, exact_velocity_f] = mode_samples(fine);
  const double stress_rms_fine = rms_mismatch(fine.profile.stress, exact_stress_f);
  const double velocity_rms_fine =
      rms_mismatch(fine.profile.velocity, exact_velocity_f);
  CHECK(stress_rms_fine < 0.03);
  CHECK(velocity_rms_fine < 0.03);

  const auto [exact_stress_c, exact_velocity_c] = mode_samples(coarse);
  CHECK(stress_rms_fine < rms_mismatch(coarse.profile.stress, exact_stress_c));
  CHECK(velocity_rms_fine <
        rms_mismatch(coarse.profile.velocity, exact_velocity_c));
}

TEST_CASE("balance-law residuals vanish for exact plane waves") {
  const UnitCell cell = build_cell({{2.0, 0.5, 1.0}});  // c0 = 1
  const DiscretizedCell dcell = discretize(cell, {3}, reference_from_average(cell));
  const SpectralBasis basis(4);
  const double q = 0.9;
  const double omega = q;  // on-branch
  const AssembledSystem sys = assemble(dcell, basis, omega, q);
  const EigenfieldSolution sol = solve_eigenfields(sys, dcell.reference());

  // mode-consistent averages: p = rho <udot>, q sigma = -omega p
  const Complex udot(1.0, 0.0);
  const Complex sigma = -omega * 2.0 * udot / q;
  const FieldProfile profile =
      reconstruct(sol, dcell, basis, sigma, udot, uniform_grid(cell, 128));
  const LocalResiduals res = local_residuals(profile, dcell, omega, q);
  CHECK(res.momentum < 1e-10);
  CHECK(res.kinematic < 1e-10);
}

TEST_CASE("on-branch residuals shrink under refinement") {
  const double q = 0.5 * kPi;
  auto residual_at = [&](int per_layer, int n_max) {
    OnBranchState s = bilayer_on_branch(per_layer, n_max, q, 1);
    const FieldProfile uniform_profile =
        reconstruct(s.sol, s.dcell, s.basis, s.mode.avg_stress(),
                    s.mode.avg_velocity(), uniform_grid(s.dcell.cell(), 512));
    return local_residuals(uniform_profile, s.dcell, s.profile.omega,
                           s.profile.q);
  };
  const LocalResiduals coarse = residual_at(2, 4);
  const LocalResiduals medium = residual_at(5, 8);
  const LocalResiduals fine = residual_at(15, 15);
  CHECK(medium.momentum < coarse.momentum);
  CHECK(fine.momentum < medium.momentum);
  CHECK(fine.kinematic < medium.kinematic);
}

TEST_CASE("off-branch states still satisfy the resolved fluctuation balance") {
  const UnitCell cell = dynhomog::testing::test_bilayer();
  auto fluctuation = [&](int per_layer, int n_max) {
    const DiscretizedCell dcell =
        discretize(cell, std::vector<int>{per_layer, per_layer},
                   reference_from_average(cell));
    const SpectralBasis basis(n_max);
    const double omega = 1.9, q = 1.2;  // arbitrary off-branch pair
    const AssembledSystem sys = assemble(dcell, basis, omega, q);
    const EigenfieldSolution sol = solve_eigenfields(sys, dcell.reference());
    const FieldProfile profile = reconstruct(sol, dcell, basis, Complex(1.0, 0.2),
                                             Complex(-0.3, 0.7),
                                             uniform_grid(cell, 512));
    return local_residuals(profile, dcell, omega, q);
  };
  const LocalResiduals coarse = fluctuation(2, 4);
  const LocalResiduals fine = fluctuation(12, 14);
  CHECK(fine.momentum_fluctuation < coarse.momentum_fluctuation);
  CHECK(fine.momentum_fluctuation < 0.1);
}

TEST_CASE("pointwise consistency defect shrinks under refinement") {
  // D(x) sigma(x) - D0 (sigma(x) - eigenstress(x)), RMS over the cell.
  const UnitCell cell = dynhomog::testing::test_bilayer();
  auto defect = [&](int per_layer, int n_max) {
    const DiscretizedCell dcell =
        discretize(cell, std::vector<int>{per_layer, per_layer},
                   reference_from_average(cell));
    const SpectralBasis basis(n_max);
    const double omega = 1.3, q = 0.9;
    const AssembledSystem sys = assemble(dcell, basis, omega, q);
    const ReferenceMedium& ref = dcell.reference();
    const EigenfieldSolution sol = solve_eigenfields(sys, ref);
    const Complex sigma(1.0, 0.0);
    const Complex udot(0.2, -0.4);
    const FieldProfile profile =
        reconstruct(sol, dcell, basis, sigma, udot, default_grid(dcell, 8));
    const Eigen::VectorXcd eigenstress = sol.eigenstress(sigma, udot, ref);

    double err = 0.0, norm = 0.0;
    const auto subs = dcell.subregions();
    for (std::size_t alpha = 0; alpha < subs.size(); ++alpha) {
      for (int k = 0; k < 8; ++k) {
        const std::size_t i = alpha * 8 + k;
        const Complex lhs = subs[alpha].compliance * profile.stress[i];
        const Complex rhs =
            ref.compliance * (profile.stress[i] - eigenstress(alpha));
        err += std::norm(lhs - rhs);
        norm += std::norm(lhs);
      }
    }
    return std::sqrt(err / norm);
  };
  const double coarse = defect(2, 4);
  const double fine = defect(12, 14);
  CHECK(fine < coarse);
}
