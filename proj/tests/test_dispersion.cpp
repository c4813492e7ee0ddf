#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dynhomog/dispersion.hpp"
#include "dynhomog/transfer_matrix.hpp"
#include "fixtures.hpp"

using namespace dynhomog;
using Complex = std::complex<double>;

namespace {
constexpr double kPi = std::numbers::pi;

DiscretizedCell bilayer_dcell(int per_layer) {
  const UnitCell cell = dynhomog::testing::test_bilayer();
  return discretize(cell, std::vector<int>{per_layer, per_layer},
                    reference_from_average(cell));
}
}  // namespace

TEST_CASE("homogeneous residual vanishes exactly on the acoustic line") {
  const UnitCell cell = build_cell({{2.0, 0.5, 1.0}});  // c0 = 1
  const DiscretizedCell dcell = discretize(cell, {3}, reference_from_average(cell));
  const SpectralBasis basis(4);
  const double q = 0.8;
  // R = v^2 - 1 in scaled variables for the material-equals-reference cell.
  CHECK(residual(dcell, basis, 2.0 * q, q) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(residual(dcell, basis, q * (1.0 + 1e-13), q)) < 1e-10);
}

TEST_CASE("residual sign change brackets the exact first branch") {
  const DiscretizedCell dcell = bilayer_dcell(15);
  const SpectralBasis basis(15);
  const double q = 0.5 * kPi;
  const double omega_exact = exact_dispersion(dcell.cell(), q, 1)[0];
  const double lo = residual(dcell, basis, 0.98 * omega_exact, q);
  const double hi = residual(dcell, basis, 1.02 * omega_exact, q);
  CHECK(std::signbit(lo) != std::signbit(hi));
}

TEST_CASE("find_branches on a homogeneous cell recovers the acoustic branch") {
  const UnitCell cell = build_cell({{2.0, 0.5, 1.0}});
  const DiscretizedCell dcell = discretize(cell, {2}, reference_from_average(cell));
  const SpectralBasis basis(4);
  const double q = 0.6 * kPi;
  ScanParams scan;
  scan.omega_max = 4.0;
  const std::vector<BranchPoint> points = find_branches(dcell, basis, q, 1, scan);
  REQUIRE(points.size() == 1);
  CHECK(points[0].omega == doctest::Approx(q).epsilon(1e-8));
  CHECK(points[0].branch == 1);
  CHECK(points[0].residual <= scan.tol_root);
}

TEST_CASE("insufficient roots are reported with the found count") {
  const UnitCell cell = build_cell({{2.0, 0.5, 1.0}});
  const DiscretizedCell dcell = discretize(cell, {2}, reference_from_average(cell));
  ScanParams scan;
  scan.omega_max = 4.0;
  try {
    find_branches(dcell, SpectralBasis(4), 0.6 * kPi, 3, scan);
    FAIL("expected InsufficientRoots");
  } catch (const InsufficientRoots& e) {
    CHECK(e.found == 1);
    CHECK(e.requested == 3);
  }
}

TEST_CASE("first three bilayer branches track the exact solution within 2%") {
  const DiscretizedCell dcell = bilayer_dcell(15);
  const SpectralBasis basis(15);
  ScanParams scan;
  scan.omega_max = 13.5;

  for (double frac : {0.25, 0.5, 0.75, 1.0}) {
    const double q = frac * kPi;
    const std::vector<BranchPoint> points = find_branches(dcell, basis, q, 3, scan);
    const std::vector<double> exact = exact_dispersion(dcell.cell(), q, 3);
    for (int b = 0; b < 3; ++b) {
      CHECK(std::abs(points[b].omega - exact[b]) / exact[b] < 0.02);
      CHECK(points[b].residual <= scan.tol_root);
    }
  }
}

TEST_CASE("no roots are reported inside the first stop band") {
  const DiscretizedCell dcell = bilayer_dcell(15);
  const SpectralBasis basis(15);
  const auto gaps = gap_intervals(dcell.cell(), 6.0);
  REQUIRE(!gaps.empty());
  const auto [gap_lo, gap_hi] = gaps[0];

  // Scan the gap interior: branch 1 tops out at the lower edge and branch 2
  // starts at the upper edge, so capping just short of the upper edge (by the
  // dispersion accuracy margin) must leave exactly the one root below the gap.
  ScanParams scan;
  scan.omega_max = gap_lo + 0.96 * (gap_hi - gap_lo);
  const std::vector<BranchPoint> points = scan_roots(dcell, basis, kPi, scan);
  REQUIRE(points.size() == 1);
  CHECK(points[0].omega < gap_lo * 1.02);
}

TEST_CASE("on-branch product identity and real symmetric parameters") {
  const DiscretizedCell dcell = bilayer_dcell(15);
  const SpectralBasis basis(15);
  ScanParams scan;
  scan.omega_max = 8.0;
  const std::vector<BranchPoint> points =
      find_branches(dcell, basis, 0.5 * kPi, 2, scan);
  for (const BranchPoint& p : points) {
    const Complex product =
        p.d_eff * p.rho_eff * p.phase_velocity * p.phase_velocity;
    CHECK(std::abs(product - 1.0) < 1e-8);
    // the bilayer is mirror-symmetric about the midpoint of either layer
    CHECK(std::abs(p.d_eff.imag()) < 1e-9 * std::abs(p.d_eff));
    CHECK(std::abs(p.rho_eff.imag()) < 1e-9 * std::abs(p.rho_eff));
    CHECK(p.params.compliance.real() > 0.0);
    CHECK(p.params.density.real() > 0.0);
  }
}

TEST_CASE("asymmetric cells give complex on-branch parameters") {
  const UnitCell cell = dynhomog::testing::asymmetric_cell();
  const DiscretizedCell dcell =
      discretize(cell, {1, 15, 10, 15, 1}, reference_from_layer(cell, 0));
  const SpectralBasis basis(10);
  ScanParams scan;
  scan.omega_max = 4.0 * dcell.reference().wave_speed();
  const std::vector<BranchPoint> points =
      find_branches(dcell, basis, 0.6 * kPi, 1, scan);
  CHECK(std::abs(points[0].d_eff.imag()) > 1e-4 * std::abs(points[0].d_eff));
  CHECK(std::abs(points[0].rho_eff.imag()) > 1e-4 * std::abs(points[0].rho_eff));
}

TEST_CASE("quasi-static limit recovers the volume averages") {
  SUBCASE("strong-contrast bilayer") {
    const DiscretizedCell dcell = bilayer_dcell(15);
    const QuasiStaticLimit limit = quasi_static_limit(dcell, SpectralBasis(15));
    CHECK(limit.compliance.real() == doctest::Approx(0.53125).epsilon(2e-4));
    CHECK(limit.density.real() == doctest::Approx(2.5).epsilon(2e-4));
  }
  SUBCASE("three equal thirds") {
    const UnitCell cell =
        build_cell({{1, 1, 1.0 / 3}, {2, 2, 1.0 / 3}, {3, 3, 1.0 / 3}});
    const DiscretizedCell dcell =
        discretize(cell, {8, 8, 8}, reference_from_average(cell));
    const QuasiStaticLimit limit = quasi_static_limit(dcell, SpectralBasis(10));
    CHECK(limit.compliance.real() == doctest::Approx(2.0).epsilon(2e-4));
    CHECK(limit.density.real() == doctest::Approx(2.0).epsilon(2e-4));
    // cross-check against the exact small-omega slope 1/sqrt(D_qs rho_qs)
    const double q_small = 0.01;
    const double slope = exact_dispersion(cell, q_small, 1)[0] / q_small;
    CHECK(slope == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(1.0 / std::sqrt(limit.compliance.real() * limit.density.real()) ==
          doctest::Approx(slope).epsilon(1e-3));
  }
  SUBCASE("homogeneous cell") {
    const UnitCell cell = build_cell({{2.0, 0.5, 1.0}});
    const DiscretizedCell dcell =
        discretize(cell, {2}, reference_from_average(cell));
    const QuasiStaticLimit limit = quasi_static_limit(dcell, SpectralBasis(4));
    CHECK(limit.compliance.real() == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(limit.density.real() == doctest::Approx(2.0).epsilon(1e-10));
  }
}

TEST_CASE("oracle error decreases under refinement at the zone midpoint") {
  const SpectralBasis basis(15);
  const double q = 0.5 * kPi;
  const std::vector<double> exact =
      exact_dispersion(dynhomog::testing::test_bilayer(), q, 3);
  ScanParams scan;
  scan.omega_max = 16.0;

  auto max_error = [&](int per_layer) {
    const DiscretizedCell dcell = bilayer_dcell(per_layer);
    const std::vector<BranchPoint> points = find_branches(dcell, basis, q, 3, scan);
    double worst = 0.0;
    for (int b = 0; b < 3; ++b) {
      worst = std::max(worst, std::abs(points[b].omega - exact[b]) / exact[b]);
    }
    return worst;
  };

  const double err1 = max_error(1);
  const double err5 = max_error(5);
  const double err15 = max_error(15);
  CHECK(err5 < err1);
  CHECK(err15 < err5);
  CHECK(err15 < 0.02);
}

TEST_CASE("branch grouping preserves order and flags monotonicity") {
  const DiscretizedCell dcell = bilayer_dcell(10);
  const SpectralBasis basis(10);
  ScanParams scan;
  scan.omega_max = 8.0;
  std::vector<std::vector<BranchPoint>> per_q;
  std::vector<double> qs = {0.3 * kPi, 0.5 * kPi, 0.7 * kPi, 0.9 * kPi};
  for (double q : qs) per_q.push_back(find_branches(dcell, basis, q, 2, scan));

  const std::vector<DispersionBranch> branches = group_branches(per_q);
  REQUIRE(branches.size() == 2);
  CHECK(branches[0].branch == 1);
  CHECK(branches[0].points.size() == 4);
  // acoustic branch rises with q, the optical branch falls toward the zone
  // boundary; both are monotone
  CHECK(branches[0].monotone);
  CHECK(branches[0].points.front().omega < branches[0].points.back().omega);
  CHECK(branches[1].monotone);
  CHECK(branches[1].points.front().omega > branches[1].points.back().omega);
}

TEST_CASE("degenerate on-branch denominators are reported") {
  EffectiveParams params;
  params.compliance = 1.0;
  params.density = 1.0;
  params.coupling_s1 = Complex(-1.0, 0.0);  // 1 + v S1 = 0 at v = 1
  params.coupling_s2 = Complex(-1.0, 0.0);
  CHECK_THROWS_AS(effective_on_branch(params, 1.0, 1.0), DegenerateDenominator);
}
