#ifndef DYNHOMOG_TESTS_SPECTRAL_ORACLE_HPP
#define DYNHOMOG_TESTS_SPECTRAL_ORACLE_HPP

// Test-only brute-force route to the assembled matrices: shape factors by
// Simpson quadrature, kernels by direct substitution, sums accumulated term
// by term from the definitions. Deliberately independent of the library's
// assembly path.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "dynhomog/cell.hpp"

namespace dynhomog::testing {

using Complex = std::complex<double>;

// (1/l) * integral of e^{i xi x} over the subregion, by composite Simpson.
inline Complex g_quadrature(double center, double length, double xi) {
  const int n = 2000;  // even
  const double h = length / n;
  Complex sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double x = center - 0.5 * length + k * h;
    const double weight = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    sum += weight * std::exp(Complex(0.0, xi * x));
  }
  return sum * (h / 3.0) / length;
}

struct BruteForceMatrices {
  std::vector<std::vector<Complex>> stress;    // [A_D]
  std::vector<std::vector<Complex>> velocity;  // [A_rho]
  std::vector<std::vector<Complex>> coupling;  // B-bar, scaled by the period
};

// All subregions assumed active. Entries match AssembledSystem's scaled form.
inline BruteForceMatrices brute_force_assemble(const DiscretizedCell& dcell,
                                               int n_max, double omega, double q) {
  const double a = dcell.cell().period();
  const ReferenceMedium& ref = dcell.reference();
  const double nu = omega * std::sqrt(ref.density * ref.compliance);
  const auto subs = dcell.subregions();
  const std::size_t n = subs.size();

  BruteForceMatrices out;
  out.stress.assign(n, std::vector<Complex>(n, 0.0));
  out.velocity.assign(n, std::vector<Complex>(n, 0.0));
  out.coupling.assign(n, std::vector<Complex>(n, 0.0));

  for (int m = 1; m <= n_max; ++m) {
    for (double sign : {1.0, -1.0}) {
      const double xi = sign * 2.0 * std::numbers::pi * m / a;
      const double denom = nu * nu - (xi + q) * (xi + q);
      const double kernel_a = nu * nu / denom;
      const double kernel_b_scaled = (xi + q) * a * kernel_a;
      for (std::size_t alpha = 0; alpha < n; ++alpha) {
        const Complex ga = g_quadrature(subs[alpha].center, subs[alpha].length, xi);
        for (std::size_t beta = 0; beta < n; ++beta) {
          const Complex gb =
              g_quadrature(subs[beta].center, subs[beta].length, -xi);
          const Complex geom =
              subs[alpha].fraction * ga * subs[beta].fraction * gb;
          out.stress[alpha][beta] += geom * kernel_a;
          out.velocity[alpha][beta] += geom * kernel_a;
          out.coupling[alpha][beta] += geom * kernel_b_scaled;
        }
      }
    }
  }
  for (std::size_t alpha = 0; alpha < n; ++alpha) {
    out.stress[alpha][alpha] += subs[alpha].fraction * ref.compliance /
                                (subs[alpha].compliance - ref.compliance);
    out.velocity[alpha][alpha] +=
        subs[alpha].fraction * ref.density / (subs[alpha].density - ref.density);
  }
  return out;
}

}  // namespace dynhomog::testing

#endif
