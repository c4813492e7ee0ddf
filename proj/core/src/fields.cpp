#include "dynhomog/fields.hpp"

#include <cmath>

namespace dynhomog {

namespace {

using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};

double rms(std::span<const Complex> values) {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (const Complex& v : values) acc += std::norm(v);
  return std::sqrt(acc / values.size());
}

}  // namespace

std::vector<double> default_grid(const DiscretizedCell& dcell, int per_subregion) {
  std::vector<double> grid;
  grid.reserve(dcell.size() * per_subregion);
  for (const Subregion& s : dcell.subregions()) {
    const double left = s.center - 0.5 * s.length;
    const double dx = s.length / per_subregion;
    for (int k = 0; k < per_subregion; ++k) grid.push_back(left + (k + 0.5) * dx);
  }
  return grid;
}

std::vector<double> uniform_grid(const UnitCell& cell, int n) {
  std::vector<double> grid(n);
  const double a = cell.period();
  for (int k = 0; k < n; ++k) grid[k] = -0.5 * a + (k + 0.5) * a / n;
  return grid;
}

FieldProfile reconstruct(const EigenfieldSolution& sol, const DiscretizedCell& dcell,
                         const SpectralBasis& basis, Complex avg_stress,
                         Complex avg_velocity, std::span<const double> grid) {
  const ReferenceMedium& ref = dcell.reference();
  const double a = dcell.cell().period();
  const double c0 = ref.wave_speed();
  const double stress_unit = ref.density * c0 * c0;  // 1/D0
  const double nu_hat = sol.omega * a / c0;
  const double q_hat = sol.q * a;

  // Everything below runs in cell-scaled variables.
  const Complex sigma_avg_s = avg_stress / stress_unit;
  const Complex velocity_avg_s = avg_velocity / c0;
  const Eigen::VectorXcd eigenstress_s =
      sol.phi * sigma_avg_s + (sol.psi * c0) * velocity_avg_s;
  const Eigen::VectorXcd eigenvelocity_s =
      (sol.theta * c0) * sigma_avg_s + sol.gamma * velocity_avg_s;

  FieldProfile profile;
  profile.avg_stress = avg_stress;
  profile.avg_velocity = avg_velocity;
  profile.omega = sol.omega;
  profile.q = sol.q;
  profile.period = a;
  profile.stress_unit = stress_unit;
  profile.velocity_unit = c0;

  const auto subregions = dcell.subregions();
  for (int n = 0; n < basis.n_max(); ++n) {
    for (double sign : {1.0, -1.0}) {
      const double xi = sign * basis.xi_scaled(n);
      // Discrete transform of the piecewise-constant eigenfields:
      //   F(xi) = sum_beta f_beta g_beta(-xi) F_beta.
      Complex stress_coeff = 0.0;
      Complex velocity_coeff = 0.0;
      for (std::size_t beta = 0; beta < subregions.size(); ++beta) {
        Subregion scaled = subregions[beta];
        scaled.center /= a;
        scaled.length /= a;
        const Complex weight = scaled.fraction * g_alpha(scaled, -xi);
        stress_coeff += weight * eigenstress_s(beta);
        velocity_coeff += weight * eigenvelocity_s(beta);
      }
      const double kernel_a = nu_hat * nu_hat /
                              (nu_hat * nu_hat - (xi + q_hat) * (xi + q_hat));
      const double kernel_b = (xi + q_hat) * kernel_a;
      profile.xi_scaled.push_back(xi);
      profile.coef_stress.push_back(kernel_a * stress_coeff -
                                    kernel_b / nu_hat * velocity_coeff);
      profile.coef_velocity.push_back(kernel_a * velocity_coeff -
                                      kernel_b / nu_hat * stress_coeff);
    }
  }

  profile.x.assign(grid.begin(), grid.end());
  profile.stress.resize(grid.size());
  profile.velocity.resize(grid.size());
  profile.strain.resize(grid.size());
  profile.momentum.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x_hat = grid[i] / a;
    Complex sigma_s = sigma_avg_s;
    Complex vel_s = velocity_avg_s;
    for (std::size_t m = 0; m < profile.xi_scaled.size(); ++m) {
      const Complex carrier = std::exp(kI * profile.xi_scaled[m] * x_hat);
      sigma_s += profile.coef_stress[m] * carrier;
      vel_s += profile.coef_velocity[m] * carrier;
    }
    const Material& mat = dcell.cell().material_at(grid[i]);
    profile.stress[i] = sigma_s * stress_unit;
    profile.velocity[i] = vel_s * c0;
    profile.strain[i] = mat.compliance * profile.stress[i];
    profile.momentum[i] = mat.density * profile.velocity[i];
  }
  return profile;
}

LocalResiduals local_residuals(const FieldProfile& profile,
                               const DiscretizedCell& dcell, double omega,
                               double q) {
  if (std::abs(dcell.cell().period() - profile.period) >
      1e-12 * profile.period) {
    throw Error("profile was reconstructed on a different cell");
  }
  const std::size_t n = profile.x.size();
  std::vector<Complex> r_momentum(n), r_kinematic(n);

  const double a = profile.period;
  for (std::size_t i = 0; i < n; ++i) {
    const double x_hat = profile.x[i] / a;
    // Spectral derivatives of the band-limited periodic parts.
    Complex d_stress = 0.0;
    Complex d_velocity = 0.0;
    for (std::size_t m = 0; m < profile.xi_scaled.size(); ++m) {
      const Complex carrier = std::exp(kI * profile.xi_scaled[m] * x_hat);
      const Complex ixi = kI * profile.xi_scaled[m] / a;  // raw d/dx
      d_stress += ixi * profile.coef_stress[m] * carrier;
      d_velocity += ixi * profile.coef_velocity[m] * carrier;
    }
    d_stress *= profile.stress_unit;
    d_velocity *= profile.velocity_unit;

    r_momentum[i] = d_stress + kI * q * profile.stress[i] +
                    kI * omega * profile.momentum[i];
    r_kinematic[i] = d_velocity + kI * q * profile.velocity[i] +
                     kI * omega * profile.strain[i];
  }

  auto mean = [](std::span<const Complex> values) {
    Complex acc = 0.0;
    for (const Complex& v : values) acc += v;
    return acc / static_cast<double>(values.size());
  };

  const Complex mean_momentum = mean(r_momentum);
  const Complex mean_kinematic = mean(r_kinematic);
  std::vector<Complex> fluct_momentum(n), fluct_kinematic(n);
  for (std::size_t i = 0; i < n; ++i) {
    fluct_momentum[i] = r_momentum[i] - mean_momentum;
    fluct_kinematic[i] = r_kinematic[i] - mean_kinematic;
  }

  const double norm_momentum =
      omega * rms(profile.momentum) + q * rms(profile.stress);
  const double norm_kinematic =
      omega * rms(profile.strain) + q * rms(profile.velocity);

  LocalResiduals out;
  if (norm_momentum > 0.0) {
    out.momentum = rms(r_momentum) / norm_momentum;
    out.momentum_fluctuation = rms(fluct_momentum) / norm_momentum;
  }
  if (norm_kinematic > 0.0) {
    out.kinematic = rms(r_kinematic) / norm_kinematic;
    out.kinematic_fluctuation = rms(fluct_kinematic) / norm_kinematic;
  }
  return out;
}

}  // namespace dynhomog
