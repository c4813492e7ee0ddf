#include "dynhomog/transfer_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace dynhomog {

namespace {

using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};

// integral of e^{i mu t} dt over [0, h]
Complex phase_integral(double mu, double h) {
  if (std::abs(mu * h) < 1e-8) {
    // series: h (1 + i mu h/2 - (mu h)^2/6)
    return h * Complex(1.0 - mu * h * mu * h / 6.0, 0.5 * mu * h);
  }
  return (std::exp(kI * mu * h) - 1.0) / (kI * mu);
}

double trace_scan_step(const UnitCell& cell) {
  // Resolve the fastest trace oscillation, set by the total travel time.
  double travel = 0.0;
  for (const Layer& layer : cell.layers()) {
    travel += layer.thickness / layer.material.wave_speed();
  }
  return std::numbers::pi / (40.0 * travel);
}

// Bisect f to ~1e-13 relative in omega; assumes a sign change in [lo, hi].
template <typename F>
double bisect(F&& f, double lo, double hi, double f_lo) {
  while (hi - lo > 1e-13 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if (std::signbit(f_lo) == std::signbit(f_mid)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Eigen::Matrix2cd layer_propagator(const Layer& layer, double omega) {
  const double k = omega * std::sqrt(layer.material.density * layer.material.compliance);
  const double kc = omega * layer.material.impedance();  // k * C = omega * z
  const double tau = k * layer.thickness;
  Eigen::Matrix2cd m;
  if (omega == 0.0) {
    m.setIdentity();
    // Static limit: u picks up sigma * D * h of strain displacement.
    m(0, 1) = layer.material.compliance * layer.thickness;
    return m;
  }
  m(0, 0) = std::cos(tau);
  m(0, 1) = std::sin(tau) / kc;
  m(1, 0) = -kc * std::sin(tau);
  m(1, 1) = std::cos(tau);
  return m;
}

double monodromy_trace(const UnitCell& cell, double omega) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  for (const Layer& layer : cell.layers()) {
    m = layer_propagator(layer, omega) * m;
  }
  return 0.5 * (m(0, 0) + m(1, 1)).real();
}

std::vector<double> exact_dispersion(const UnitCell& cell, double q,
                                     int n_branches) {
  const double a = cell.period();
  if (q < 0.0 || q > std::numbers::pi / a * (1.0 + 1e-12)) {
    throw Error("exact_dispersion expects q in [0, pi/a]");
  }
  if (n_branches < 1) throw Error("n_branches must be >= 1");

  const double target = std::cos(q * a);
  auto f = [&](double w) { return monodromy_trace(cell, w) - target; };

  std::vector<double> roots;
  if (q == 0.0) roots.push_back(0.0);  // tangent root of trace = 1 at omega = 0

  // Grid scan bracketing sign changes. Tangent (double) roots occur where the
  // trace only touches cos(qa) without crossing -- at zone center/boundary
  // when a gap closes -- so same-sign interior minima of |f| are refined and
  // counted twice when they reach zero.
  const double step = trace_scan_step(cell);
  const double tol_tangent = 1e-10 * (1.0 + std::abs(target));
  auto is_duplicate = [&](double w) {
    return !roots.empty() && std::abs(w - roots.back()) < 1e-9 * (1.0 + w);
  };
  double w_prev = step * 1e-6;
  double f_prev = f(w_prev);
  double f_prev2 = f_prev;
  double omega_max = 64.0 * step;
  while (static_cast<int>(roots.size()) < n_branches) {
    for (double w = w_prev + step; w <= omega_max + 0.5 * step; w += step) {
      const double f_cur = f(w);
      if (std::signbit(f_prev) != std::signbit(f_cur)) {
        const double root = bisect(f, w_prev, w, f_prev);
        if (!is_duplicate(root)) roots.push_back(root);
      } else if (std::signbit(f_prev2) == std::signbit(f_cur) &&
                 std::signbit(f_prev) == std::signbit(f_cur) &&
                 std::abs(f_prev) < std::abs(f_prev2) &&
                 std::abs(f_prev) <= std::abs(f_cur) &&
                 std::abs(f_prev) < 0.5 * (1.0 + std::abs(target))) {
        // Same-sign dip around w_prev: ternary-search the |f| minimum.
        double lo = w_prev - step, hi = w;
        for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
          const double m1 = lo + (hi - lo) / 3.0;
          const double m2 = hi - (hi - lo) / 3.0;
          if (std::abs(f(m1)) <= std::abs(f(m2))) {
            hi = m2;
          } else {
            lo = m1;
          }
        }
        const double w_min = 0.5 * (lo + hi);
        if (std::abs(f(w_min)) <= tol_tangent && !is_duplicate(w_min)) {
          roots.push_back(w_min);
          roots.push_back(w_min);
        }
      }
      if (static_cast<int>(roots.size()) >= n_branches) break;
      f_prev2 = f_prev;
      f_prev = f_cur;
      w_prev = w;
    }
    if (static_cast<int>(roots.size()) >= n_branches) break;
    if (omega_max > 1e7 * step) {
      throw InsufficientRoots("exact dispersion found only " +
                                  std::to_string(roots.size()) + " of " +
                                  std::to_string(n_branches) + " branches",
                              static_cast<int>(roots.size()), n_branches);
    }
    omega_max *= 2.0;
  }
  roots.resize(n_branches);
  return roots;
}

std::vector<std::pair<double, double>> gap_intervals(const UnitCell& cell,
                                                     double omega_max) {
  // Gaps are the intervals where |half-trace| exceeds 1.
  auto excess = [&](double w) { return std::abs(monodromy_trace(cell, w)) - 1.0; };

  const double step = trace_scan_step(cell);
  std::vector<std::pair<double, double>> gaps;
  double lo = step * 1e-6;
  double e_lo = excess(lo);
  bool in_gap = e_lo > 0.0;
  double gap_start = in_gap ? 0.0 : -1.0;
  for (double w = lo + step; w <= omega_max + 0.5 * step; w += step) {
    const double e_hi = excess(w);
    if ((e_lo > 0.0) != (e_hi > 0.0)) {
      const double edge = bisect(excess, lo, w, e_lo);
      if (in_gap) {
        gaps.emplace_back(gap_start, edge);
        in_gap = false;
      } else {
        gap_start = edge;
        in_gap = true;
      }
    }
    lo = w;
    e_lo = e_hi;
  }
  if (in_gap) gaps.emplace_back(gap_start, omega_max);
  return gaps;
}

ModeShape::ModeShape(const UnitCell& cell, double q, double omega,
                     std::vector<LayerWaveState> layers, Complex avg_displacement,
                     Complex avg_stress, Complex avg_momentum, Complex avg_strain)
    : cell_(cell),
      q_(q),
      omega_(omega),
      layers_(std::move(layers)),
      avg_displacement_(avg_displacement),
      avg_stress_(avg_stress),
      avg_momentum_(avg_momentum),
      avg_strain_(avg_strain) {}

Complex ModeShape::avg_velocity() const { return -kI * omega_ * avg_displacement_; }

double ModeShape::displacement_scale() const {
  double peak = 0.0;
  for (const LayerWaveState& s : layers_) {
    peak = std::max(peak, std::abs(s.forward) + std::abs(s.backward));
  }
  return peak;
}

double ModeShape::stress_scale() const {
  double peak = 0.0;
  for (std::size_t j = 0; j < layers_.size(); ++j) {
    const double kc = omega_ * cell_.layer(j).material.impedance();
    peak = std::max(peak,
                    kc * (std::abs(layers_[j].forward) + std::abs(layers_[j].backward)));
  }
  return peak;
}

FieldSample ModeShape::sample_periodic(double x) const {
  const double a = cell_.period();
  double y = std::remainder(x, a);
  if (y >= 0.5 * a) y -= a;
  if (y < -0.5 * a) y += a;

  std::size_t j = 0;
  while (j + 1 < cell_.layer_count() && y >= cell_.left_edge(j + 1)) ++j;

  const LayerWaveState& s = layers_[j];
  const Material& m = cell_.layer(j).material;
  const double t = y - cell_.left_edge(j);
  const Complex ep = std::exp(kI * s.wavenumber * t);
  const Complex em = 1.0 / ep;

  FieldSample out;
  const Complex u_full = s.forward * ep + s.backward * em;
  const Complex du_full = kI * s.wavenumber * (s.forward * ep - s.backward * em);
  const Complex bloch = std::exp(-kI * q_ * y);
  out.displacement = u_full * bloch;
  out.stress = m.modulus() * du_full * bloch;
  out.velocity = -kI * omega_ * out.displacement;
  out.momentum = m.density * out.velocity;
  out.strain = m.compliance * out.stress;
  return out;
}

ModeShape mode_shape(const UnitCell& cell, double q, double omega) {
  if (!(omega > 0.0)) throw NotOnBranch("mode shapes require omega > 0");
  const double a = cell.period();
  const double target = std::cos(q * a);
  const double trace = monodromy_trace(cell, omega);
  if (std::abs(trace - target) > 1e-10 * (1.0 + std::abs(trace))) {
    throw NotOnBranch("(q, omega) violates the exact dispersion relation: "
                      "half-trace deviates by " +
                      std::to_string(trace - target));
  }

  // Bloch eigenvector of the monodromy matrix for eigenvalue e^{iqa}.
  Eigen::Matrix2cd monodromy = Eigen::Matrix2cd::Identity();
  for (const Layer& layer : cell.layers()) {
    monodromy = layer_propagator(layer, omega) * monodromy;
  }
  const Complex lambda = std::exp(kI * q * a);
  const Eigen::Vector2cd row1(monodromy(0, 1), lambda - monodromy(0, 0));
  const Eigen::Vector2cd row2(lambda - monodromy(1, 1), monodromy(1, 0));
  Eigen::Vector2cd state = row1.norm() >= row2.norm() ? row1 : row2;
  if (state.norm() == 0.0) state << 1.0, 0.0;  // monodromy is lambda * identity
  state.normalize();

  // Propagate the (u, sigma) state to every layer edge and convert to
  // right/left-going amplitudes.
  std::vector<LayerWaveState> layers(cell.layer_count());
  Complex avg_u = 0.0, avg_sigma = 0.0, avg_p = 0.0, avg_eps = 0.0;
  Eigen::Vector2cd edge_state = state;
  for (std::size_t j = 0; j < cell.layer_count(); ++j) {
    const Layer& layer = cell.layer(j);
    const Material& m = layer.material;
    const double k = omega * std::sqrt(m.density * m.compliance);
    const double kc = omega * m.impedance();

    LayerWaveState& ws = layers[j];
    ws.wavenumber = k;
    ws.forward = 0.5 * (edge_state(0) + edge_state(1) / (kI * kc));
    ws.backward = 0.5 * (edge_state(0) - edge_state(1) / (kI * kc));

    // Closed-form layer integrals of the periodic parts:
    //   int u(x) e^{-iqx} dx = e^{-iq xl} [fw E(k-q) + bw E(-(k+q))].
    const double h = layer.thickness;
    const Complex shift = std::exp(-kI * q * cell.left_edge(j));
    const Complex int_plus = phase_integral(k - q, h);
    const Complex int_minus = phase_integral(-(k + q), h);
    const Complex int_u = shift * (ws.forward * int_plus + ws.backward * int_minus);
    const Complex int_du =
        shift * kI * k * (ws.forward * int_plus - ws.backward * int_minus);

    avg_u += int_u;
    avg_sigma += m.modulus() * int_du;
    avg_p += m.density * (-kI * omega) * int_u;
    avg_eps += int_du;  // strain = du/dx; compliance * stress telescopes back

    edge_state = layer_propagator(layer, omega) * edge_state;
  }
  avg_u /= a;
  avg_sigma /= a;
  avg_p /= a;
  avg_eps /= a;

  // Normalization convention: <u> = 1 when resolvable, else unit peak.
  double peak = 0.0;
  for (const LayerWaveState& s : layers) {
    peak = std::max(peak, std::abs(s.forward) + std::abs(s.backward));
  }
  Complex scale;
  if (std::abs(avg_u) > 1e-8 * peak) {
    scale = 1.0 / avg_u;
  } else {
    scale = 1.0 / peak;
  }
  for (LayerWaveState& s : layers) {
    s.forward *= scale;
    s.backward *= scale;
  }
  return ModeShape(cell, q, omega, std::move(layers), avg_u * scale,
                   avg_sigma * scale, avg_p * scale, avg_eps * scale);
}

std::pair<Complex, Complex> field_integration_homog(const ModeShape& mode) {
  if (std::abs(mode.avg_displacement()) < 1e-14 * mode.displacement_scale() ||
      std::abs(mode.avg_stress()) < 1e-14 * mode.stress_scale()) {
    throw ZeroAverage("degenerate normalization: cell averages of u or sigma vanish");
  }
  const Complex d_eff =
      kI * mode.q() * mode.avg_displacement() / mode.avg_stress();
  const Complex rho_eff =
      mode.avg_momentum() / (-kI * mode.omega() * mode.avg_displacement());
  return {d_eff, rho_eff};
}

}  // namespace dynhomog
