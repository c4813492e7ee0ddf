#include "dynhomog/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace dynhomog {

namespace {

using Complex = std::complex<double>;

struct ScaledParams {
  Complex compliance;  // D/D0
  Complex density;     // rho/rho0
  Complex s1;          // c0 * S1
  Complex s2;          // c0 * S2
};

ScaledParams to_scaled(const EffectiveParams& p, const ReferenceMedium& ref) {
  const double c0 = ref.wave_speed();
  return ScaledParams{p.compliance / ref.compliance, p.density / ref.density,
                      c0 * p.coupling_s1, c0 * p.coupling_s2};
}

// Scaled residual plus the parameters it was computed from.
struct ResidualValue {
  double value;
  EffectiveParams params;
};

// Persistent per-thread state for a frequency scan at fixed q: the spectral
// workspace plus reusable assembly and factorization storage.
struct ScanContext {
  const SpectralWorkspace& ws;
  AssembledSystem sys;
  EigenfieldSolver solver;

  explicit ScanContext(const SpectralWorkspace& workspace) : ws(workspace) {}

  ResidualValue eval(double omega, double eps_pole) {
    const ReferenceMedium& ref = ws.dcell().reference();
    const double a = ws.dcell().cell().period();
    const double c0 = ref.wave_speed();
    const double nu_hat = omega * a / c0;
    const double q_hat = ws.q_hat();

    ws.assemble_into(sys, omega, eps_pole);
    const EigenfieldSolution& sol = solver.solve(sys, ref);
    // Conditioning past this cap means a comparison-medium resonance is close
    // enough to contaminate the realness of the residual; treat like a pole.
    if (sol.condition_estimate > 1e6) {
      throw NearPole("response resonance at omega=" + std::to_string(omega),
                     omega, ws.q());
    }
    const EffectiveParams params = effective_params(sol, sys, ref);
    const ScaledParams sp = to_scaled(params, ref);

    const double v = nu_hat / q_hat;  // phase velocity / c0
    const Complex propagation = sp.compliance * sp.density * (v * v);
    const Complex coupling = (1.0 + v * sp.s1) * (1.0 + v * sp.s2);
    const Complex r = propagation - coupling;

    const double scale = std::max({1.0, std::abs(propagation), std::abs(coupling)});
    if (std::abs(r.imag()) > 1e-10 * scale) {
      // For real q the residual is real up to roundoff; a visible imaginary
      // part means resonance-amplified rounding, i.e. pole proximity the
      // condition proxy did not flag.
      throw NearPole("dispersion residual imaginary part " +
                         std::to_string(r.imag()) + " at omega=" +
                         std::to_string(omega) + " signals resonance proximity",
                     omega, ws.q());
    }
    return ResidualValue{r.real(), params};
  }
};

struct Interval {
  double lo;
  double hi;
};

// Scan segments between consecutive pole windows, in scaled frequency.
std::vector<Interval> split_at_poles(const std::vector<double>& poles_nu,
                                     double nu_lo, double nu_hi,
                                     double eps_pole) {
  std::vector<Interval> segments;
  double cursor = nu_lo;
  for (double p : poles_nu) {
    const double window = eps_pole * p;  // conservative: twice the kernel window
    if (p + window <= nu_lo) continue;
    if (p - window >= nu_hi) break;
    if (p - window > cursor) segments.push_back({cursor, p - window});
    cursor = std::max(cursor, p + window);
  }
  if (cursor < nu_hi) segments.push_back({cursor, nu_hi});
  return segments;
}

}  // namespace

double residual(const SpectralWorkspace& workspace, double omega, double eps_pole) {
  ScanContext context(workspace);
  return context.eval(omega, eps_pole).value;
}

double residual(const DiscretizedCell& dcell, const SpectralBasis& basis,
                double omega, double q, double eps_pole) {
  if (!(q > 0.0)) throw Error("residual requires q > 0");
  if (!(omega > 0.0)) throw Error("residual requires omega > 0");
  return residual(SpectralWorkspace(dcell, basis, q), omega, eps_pole);
}

std::vector<double> pole_frequencies(const DiscretizedCell& dcell,
                                     const SpectralBasis& basis, double q,
                                     double omega_max) {
  const double a = dcell.cell().period();
  const double c0 = dcell.reference().wave_speed();
  const double q_hat = q * a;
  std::vector<double> poles;
  for (int n = 0; n < basis.n_max(); ++n) {
    const double xi = basis.xi_scaled(n);
    poles.push_back(c0 * std::abs(xi + q_hat) / a);
    poles.push_back(c0 * std::abs(-xi + q_hat) / a);
  }
  std::sort(poles.begin(), poles.end());
  poles.erase(std::remove_if(poles.begin(), poles.end(),
                             [omega_max](double w) {
                               return !(w > 0.0) || w > omega_max;
                             }),
              poles.end());
  return poles;
}

std::vector<BranchPoint> scan_roots(const DiscretizedCell& dcell,
                                    const SpectralBasis& basis, double q,
                                    const ScanParams& scan) {
  const double a = dcell.cell().period();
  const double c0 = dcell.reference().wave_speed();
  if (!(q > 0.0) || q > std::numbers::pi / a * (1.0 + 1e-12)) {
    throw Error("scan wavenumber must lie in (0, pi/a], got q*a=" +
                std::to_string(q * a));
  }
  if (!(scan.omega_max > 0.0)) throw Error("scan.omega_max must be positive");

  SpectralWorkspace ws(dcell, basis, q);
  ScanContext context(ws);

  const double nu_hi = scan.omega_max * a / c0;
  double nu_lo = scan.omega_min * a / c0;
  if (nu_lo <= 0.0) nu_lo = 1e-9 * std::max(1.0, nu_hi);

  std::vector<double> poles_nu;
  for (double w : pole_frequencies(dcell, basis, q, scan.omega_max)) {
    poles_nu.push_back(w * a / c0);
  }

  // A residual evaluation that treats singular points like excluded windows.
  auto eval = [&](double nu) -> std::optional<double> {
    try {
      return context.eval(nu * c0 / a, scan.eps_pole).value;
    } catch (const NearPole&) {
      return std::nullopt;
    } catch (const SingularSystem&) {
      return std::nullopt;
    }
  };

  std::vector<BranchPoint> roots;
  for (const Interval& seg : split_at_poles(poles_nu, nu_lo, nu_hi, scan.eps_pole)) {
    const double span = seg.hi - seg.lo;
    if (!(span > 0.0)) continue;
    const int steps =
        std::max(8, static_cast<int>(std::ceil(span * scan.steps_per_unit)));

    double prev_nu = seg.lo;
    std::optional<double> prev_r = eval(prev_nu);
    for (int i = 1; i <= steps; ++i) {
      const double nu = seg.lo + span * i / steps;
      std::optional<double> r = eval(nu);
      if (prev_r && r && std::signbit(*prev_r) != std::signbit(*r)) {
        // Bisection to near machine precision in scaled frequency so the
        // residual certificate below is meaningful.
        double lo = prev_nu, hi = nu;
        double r_lo = *prev_r;
        bool aborted = false;
        while (hi - lo > 1e-15 * std::max(1.0, hi)) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          std::optional<double> r_mid = eval(mid);
          if (!r_mid) {
            aborted = true;
            break;
          }
          if (*r_mid == 0.0) {
            lo = hi = mid;
            r_lo = 0.0;
            break;
          }
          if (std::signbit(r_lo) == std::signbit(*r_mid)) {
            lo = mid;
            r_lo = *r_mid;
          } else {
            hi = mid;
          }
        }
        if (!aborted) {
          const double nu_root = 0.5 * (lo + hi);
          const double omega_root = nu_root * c0 / a;
          try {
            const ResidualValue rv = context.eval(omega_root, scan.eps_pole);
            // Certificate: reject sign flips across response poles.
            if (std::abs(rv.value) <= scan.tol_root) {
              BranchPoint point;
              point.q = q;
              point.omega = omega_root;
              point.params = rv.params;
              point.phase_velocity = omega_root / q;
              point.residual = std::abs(rv.value);
              auto [d_eff, rho_eff] = effective_on_branch(rv.params, q, omega_root);
              point.d_eff = d_eff;
              point.rho_eff = rho_eff;
              roots.push_back(point);
            }
          } catch (const NearPole&) {
          } catch (const SingularSystem&) {
          } catch (const DegenerateDenominator&) {
          }
        }
      }
      prev_nu = nu;
      prev_r = r;
    }
  }

  std::sort(roots.begin(), roots.end(),
            [](const BranchPoint& x, const BranchPoint& y) { return x.omega < y.omega; });
  for (std::size_t i = 0; i < roots.size(); ++i) roots[i].branch = static_cast<int>(i) + 1;
  return roots;
}

std::vector<BranchPoint> find_branches(const DiscretizedCell& dcell,
                                       const SpectralBasis& basis, double q,
                                       int n_branches, const ScanParams& scan) {
  if (n_branches < 1) throw Error("n_branches must be >= 1");
  std::vector<BranchPoint> roots = scan_roots(dcell, basis, q, scan);
  if (static_cast<int>(roots.size()) < n_branches) {
    throw InsufficientRoots("found " + std::to_string(roots.size()) +
                                " dispersion roots, requested " +
                                std::to_string(n_branches) + " at q*a=" +
                                std::to_string(q * dcell.cell().period()),
                            static_cast<int>(roots.size()), n_branches);
  }
  roots.resize(n_branches);
  return roots;
}

std::vector<DispersionBranch> group_branches(
    const std::vector<std::vector<BranchPoint>>& roots_per_q) {
  std::vector<DispersionBranch> branches;
  if (roots_per_q.empty()) return branches;
  const std::size_t n_branches = roots_per_q.front().size();
  for (const auto& roots : roots_per_q) {
    if (roots.size() != n_branches) {
      throw Error("group_branches expects the same branch count at every q");
    }
  }
  for (std::size_t b = 0; b < n_branches; ++b) {
    DispersionBranch branch;
    branch.branch = static_cast<int>(b) + 1;
    for (const auto& roots : roots_per_q) branch.points.push_back(roots[b]);
    bool increasing = true, decreasing = true;
    for (std::size_t j = 1; j < branch.points.size(); ++j) {
      if (branch.points[j].omega < branch.points[j - 1].omega) increasing = false;
      if (branch.points[j].omega > branch.points[j - 1].omega) decreasing = false;
    }
    branch.monotone = increasing || decreasing;
    branches.push_back(std::move(branch));
  }
  return branches;
}

std::pair<Complex, Complex> effective_on_branch(const EffectiveParams& params,
                                                double q, double omega) {
  const double v = omega / q;
  const Complex denom_d = 1.0 + v * params.coupling_s1;
  const Complex denom_rho = 1.0 + v * params.coupling_s2;
  if (std::abs(denom_d) < 1e-12 || std::abs(denom_rho) < 1e-12) {
    throw DegenerateDenominator("|1 + v_p S| below 1e-12 at omega=" +
                                std::to_string(omega) + ", q=" + std::to_string(q));
  }
  return {params.compliance / denom_d, params.density / denom_rho};
}

QuasiStaticLimit quasi_static_limit(const DiscretizedCell& dcell,
                                    const SpectralBasis& basis) {
  const double a = dcell.cell().period();
  const double c0 = dcell.reference().wave_speed();
  const double qa_samples[3] = {0.05, 0.02, 0.01};

  Complex d_vals[3], rho_vals[3];
  for (int i = 0; i < 3; ++i) {
    const double q = qa_samples[i] / a;
    ScanParams scan;
    // The acoustic branch at q*a << 1 lies near c_qs * q; a scan up to a few
    // times c0*q safely brackets it for any sensible reference.
    scan.omega_max = 8.0 * c0 * q;
    std::vector<BranchPoint> roots = find_branches(dcell, basis, q, 1, scan);
    d_vals[i] = roots[0].d_eff;
    rho_vals[i] = roots[0].rho_eff;
  }

  // Extrapolate to q = 0 with a quadratic in s = (qa)^2 through the three
  // samples (leading dispersion corrections are even in q).
  auto extrapolate = [&](const Complex* v) {
    const double s0 = qa_samples[0] * qa_samples[0];
    const double s1 = qa_samples[1] * qa_samples[1];
    const double s2 = qa_samples[2] * qa_samples[2];
    Eigen::Matrix3cd vand;
    vand << 1.0, s0, s0 * s0, 1.0, s1, s1 * s1, 1.0, s2, s2 * s2;
    Eigen::Vector3cd rhs(v[0], v[1], v[2]);
    Eigen::Vector3cd coef = vand.lu().solve(rhs);
    return coef(0);
  };

  return QuasiStaticLimit{extrapolate(d_vals), extrapolate(rho_vals)};
}

}  // namespace dynhomog
