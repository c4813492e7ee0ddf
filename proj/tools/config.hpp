#ifndef DYNHOMOG_TOOLS_CONFIG_HPP
#define DYNHOMOG_TOOLS_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynhomog/cell.hpp"
#include "dynhomog/dispersion.hpp"
#include "dynhomog/spectral.hpp"

namespace dynhomog::cli {

/// Configuration problems carry the offending field in the message and map to
/// exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ReferenceKind { kLayerAverage, kLayer, kExplicit };
enum class OutputFormat { kCsv, kJson };

struct RunConfig {
  std::vector<LayerSpec> layers;

  ReferenceKind reference_kind = ReferenceKind::kLayerAverage;
  std::size_t reference_layer = 0;  // 0-based
  double reference_rho0 = 0.0;
  double reference_d0 = 0.0;

  std::vector<int> counts;
  int n_max = 10;

  int q_points = 16;
  double q_lo_frac = 0.0625;  // fractions of pi/a
  double q_hi_frac = 1.0;
  double omega_max_scaled = 12.0;  // omega * a / c0
  int n_branches = 1;

  double eps_mat = 1e-9;
  double eps_pole = kDefaultEpsPole;
  double tol_root = kDefaultTolRoot;

  std::string directory = ".";
  OutputFormat format = OutputFormat::kCsv;
  int precision = 12;

  std::uint64_t seed = 12345;
  int verify_samples = 200;

  std::string config_hash;  // FNV-1a over the canonical serialized form

  UnitCell make_cell() const;
  ReferenceMedium make_reference(const UnitCell& cell) const;
  DiscretizedCell make_discretized() const;
  SpectralBasis make_basis() const;
  ScanParams make_scan(const DiscretizedCell& dcell) const;
  std::vector<double> q_grid(const UnitCell& cell) const;  // raw wavenumbers
};

RunConfig load_config(const std::string& path);

}  // namespace dynhomog::cli

#endif
