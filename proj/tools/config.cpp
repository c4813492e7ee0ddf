#include "config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include "json.hpp"

namespace dynhomog::cli {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& object, const std::string& path,
                         const std::set<std::string>& allowed) {
  for (const auto& item : object.items()) {
    if (!allowed.contains(item.key())) {
      throw ConfigError(path + "." + item.key() + ": unknown key");
    }
  }
}

double require_positive_number(const json& object, const std::string& path,
                               const std::string& key) {
  if (!object.contains(key)) throw ConfigError(path + "." + key + ": missing");
  const json& v = object.at(key);
  if (!v.is_number()) throw ConfigError(path + "." + key + ": must be a number");
  const double value = v.get<double>();
  if (!(value > 0.0)) throw ConfigError(path + "." + key + ": must be > 0");
  return value;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace

UnitCell RunConfig::make_cell() const {
  return build_cell(std::span<const LayerSpec>(layers.data(), layers.size()));
}

ReferenceMedium RunConfig::make_reference(const UnitCell& cell) const {
  switch (reference_kind) {
    case ReferenceKind::kLayerAverage:
      return reference_from_average(cell);
    case ReferenceKind::kLayer:
      return reference_from_layer(cell, reference_layer);
    case ReferenceKind::kExplicit:
      return ReferenceMedium{reference_rho0, reference_d0};
  }
  throw ConfigError("reference: invalid kind");
}

DiscretizedCell RunConfig::make_discretized() const {
  const UnitCell cell = make_cell();
  const ReferenceMedium ref = make_reference(cell);
  return discretize(cell, std::span<const int>(counts.data(), counts.size()), ref,
                    eps_mat);
}

SpectralBasis RunConfig::make_basis() const { return SpectralBasis(n_max); }

ScanParams RunConfig::make_scan(const DiscretizedCell& dcell) const {
  ScanParams scan;
  scan.omega_max = omega_max_scaled * dcell.reference().wave_speed() /
                   dcell.cell().period();
  scan.tol_root = tol_root;
  scan.eps_pole = eps_pole;
  return scan;
}

std::vector<double> RunConfig::q_grid(const UnitCell& cell) const {
  std::vector<double> grid(q_points);
  const double unit = std::numbers::pi / cell.period();
  for (int j = 0; j < q_points; ++j) {
    const double frac =
        q_points == 1
            ? q_hi_frac
            : q_lo_frac + (q_hi_frac - q_lo_frac) * j / (q_points - 1);
    grid[j] = frac * unit;
  }
  return grid;
}

RunConfig load_config(const std::string& path) {
  std::ifstream stream(path);
  if (!stream) throw ConfigError("cannot open config file: " + path);

  json root;
  try {
    root = json::parse(stream);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");

  reject_unknown_keys(root, "config",
                      {"cell", "reference", "discretization", "fourier", "scan",
                       "tolerances", "output", "seed", "verify_samples"});

  RunConfig cfg;

  // cell.layers
  if (!root.contains("cell")) throw ConfigError("cell: missing");
  const json& cell = root.at("cell");
  reject_unknown_keys(cell, "cell", {"layers"});
  if (!cell.contains("layers") || !cell.at("layers").is_array() ||
      cell.at("layers").empty()) {
    throw ConfigError("cell.layers: must be a non-empty array");
  }
  int index = 0;
  for (const json& layer : cell.at("layers")) {
    const std::string where = "cell.layers[" + std::to_string(index) + "]";
    reject_unknown_keys(layer, where,
                        {"density", "compliance", "modulus", "thickness"});
    LayerSpec spec{};
    spec.density = require_positive_number(layer, where, "density");
    spec.thickness = require_positive_number(layer, where, "thickness");
    const bool has_compliance = layer.contains("compliance");
    const bool has_modulus = layer.contains("modulus");
    if (has_compliance == has_modulus) {
      throw ConfigError(where + ": exactly one of compliance/modulus required");
    }
    spec.compliance = has_compliance
                          ? require_positive_number(layer, where, "compliance")
                          : 1.0 / require_positive_number(layer, where, "modulus");
    cfg.layers.push_back(spec);
    ++index;
  }

  // reference
  if (root.contains("reference")) {
    const json& ref = root.at("reference");
    if (ref.is_string()) {
      const std::string text = ref.get<std::string>();
      if (text == "layer-average") {
        cfg.reference_kind = ReferenceKind::kLayerAverage;
      } else if (text.rfind("layer:", 0) == 0) {
        cfg.reference_kind = ReferenceKind::kLayer;
        const std::string num = text.substr(6);
        try {
          const int one_based = std::stoi(num);
          if (one_based < 1 || one_based > static_cast<int>(cfg.layers.size())) {
            throw ConfigError("reference: layer index out of range: " + text);
          }
          cfg.reference_layer = static_cast<std::size_t>(one_based - 1);
        } catch (const std::invalid_argument&) {
          throw ConfigError("reference: malformed layer index: " + text);
        }
      } else {
        throw ConfigError("reference: expected \"layer-average\", \"layer:<k>\" "
                          "or an object, got \"" +
                          text + "\"");
      }
    } else if (ref.is_object()) {
      reject_unknown_keys(ref, "reference", {"rho0", "D0"});
      cfg.reference_kind = ReferenceKind::kExplicit;
      cfg.reference_rho0 = require_positive_number(ref, "reference", "rho0");
      cfg.reference_d0 = require_positive_number(ref, "reference", "D0");
    } else {
      throw ConfigError("reference: must be a string or an object");
    }
  }

  // discretization.counts
  if (!root.contains("discretization")) throw ConfigError("discretization: missing");
  const json& disc = root.at("discretization");
  reject_unknown_keys(disc, "discretization", {"counts"});
  if (!disc.contains("counts") || !disc.at("counts").is_array()) {
    throw ConfigError("discretization.counts: must be an array of integers");
  }
  for (const json& c : disc.at("counts")) {
    if (!c.is_number_integer() || c.get<int>() < 1) {
      throw ConfigError("discretization.counts: entries must be integers >= 1");
    }
    cfg.counts.push_back(c.get<int>());
  }
  if (cfg.counts.size() != cfg.layers.size()) {
    throw ConfigError("discretization.counts: length " +
                      std::to_string(cfg.counts.size()) + " does not match " +
                      std::to_string(cfg.layers.size()) + " layers");
  }

  // fourier.n_max (default: max(10, largest per-layer count))
  cfg.n_max = std::max(10, *std::max_element(cfg.counts.begin(), cfg.counts.end()));
  if (root.contains("fourier")) {
    const json& fourier = root.at("fourier");
    reject_unknown_keys(fourier, "fourier", {"n_max"});
    if (fourier.contains("n_max")) {
      if (!fourier.at("n_max").is_number_integer() ||
          fourier.at("n_max").get<int>() < 1) {
        throw ConfigError("fourier.n_max: must be an integer >= 1");
      }
      cfg.n_max = fourier.at("n_max").get<int>();
    }
  }

  // scan
  if (root.contains("scan")) {
    const json& scan = root.at("scan");
    reject_unknown_keys(scan, "scan",
                        {"q_points", "q_range", "omega_max", "n_branches"});
    if (scan.contains("q_points")) {
      if (!scan.at("q_points").is_number_integer() ||
          scan.at("q_points").get<int>() < 1) {
        throw ConfigError("scan.q_points: must be an integer >= 1");
      }
      cfg.q_points = scan.at("q_points").get<int>();
    }
    if (scan.contains("q_range")) {
      const json& range = scan.at("q_range");
      if (!range.is_array() || range.size() != 2 || !range[0].is_number() ||
          !range[1].is_number()) {
        throw ConfigError("scan.q_range: must be [lo, hi] fractions of pi/a");
      }
      cfg.q_lo_frac = range[0].get<double>();
      cfg.q_hi_frac = range[1].get<double>();
      if (!(cfg.q_lo_frac > 0.0) || cfg.q_hi_frac > 1.0 ||
          cfg.q_lo_frac > cfg.q_hi_frac) {
        throw ConfigError("scan.q_range: need 0 < lo <= hi <= 1");
      }
    }
    if (scan.contains("omega_max")) {
      cfg.omega_max_scaled = require_positive_number(scan, "scan", "omega_max");
    }
    if (scan.contains("n_branches")) {
      if (!scan.at("n_branches").is_number_integer() ||
          scan.at("n_branches").get<int>() < 1) {
        throw ConfigError("scan.n_branches: must be an integer >= 1");
      }
      cfg.n_branches = scan.at("n_branches").get<int>();
    }
  }

  // tolerances
  if (root.contains("tolerances")) {
    const json& tol = root.at("tolerances");
    reject_unknown_keys(tol, "tolerances", {"eps_mat", "eps_pole", "tol_root"});
    if (tol.contains("eps_mat")) {
      cfg.eps_mat = require_positive_number(tol, "tolerances", "eps_mat");
      if (cfg.eps_mat >= 1.0) throw ConfigError("tolerances.eps_mat: must be < 1");
    }
    if (tol.contains("eps_pole")) {
      cfg.eps_pole = require_positive_number(tol, "tolerances", "eps_pole");
    }
    if (tol.contains("tol_root")) {
      cfg.tol_root = require_positive_number(tol, "tolerances", "tol_root");
    }
  }

  // output
  if (root.contains("output")) {
    const json& output = root.at("output");
    reject_unknown_keys(output, "output", {"directory", "format", "precision"});
    if (output.contains("directory")) {
      if (!output.at("directory").is_string()) {
        throw ConfigError("output.directory: must be a string");
      }
      cfg.directory = output.at("directory").get<std::string>();
    }
    if (output.contains("format")) {
      const std::string fmt = output.at("format").is_string()
                                  ? output.at("format").get<std::string>()
                                  : std::string();
      if (fmt == "csv") {
        cfg.format = OutputFormat::kCsv;
      } else if (fmt == "json") {
        cfg.format = OutputFormat::kJson;
      } else {
        throw ConfigError("output.format: must be \"csv\" or \"json\"");
      }
    }
    if (output.contains("precision")) {
      if (!output.at("precision").is_number_integer()) {
        throw ConfigError("output.precision: must be an integer");
      }
      cfg.precision = output.at("precision").get<int>();
      if (cfg.precision < 3 || cfg.precision > 17) {
        throw ConfigError("output.precision: must lie in [3, 17]");
      }
    }
  }

  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned() && !root.at("seed").is_number_integer()) {
      throw ConfigError("seed: must be an integer");
    }
    cfg.seed = root.at("seed").get<std::uint64_t>();
  }
  if (root.contains("verify_samples")) {
    if (!root.at("verify_samples").is_number_integer() ||
        root.at("verify_samples").get<int>() < 1) {
      throw ConfigError("verify_samples: must be an integer >= 1");
    }
    cfg.verify_samples = root.at("verify_samples").get<int>();
  }

  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a(root.dump())));
  cfg.config_hash = hash;
  return cfg;
}

}  // namespace dynhomog::cli
