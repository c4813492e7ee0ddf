#include "dynhomog/cell.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace dynhomog {

namespace {

void require_positive_finite(double value, const std::string& name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw NonPositiveInput(name + " must be positive and finite, got " +
                           std::to_string(value));
  }
}

}  // namespace

double Material::wave_speed() const { return 1.0 / std::sqrt(density * compliance); }
double Material::impedance() const { return std::sqrt(density / compliance); }

double ReferenceMedium::wave_speed() const {
  return 1.0 / std::sqrt(density * compliance);
}
double ReferenceMedium::impedance() const {
  return std::sqrt(density / compliance);
}

UnitCell::UnitCell(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw EmptyCell("unit cell must contain at least one layer");
  for (const Layer& layer : layers_) {
    require_positive_finite(layer.material.density, "layer density");
    require_positive_finite(layer.material.compliance, "layer compliance");
    require_positive_finite(layer.thickness, "layer thickness");
  }
  period_ = 0.0;
  for (const Layer& layer : layers_) period_ += layer.thickness;
  edges_.reserve(layers_.size() + 1);
  edges_.push_back(-0.5 * period_);
  for (const Layer& layer : layers_) edges_.push_back(edges_.back() + layer.thickness);
  edges_.back() = 0.5 * period_;  // absorb accumulation rounding
}

const Material& UnitCell::material_at(double x) const {
  // Wrap into [-a/2, a/2).
  double y = std::remainder(x, period_);
  if (y >= 0.5 * period_) y -= period_;
  if (y < -0.5 * period_) y += period_;
  for (std::size_t j = 0; j + 1 < edges_.size(); ++j) {
    if (y < edges_[j + 1]) return layers_[j].material;
  }
  return layers_.back().material;
}

UnitCell build_cell(std::span<const LayerSpec> layers) {
  std::vector<Layer> out;
  out.reserve(layers.size());
  for (const LayerSpec& spec : layers) {
    out.push_back(Layer{Material{spec.density, spec.compliance}, spec.thickness});
  }
  return UnitCell(std::move(out));
}

UnitCell build_cell(std::initializer_list<LayerSpec> layers) {
  return build_cell(std::span<const LayerSpec>(layers.begin(), layers.size()));
}

ReferenceMedium reference_from_average(const UnitCell& cell) {
  double rho = 0.0;
  double compliance = 0.0;
  for (const Layer& layer : cell.layers()) {
    rho += layer.material.density * layer.thickness;
    compliance += layer.material.compliance * layer.thickness;
  }
  return ReferenceMedium{rho / cell.period(), compliance / cell.period()};
}

ReferenceMedium reference_from_layer(const UnitCell& cell, std::size_t layer_index) {
  if (layer_index >= cell.layer_count()) {
    throw Error("reference layer index " + std::to_string(layer_index) +
                " out of range (cell has " + std::to_string(cell.layer_count()) +
                " layers)");
  }
  const Material& m = cell.layer(layer_index).material;
  return ReferenceMedium{m.density, m.compliance};
}

DiscretizedCell::DiscretizedCell(UnitCell cell, ReferenceMedium ref,
                                 std::vector<Subregion> subregions)
    : cell_(std::move(cell)), ref_(ref), subregions_(std::move(subregions)) {
  for (const Subregion& s : subregions_) {
    if (s.active_stress) ++n_stress_;
    if (s.active_velocity) ++n_velocity_;
  }
}

DiscretizedCell discretize(const UnitCell& cell, std::span<const int> counts,
                           const ReferenceMedium& ref, double eps_mat) {
  if (counts.size() != cell.layer_count()) {
    throw CountMismatch("got " + std::to_string(counts.size()) +
                        " subdivision counts for " +
                        std::to_string(cell.layer_count()) + " layers");
  }
  if (!(eps_mat > 0.0) || !(eps_mat < 1.0)) {
    throw InvalidTolerance("eps_mat must lie in (0, 1), got " +
                           std::to_string(eps_mat));
  }
  for (int c : counts) {
    if (c < 1) throw CountMismatch("subdivision counts must be >= 1");
  }

  const double a = cell.period();
  std::vector<Subregion> subregions;
  for (std::size_t j = 0; j < cell.layer_count(); ++j) {
    const Layer& layer = cell.layer(j);
    const int n = counts[j];
    const double x_left = cell.left_edge(j);
    const double width = layer.thickness / n;
    for (int k = 0; k < n; ++k) {
      Subregion s;
      s.center = x_left + (k + 0.5) * width;
      s.length = width;
      s.fraction = width / a;
      s.compliance = layer.material.compliance;
      s.density = layer.material.density;
      s.active_stress =
          std::abs(s.compliance - ref.compliance) > eps_mat * ref.compliance;
      s.active_velocity =
          std::abs(s.density - ref.density) > eps_mat * ref.density;
      subregions.push_back(s);
    }
  }
  return DiscretizedCell(cell, ref, std::move(subregions));
}

DiscretizedCell discretize(const UnitCell& cell, std::initializer_list<int> counts,
                           const ReferenceMedium& ref, double eps_mat) {
  return discretize(cell, std::span<const int>(counts.begin(), counts.size()), ref,
                    eps_mat);
}

}  // namespace dynhomog
