#ifndef DYNHOMOG_CELL_HPP
#define DYNHOMOG_CELL_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "dynhomog/errors.hpp"

namespace dynhomog {

/// Isotropic elastic material at normal incidence: mass density rho and
/// compliance D (inverse of the longitudinal modulus). Both strictly positive.
struct Material {
  double density = 0.0;     // rho
  double compliance = 0.0;  // D = 1/C

  double modulus() const { return 1.0 / compliance; }
  double wave_speed() const;  // 1/sqrt(rho * D)
  double impedance() const;   // sqrt(rho / D) = rho * c
};

struct Layer {
  Material material;
  double thickness = 0.0;
};

/// Convenience row for building a cell: (density, compliance, thickness).
struct LayerSpec {
  double density;
  double compliance;
  double thickness;
};

/// One period of a 1-D layered composite on [-a/2, a/2), layers ordered
/// left to right. Immutable after construction.
class UnitCell {
 public:
  explicit UnitCell(std::vector<Layer> layers);

  double period() const { return period_; }
  std::size_t layer_count() const { return layers_.size(); }
  std::span<const Layer> layers() const { return layers_; }
  const Layer& layer(std::size_t j) const { return layers_[j]; }

  /// Left edge of layer j; layer j occupies [left_edge(j), left_edge(j+1)).
  double left_edge(std::size_t j) const { return edges_[j]; }

  /// Material at position x, with x wrapped into [-a/2, a/2).
  const Material& material_at(double x) const;

 private:
  std::vector<Layer> layers_;
  std::vector<double> edges_;  // layer_count()+1 entries, edges_[0] = -a/2
  double period_ = 0.0;
};

UnitCell build_cell(std::span<const LayerSpec> layers);
UnitCell build_cell(std::initializer_list<LayerSpec> layers);

/// The uniform comparison medium the eigenfields live in.
struct ReferenceMedium {
  double density = 0.0;     // rho0
  double compliance = 0.0;  // D0

  double wave_speed() const;  // c0 = 1/sqrt(rho0 * D0)
  double impedance() const;   // z0 = sqrt(rho0 / D0)
  /// nu = omega * sqrt(rho0 * D0) = omega / c0.
  double nu(double omega) const { return omega / wave_speed(); }
};

/// Volume averages of rho and D over the cell.
ReferenceMedium reference_from_average(const UnitCell& cell);
/// Properties of one layer (0-based index).
ReferenceMedium reference_from_layer(const UnitCell& cell, std::size_t layer_index);

/// Piecewise-constant subdivision interval, entirely inside one layer.
struct Subregion {
  double center = 0.0;      // x_alpha
  double length = 0.0;      // l_alpha
  double fraction = 0.0;    // f_alpha = l_alpha / a
  double compliance = 0.0;  // D_alpha, from the enclosing layer
  double density = 0.0;     // rho_alpha
  // Whether the corresponding eigenfield unknown participates in the solve.
  // A subregion matching the reference in D (or rho) has its eigenstress
  // (or eigenvelocity) forced to zero exactly.
  bool active_stress = false;
  bool active_velocity = false;
};

/// A unit cell subdivided into equal-width subregions per layer, together
/// with the reference medium and the active-unknown flags.
/// Immutable after construction; safe to share across threads.
class DiscretizedCell {
 public:
  DiscretizedCell(UnitCell cell, ReferenceMedium ref,
                  std::vector<Subregion> subregions);

  const UnitCell& cell() const { return cell_; }
  const ReferenceMedium& reference() const { return ref_; }
  std::span<const Subregion> subregions() const { return subregions_; }
  std::size_t size() const { return subregions_.size(); }

  std::size_t active_stress_count() const { return n_stress_; }
  std::size_t active_velocity_count() const { return n_velocity_; }
  /// True when no subregion differs from the reference in either property.
  bool materially_uniform() const { return n_stress_ == 0 && n_velocity_ == 0; }

 private:
  UnitCell cell_;
  ReferenceMedium ref_;
  std::vector<Subregion> subregions_;
  std::size_t n_stress_ = 0;
  std::size_t n_velocity_ = 0;
};

/// Split layer j into counts[j] equal subregions and flag each against the
/// reference with relative tolerance eps_mat (in (0,1)).
DiscretizedCell discretize(const UnitCell& cell, std::span<const int> counts,
                           const ReferenceMedium& ref, double eps_mat = 1e-9);
DiscretizedCell discretize(const UnitCell& cell, std::initializer_list<int> counts,
                           const ReferenceMedium& ref, double eps_mat = 1e-9);

}  // namespace dynhomog

#endif
