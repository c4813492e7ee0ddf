#ifndef DYNHOMOG_TESTS_FIXTURES_HPP
#define DYNHOMOG_TESTS_FIXTURES_HPP

#include <cstdint>
#include <vector>

#include "dynhomog/cell.hpp"

namespace dynhomog::testing {

// Strong-contrast bilayer used across the suites: impedance ratio 8,
// speeds 1 and 2, period 1.
inline UnitCell test_bilayer() {
  return build_cell({{1.0, 1.0, 0.5}, {4.0, 1.0 / 16.0, 0.5}});
}

// Mirror-symmetric five-layer cell (outer halves are the same matrix
// material): matrix | compliant | heavy | compliant | matrix.
inline UnitCell symmetric_cell() {
  return build_cell({{3.0, 0.25, 0.2},
                     {1.0, 1.0, 0.2},
                     {8.0, 1.0 / 16.0, 0.2},
                     {1.0, 1.0, 0.2},
                     {3.0, 0.25, 0.2}});
}

// Asymmetric variant: the two compliant layers flanking the heavy core are
// different materials; outer halves are the matrix whose properties serve as
// the reference, so only the central three layers are heterogeneous.
inline UnitCell asymmetric_cell() {
  return build_cell({{4.0, 0.05, 0.15},
                     {1.0, 1.0, 0.2},
                     {8.0, 0.02, 0.3},
                     {1.5, 0.5, 0.2},
                     {4.0, 0.05, 0.15}});
}

// Tiny deterministic generator for property-style tests.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

// Random layered cell with moderate contrast; period is not normalized so
// unit handling gets exercised.
inline UnitCell random_cell(Rng& rng, int max_layers = 4) {
  const int n = rng.uniform_int(2, max_layers);
  std::vector<LayerSpec> specs;
  for (int i = 0; i < n; ++i) {
    specs.push_back({rng.uniform(0.5, 6.0), rng.uniform(0.08, 3.0),
                     rng.uniform(0.2, 1.2)});
  }
  return build_cell(std::span<const LayerSpec>(specs.data(), specs.size()));
}

inline std::vector<int> random_counts(Rng& rng, const UnitCell& cell,
                                      int max_per_layer = 5) {
  std::vector<int> counts(cell.layer_count());
  for (int& c : counts) c = rng.uniform_int(1, max_per_layer);
  return counts;
}

}  // namespace dynhomog::testing

#endif
