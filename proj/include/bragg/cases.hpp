// Builders for the named example sets and measures.
#pragma once

#include "bragg/geometry.hpp"
#include "bragg/measure.hpp"

namespace bragg::cases {

inline Eigen::MatrixXd diag(std::initializer_list<double> d) {
  Eigen::VectorXd v(static_cast<int>(d.size()));
  int i = 0;
  for (double x : d) v[i++] = x;
  return v.asDiagonal();
}

inline Generator integers() { return Generator::lattice(diag({1.0}), "Z"); }

/// Z union pi Z.
inline Generator z_union_pi_z() {
  Generator g;
  g.kind = Generator::Kind::union_of;
  g.label = "Z+piZ";
  g.parts = {integers(), Generator::lattice(diag({std::numbers::pi}), "piZ")};
  return g;
}

/// Window [-pi N, pi N]: holds pi n for |n| <= N.
inline Box zpz_window(int range) {
  require(range >= 1, "generator range must be at least 1");
  return Box::interval(-std::numbers::pi * range - 1e-9, std::numbers::pi * range + 1e-9);
}

/// delta_Z + delta_{pi Z} on `window` (weight 2 at the origin).
inline AtomicMeasure zpz_measure(const Box& window) {
  const auto z = dirac_comb(generate_lattice(diag({1.0}), window));
  const auto pz = dirac_comb(generate_lattice(diag({std::numbers::pi}), window));
  return add(z, pz).with_provenance("delta_Z + delta_piZ");
}

/// Z^2 union ((1/2, 0) + Z x pi Z).
inline Generator union2d() {
  Generator shifted;
  shifted.kind = Generator::Kind::translate;
  shifted.shift = Point{0.5, 0.0};
  shifted.parts = {Generator::lattice(diag({1.0, std::numbers::pi}), "ZxpiZ")};
  Generator g;
  g.kind = Generator::Kind::union_of;
  g.label = "union2d";
  g.parts = {Generator::lattice(diag({1.0, 1.0}), "Z2"), shifted};
  return g;
}

/// Z union (1/3 + Z).
inline Generator z_union_third() {
  Generator shifted;
  shifted.kind = Generator::Kind::translate;
  shifted.shift = Point{1.0 / 3.0};
  shifted.parts = {integers()};
  Generator g;
  g.kind = Generator::Kind::union_of;
  g.label = "Z+(1/3+Z)";
  g.parts = {integers(), shifted};
  return g;
}

}  // namespace bragg::cases
