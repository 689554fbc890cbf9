// Atomic measures on R^d: Dirac combs and the measure calculus used by the
// positive-definiteness and diffraction code (support function, total
// variation, reflection, convolution, weighting, translation bound,
// restriction to closed subgroups).
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bragg/core.hpp"
#include "bragg/geometry.hpp"

namespace bragg {

struct Atom {
  Point x;
  cplx w;
};

/// Finite list of weighted atoms, merged at the tolerance and sorted. The
/// window is the region on which the atoms are a faithful truncation of the
/// (possibly infinite) measure they stand for.
class AtomicMeasure {
public:
  AtomicMeasure() = default;

  /// Accumulates atoms whose locations agree within `tol` (default: the
  /// merge tolerance of `window`). Atoms with exactly zero weight are dropped.
  static AtomicMeasure from_atoms(int dim, const Box& window, std::span<const Atom> atoms, double tol = -1,
                                  std::string provenance = {}) {
    require(window.dim() == dim, "window dimension does not match measure dimension");
    AtomicMeasure m;
    m.dim_ = dim;
    m.window_ = window;
    m.tol_ = tol > 0 ? tol : merge_tolerance(window);
    m.provenance_ = std::move(provenance);
    PointIndex idx(dim, m.tol_);
    std::vector<cplx> w;
    for (const auto& a : atoms) {
      require(a.x.dim == dim, "atom dimension mismatch");
      require(std::isfinite(a.w.real()) && std::isfinite(a.w.imag()), "atom weights must be finite");
      bool fresh = false;
      const long id = idx.insert(a.x, &fresh);
      if (fresh) w.push_back(a.w);
      else w[static_cast<std::size_t>(id)] += a.w;
    }
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] != cplx{}) m.atoms_.push_back({idx.points()[i], w[i]});
    m.finish();
    return m;
  }

  static AtomicMeasure zero(int dim, const Box& window) { return from_atoms(dim, window, {}); }

  int dim() const { return dim_; }
  const Box& window() const { return window_; }
  double tol() const { return tol_; }
  const std::string& provenance() const { return provenance_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  /// mu({x}): weight of the atom at x, or 0.
  cplx at(const Point& x) const {
    const long id = index_.find(x);
    return id < 0 ? cplx{} : atoms_[static_cast<std::size_t>(id)].w;
  }

  AtomicMeasure with_provenance(std::string p) const {
    AtomicMeasure m = *this;
    m.provenance_ = std::move(p);
    return m;
  }

private:
  void finish() {
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return lex_less(a.x, b.x); });
    index_ = PointIndex(dim_, tol_);
    for (const auto& a : atoms_) index_.insert(a.x);
  }

  int dim_ = 1;
  Box window_ = Box::interval(-1, 1);
  double tol_ = 0;
  std::string provenance_;
  std::vector<Atom> atoms_;
  PointIndex index_;
};

// ---------------------------------------------------------------------------

inline AtomicMeasure dirac_comb(const PointSet& ps, const std::function<cplx(const Point&)>& weight) {
  std::vector<Atom> atoms;
  atoms.reserve(ps.size());
  for (const auto& p : ps.points) atoms.push_back({p, weight(p)});
  return AtomicMeasure::from_atoms(ps.dim, ps.window, atoms, -1, "dirac_comb:" + ps.generator.label);
}

inline AtomicMeasure dirac_comb(const PointSet& ps, cplx weight = 1.0) {
  return dirac_comb(ps, [weight](const Point&) { return weight; });
}

/// The point set carried by the atoms of a measure.
inline PointSet support(const AtomicMeasure& mu) {
  std::vector<Point> pts;
  for (const auto& a : mu.atoms()) pts.push_back(a.x);
  return PointSet::from_points(mu.dim(), pts, mu.window());
}

inline cplx support_value(const AtomicMeasure& mu, const Point& x) { return mu.at(x); }

namespace detail {
inline std::optional<Box> intersect(const Box& a, const Box& b) {
  Point l = a.lo, h = a.hi;
  for (int i = 0; i < a.dim(); ++i) {
    l[i] = std::max(a.lo[i], b.lo[i]);
    h[i] = std::min(a.hi[i], b.hi[i]);
    if (!(l[i] < h[i])) return std::nullopt;
  }
  return Box(l, h);
}
}  // namespace detail

/// mu + nu; the result is faithful on the intersection of the windows.
inline AtomicMeasure add(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  require(mu.dim() == nu.dim(), "dimension mismatch in measure sum");
  const Box w = detail::intersect(mu.window(), nu.window()).value_or(mu.window().hull(nu.window()));
  std::vector<Atom> atoms = mu.atoms();
  atoms.insert(atoms.end(), nu.atoms().begin(), nu.atoms().end());
  return AtomicMeasure::from_atoms(mu.dim(), w, atoms, -1, "sum");
}

inline AtomicMeasure total_variation(const AtomicMeasure& mu) {
  std::vector<Atom> atoms;
  for (const auto& a : mu.atoms()) atoms.push_back({a.x, std::abs(a.w)});
  return AtomicMeasure::from_atoms(mu.dim(), mu.window(), atoms, mu.tol(), "total_variation");
}

/// (x, w) -> (-x, conj w)
inline AtomicMeasure reflect(const AtomicMeasure& mu) {
  std::vector<Atom> atoms;
  for (const auto& a : mu.atoms()) atoms.push_back({-a.x, std::conj(a.w)});
  return AtomicMeasure::from_atoms(mu.dim(), mu.window().scaled(-1.0), atoms, mu.tol(), "reflect");
}

inline AtomicMeasure weight_by(const AtomicMeasure& mu, const std::function<cplx(const Point&)>& h) {
  std::vector<Atom> atoms;
  for (const auto& a : mu.atoms()) {
    const cplx v = h(a.x);
    require(std::isfinite(v.real()) && std::isfinite(v.imag()), "weight function must be bounded on the atoms");
    atoms.push_back({a.x, v * a.w});
  }
  return AtomicMeasure::from_atoms(mu.dim(), mu.window(), atoms, mu.tol(), "weighted");
}

inline AtomicMeasure scale_weights(const AtomicMeasure& mu, cplx c) {
  return weight_by(mu, [c](const Point&) { return c; });
}

/// mu restricted to a box (atoms inside, window = box).
inline AtomicMeasure restrict_to_box(const AtomicMeasure& mu, const Box& box) {
  require(box.dim() == mu.dim(), "box dimension mismatch");
  std::vector<Atom> atoms;
  for (const auto& a : mu.atoms())
    if (box.contains(a.x, mu.tol())) atoms.push_back(a);
  return AtomicMeasure::from_atoms(mu.dim(), box, atoms, mu.tol(), "restricted");
}

inline constexpr double kDefaultConvolutionBudget = 1e8;

/// Atoms at x + y with weight w_x w_y, accumulated and clipped to out_window.
inline AtomicMeasure convolve(const AtomicMeasure& mu, const AtomicMeasure& nu, const Box& out_window,
                              double budget = kDefaultConvolutionBudget) {
  require(mu.dim() == nu.dim() && out_window.dim() == mu.dim(), "dimension mismatch in convolution");
  require(static_cast<double>(mu.size()) * static_cast<double>(nu.size()) <= budget,
          "convolution exceeds the pair budget; reduce the window");
  const double tol = merge_tolerance(out_window);
  PointIndex idx(mu.dim(), tol);
  std::vector<cplx> w;
  for (const auto& a : mu.atoms())
    for (const auto& b : nu.atoms()) {
      const Point z = a.x + b.x;
      if (!out_window.contains(z, tol)) continue;
      bool fresh = false;
      const long id = idx.insert(z, &fresh);
      if (fresh) w.push_back(a.w * b.w);
      else w[static_cast<std::size_t>(id)] += a.w * b.w;
    }
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < w.size(); ++i) atoms.push_back({idx.points()[i], w[i]});
  return AtomicMeasure::from_atoms(mu.dim(), out_window, atoms, tol, "convolution");
}

/// sup_t |mu|(t + k_box), computed exactly over anchored translates.
inline double translation_bound(const AtomicMeasure& mu, const Box& k_box) {
  require(k_box.volume() > 0, "k_box must have positive volume");
  if (mu.empty()) return 0.0;
  require(k_box.dim() == mu.dim(), "k_box dimension mismatch");
  std::vector<detail::Weighted> pts;
  for (const auto& a : mu.atoms()) pts.push_back({a.x, std::abs(a.w)});
  std::array<double, kMaxDim> sides{};
  for (int i = 0; i < mu.dim(); ++i) sides[i] = k_box.side(i);
  return detail::max_box_mass(std::move(pts), sides, 0, mu.dim(), mu.tol());
}

inline bool is_positive(const AtomicMeasure& mu, double tol = 1e-12) {
  double scale = 0;
  for (const auto& a : mu.atoms()) scale = std::max(scale, std::abs(a.w));
  for (const auto& a : mu.atoms())
    if (a.w.real() < -tol * scale || std::abs(a.w.imag()) > tol * std::max(1.0, scale)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Closed subgroups

struct SubgroupSpec {
  enum class Kind { lattice, coordinate_subspace };
  Kind kind = Kind::lattice;
  Eigen::MatrixXd basis;                 // d x k, independent columns
  std::array<bool, kMaxDim> free_axes{};  // coordinate_subspace: axes spanning H
  double tau = -1;                       // membership tolerance; <= 0 selects 1e-8 * diameter

  static SubgroupSpec lattice(Eigen::MatrixXd b, double tau = -1) {
    SubgroupSpec h;
    h.kind = Kind::lattice;
    h.basis = std::move(b);
    h.tau = tau;
    return h;
  }
  static SubgroupSpec subspace(std::array<bool, kMaxDim> axes, double tau = -1) {
    SubgroupSpec h;
    h.kind = Kind::coordinate_subspace;
    h.free_axes = axes;
    h.tau = tau;
    return h;
  }

  double tolerance(const Box& window) const { return tau > 0 ? tau : 1e-8 * window.diameter(); }

  bool contains(const Point& x, double tol) const {
    if (kind == Kind::coordinate_subspace) {
      for (int i = 0; i < x.dim; ++i)
        if (!free_axes[i] && std::abs(x[i]) > tol) return false;
      return true;
    }
    require(basis.rows() == x.dim, "subgroup basis dimension mismatch");
    Eigen::VectorXd v(x.dim);
    for (int i = 0; i < x.dim; ++i) v[i] = x[i];
    const Eigen::VectorXd m = basis.colPivHouseholderQr().solve(v);
    const Eigen::VectorXd r = basis * m.array().round().matrix() - v;
    return r.cwiseAbs().maxCoeff() <= tol;
  }
};

/// mu|_H: keeps exactly the atoms whose location passes the membership test.
inline AtomicMeasure restrict(const AtomicMeasure& mu, const SubgroupSpec& h) {
  if (h.kind == SubgroupSpec::Kind::lattice) {
    require(h.basis.rows() == mu.dim() && h.basis.cols() >= 1 && h.basis.cols() <= mu.dim(),
            "subgroup basis must be d x k with k <= d");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(h.basis);
    require(lu.rank() == h.basis.cols(), "subgroup basis columns must be independent");
  }
  const double tol = std::max(h.tolerance(mu.window()), mu.tol());
  std::vector<Atom> atoms;
  for (const auto& a : mu.atoms())
    if (h.contains(a.x, tol)) atoms.push_back(a);
  return AtomicMeasure::from_atoms(mu.dim(), mu.window(), atoms, mu.tol(), "restricted_to_subgroup");
}

// ---------------------------------------------------------------------------
// Measures with a sampled continuous part

struct DensityGrid {
  Box box;
  double spacing = 0;
  std::vector<cplx> values;  // node-centred samples, row-major in axis order
};

struct SampledMeasure {
  AtomicMeasure atomic;
  std::optional<DensityGrid> density;
};

inline bool is_positive(const SampledMeasure& mu) {
  if (!is_positive(mu.atomic)) return false;
  if (mu.density) {
    require(mu.density->spacing > 0, "density grid spacing must be positive");
    for (const auto& v : mu.density->values)
      if (v.real() < 0 || v.imag() != 0) return false;
  }
  return true;
}

/// The discrete part of a measure: its atoms, with the continuous part dropped.
inline AtomicMeasure pure_point_part(const SampledMeasure& mu) {
  if (mu.density) require(mu.density->spacing > 0, "density grid spacing must be positive");
  return mu.atomic.with_provenance("pure_point_part");
}

}  // namespace bragg
