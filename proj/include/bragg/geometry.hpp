// Point sets in R^d: lattice, model-set and composite generators, and the
// discreteness / denseness predicates (minimum gap, covering radius,
// weak uniform discreteness, difference sets, windowed Meyer check).
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bragg/core.hpp"

namespace bragg {

// ---------------------------------------------------------------------------
// Generators

/// Tagged description of how a point set was built. Realizing a generator in
/// a window reproduces the windowed point set, so predicates can be
/// re-evaluated at several scales.
struct Generator {
  enum class Kind { explicit_list, lattice, model_set, union_of, translate, scale };

  Kind kind = Kind::explicit_list;
  Eigen::MatrixXd basis;  // lattice basis (columns) or model-set embedding
  double internal_lo = 0, internal_hi = 0;
  Point shift;
  double factor = 1.0;
  std::vector<Generator> parts;
  std::vector<Point> points;  // explicit_list only
  std::string label;

  static Generator explicit_points(std::vector<Point> pts, std::string label = "explicit") {
    Generator g;
    g.kind = Kind::explicit_list;
    g.points = std::move(pts);
    g.label = std::move(label);
    return g;
  }
  static Generator lattice(Eigen::MatrixXd b, std::string label = "lattice") {
    Generator g;
    g.kind = Kind::lattice;
    g.basis = std::move(b);
    g.label = std::move(label);
    return g;
  }
  static Generator model_set(Eigen::MatrixXd embedding, double lo, double hi, std::string label = "model_set") {
    Generator g;
    g.kind = Kind::model_set;
    g.basis = std::move(embedding);
    g.internal_lo = lo;
    g.internal_hi = hi;
    g.label = std::move(label);
    return g;
  }
};

inline const char* kind_name(Generator::Kind k) {
  switch (k) {
    case Generator::Kind::explicit_list: return "explicit";
    case Generator::Kind::lattice: return "lattice";
    case Generator::Kind::model_set: return "model_set";
    case Generator::Kind::union_of: return "union";
    case Generator::Kind::translate: return "translate";
    case Generator::Kind::scale: return "scale";
  }
  return "explicit";
}

/// Embedding of the Fibonacci chain: generators (1,1) and (tau,-1/tau),
/// internal window [-1, tau-1). Gaps are tau and 1.
inline Generator fibonacci_generator() {
  Eigen::MatrixXd e(2, 2);
  e << 1.0, kGolden, 1.0, -1.0 / kGolden;
  return Generator::model_set(e, -1.0, kGolden - 1.0, "fibonacci");
}

// ---------------------------------------------------------------------------
// PointSet

struct PointSet {
  int dim = 1;
  std::vector<Point> points;  // sorted lexicographically, merged at tol()
  Box window;
  Generator generator;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  double tol() const { return merge_tolerance(window); }

  /// Builds a canonical set: keeps points inside `window` (within the merge
  /// tolerance), merges near-duplicates and sorts.
  static PointSet make(int dim, std::span<const Point> pts, const Box& window, Generator gen) {
    require(window.dim() == dim, "window dimension does not match point dimension");
    PointSet ps;
    ps.dim = dim;
    ps.window = window;
    ps.generator = std::move(gen);
    PointIndex idx(dim, ps.tol());
    for (const auto& p : pts) {
      require(p.dim == dim, "point dimension mismatch");
      for (int i = 0; i < dim; ++i) require(std::isfinite(p[i]), "point coordinates must be finite");
      if (window.contains(p, ps.tol())) idx.insert(p);
    }
    ps.points = idx.points();
    std::sort(ps.points.begin(), ps.points.end(), lex_less);
    return ps;
  }

  static PointSet from_points(int dim, std::vector<Point> pts, const Box& window) {
    auto gen = Generator::explicit_points(pts);
    return make(dim, pts, window, std::move(gen));
  }

  bool contains(const Point& p) const {
    if (dim == 1) {
      const double t = tol();
      auto it = std::lower_bound(points.begin(), points.end(), p[0] - t,
                                 [](const Point& a, double v) { return a[0] < v; });
      return it != points.end() && std::abs((*it)[0] - p[0]) <= t;
    }
    for (const auto& q : points)
      if (max_abs(q - p) <= tol()) return true;
    return false;
  }
};

/// Membership oracle for repeated lookups in d >= 2 (hash based).
class PointLookup {
public:
  explicit PointLookup(const PointSet& ps) : idx_(ps.dim, ps.tol()) {
    for (const auto& p : ps.points) idx_.insert(p);
  }
  bool contains(const Point& p) const { return idx_.find(p) >= 0; }

private:
  PointIndex idx_;
};

// ---------------------------------------------------------------------------
// Generators -> point sets

namespace detail {

template <class F>
void for_each_integer_vector(const std::vector<long>& lo, const std::vector<long>& hi, F&& f) {
  const std::size_t d = lo.size();
  std::vector<long> m = lo;
  while (true) {
    f(m);
    std::size_t i = 0;
    while (i < d) {
      if (++m[i] <= hi[i]) break;
      m[i] = lo[i];
      ++i;
    }
    if (i == d) return;
  }
}

/// Integer ranges covering Binv * (box corners).
inline void integer_bounds(const Eigen::MatrixXd& inv, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                           std::vector<long>& mlo, std::vector<long>& mhi, double cap = 5e7) {
  const int d = static_cast<int>(lo.size());
  const int k = static_cast<int>(inv.rows());
  Eigen::VectorXd mn = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::infinity());
  Eigen::VectorXd mx = -mn;
  for (int c = 0; c < (1 << d); ++c) {
    Eigen::VectorXd corner(d);
    for (int i = 0; i < d; ++i) corner[i] = (c >> i & 1) ? hi[i] : lo[i];
    Eigen::VectorXd m = inv * corner;
    mn = mn.cwiseMin(m);
    mx = mx.cwiseMax(m);
  }
  mlo.resize(k);
  mhi.resize(k);
  double total = 1;
  for (int i = 0; i < k; ++i) {
    mlo[i] = static_cast<long>(std::floor(mn[i])) - 1;
    mhi[i] = static_cast<long>(std::ceil(mx[i])) + 1;
    total *= static_cast<double>(mhi[i] - mlo[i] + 1);
  }
  require(total <= cap, "window too large for lattice enumeration");
}

inline void require_nonsingular(const Eigen::MatrixXd& b, const char* what) {
  require(b.rows() == b.cols() && b.rows() >= 1 && b.rows() <= kMaxDim, std::string(what) + ": basis must be square d x d");
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  const double det = b.determinant();
  require(std::isfinite(det) && std::abs(det) > 1e-12 * std::pow(scale, static_cast<double>(b.rows())),
          std::string(what));
}

}  // namespace detail

/// {B m : m in Z^d} intersected with `window`; columns of `basis` generate.
inline PointSet generate_lattice(const Eigen::MatrixXd& basis, const Box& window) {
  detail::require_nonsingular(basis, "degenerate lattice");
  const int d = static_cast<int>(basis.rows());
  require(window.dim() == d, "window dimension does not match basis");
  const Eigen::MatrixXd inv = basis.inverse();
  Eigen::VectorXd lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = window.lo[i];
    hi[i] = window.hi[i];
  }
  std::vector<long> mlo, mhi;
  detail::integer_bounds(inv, lo, hi, mlo, mhi);
  std::vector<Point> pts;
  const double tol = merge_tolerance(window);
  detail::for_each_integer_vector(mlo, mhi, [&](const std::vector<long>& m) {
    Point p(d);
    for (int r = 0; r < d; ++r) {
      double s = 0;
      for (int c = 0; c < d; ++c) s += basis(r, c) * static_cast<double>(m[c]);
      p[r] = s;
    }
    if (window.contains(p, tol)) pts.push_back(p);
  });
  return PointSet::make(d, pts, window, Generator::lattice(basis));
}

/// Cut-and-project set with one physical and one internal dimension.
/// Row 0 of `embedding` is the physical projection, row 1 the internal one.
/// The internal window is [lo, hi) (closed when lo == hi).
inline PointSet generate_model_set(const Eigen::MatrixXd& embedding, double internal_lo, double internal_hi,
                                   const Box& physical_window) {
  require(embedding.rows() == 2 && embedding.cols() == 2, "model set embedding must be 2 x 2");
  detail::require_nonsingular(embedding, "degenerate model set embedding");
  require(internal_lo <= internal_hi, "internal window must be nonempty");
  require(physical_window.dim() == 1, "model sets are generated in one physical dimension");
  const double enlarge = embedding.norm();
  const Eigen::MatrixXd inv = embedding.inverse();
  Eigen::VectorXd lo(2), hi(2);
  lo << physical_window.lo[0] - enlarge, internal_lo;
  hi << physical_window.hi[0] + enlarge, internal_hi;
  std::vector<long> mlo, mhi;
  detail::integer_bounds(inv, lo, hi, mlo, mhi, std::numeric_limits<double>::infinity());
  require(mhi[0] - mlo[0] <= 50'000'000, "window too large for model set enumeration");
  const double itol = 1e-12 * std::max(1.0, std::max(std::abs(internal_lo), std::abs(internal_hi)));
  const bool degenerate = internal_lo == internal_hi;
  const double tol = merge_tolerance(physical_window);
  std::vector<Point> pts;
  // For each m0 the admissible m1 form an interval; when the physical
  // coordinate ignores m1, one hit per m0 is enough.
  const bool phys_ignores_b = embedding(0, 1) == 0.0;
  for (long a_i = mlo[0]; a_i <= mhi[0]; ++a_i) {
    const double a = static_cast<double>(a_i);
    double blo = static_cast<double>(mlo[1]), bhi = static_cast<double>(mhi[1]);
    for (int r = 0; r < 2; ++r) {
      const double e1 = embedding(r, 1);
      if (e1 == 0.0) continue;
      double u = (lo[r] - embedding(r, 0) * a) / e1, v = (hi[r] - embedding(r, 0) * a) / e1;
      if (u > v) std::swap(u, v);
      blo = std::max(blo, std::floor(u) - 1);
      bhi = std::min(bhi, std::ceil(v) + 1);
    }
    for (double b = blo; b <= bhi; b += 1.0) {
      const double phys = embedding(0, 0) * a + embedding(0, 1) * b;
      const double star = embedding(1, 0) * a + embedding(1, 1) * b;
      const bool in_window =
          degenerate ? std::abs(star - internal_lo) <= itol : (star >= internal_lo - itol && star < internal_hi - itol);
      if (in_window && physical_window.contains(Point{phys}, tol)) {
        pts.push_back(Point{phys});
        if (phys_ignores_b) break;
      }
    }
  }
  return PointSet::make(1, pts, physical_window, Generator::model_set(embedding, internal_lo, internal_hi));
}

inline PointSet generate_fibonacci(const Box& window) {
  auto g = fibonacci_generator();
  auto ps = generate_model_set(g.basis, g.internal_lo, g.internal_hi, window);
  ps.generator.label = "fibonacci";
  return ps;
}

// Composition -----------------------------------------------------------------

inline PointSet union_of(std::span<const PointSet> inputs) {
  require(!inputs.empty(), "union needs at least one input");
  const int d = inputs[0].dim;
  Box w = inputs[0].window;
  Generator g;
  g.kind = Generator::Kind::union_of;
  g.label = "union";
  std::vector<Point> all;
  for (const auto& ps : inputs) {
    require(ps.dim == d, "dimension mismatch in union");
    w = w.hull(ps.window);
    all.insert(all.end(), ps.points.begin(), ps.points.end());
    g.parts.push_back(ps.generator);
  }
  return PointSet::make(d, all, w, std::move(g));
}

inline PointSet union_of(const PointSet& a, const PointSet& b) {
  const std::vector<PointSet> v{a, b};
  return union_of(v);
}

inline PointSet translate(const PointSet& ps, const Point& v) {
  require(v.dim == ps.dim, "dimension mismatch in translate");
  Generator g;
  g.kind = Generator::Kind::translate;
  g.shift = v;
  g.parts = {ps.generator};
  g.label = "translate";
  std::vector<Point> pts;
  pts.reserve(ps.size());
  for (const auto& p : ps.points) pts.push_back(p + v);
  return PointSet::make(ps.dim, pts, ps.window.translated(v), std::move(g));
}

inline PointSet scale(const PointSet& ps, double c) {
  require(c != 0.0 && std::isfinite(c), "scale factor must be nonzero");
  Generator g;
  g.kind = Generator::Kind::scale;
  g.factor = c;
  g.parts = {ps.generator};
  g.label = "scale";
  std::vector<Point> pts;
  pts.reserve(ps.size());
  for (const auto& p : ps.points) pts.push_back(p * c);
  return PointSet::make(ps.dim, pts, ps.window.scaled(c), std::move(g));
}

inline int generator_dim(const Generator& g) {
  switch (g.kind) {
    case Generator::Kind::explicit_list: return g.points.empty() ? 1 : g.points.front().dim;
    case Generator::Kind::lattice: return static_cast<int>(g.basis.rows());
    case Generator::Kind::model_set: return 1;
    case Generator::Kind::translate: return g.shift.dim;
    default: return g.parts.empty() ? 1 : generator_dim(g.parts.front());
  }
}

/// Re-generates the set described by `g` inside `window`.
inline PointSet realize(const Generator& g, const Box& window) {
  const int d = window.dim();
  switch (g.kind) {
    case Generator::Kind::explicit_list: {
      auto ps = PointSet::make(d, g.points, window, g);
      return ps;
    }
    case Generator::Kind::lattice: {
      auto ps = generate_lattice(g.basis, window);
      ps.generator = g;
      return ps;
    }
    case Generator::Kind::model_set: {
      auto ps = generate_model_set(g.basis, g.internal_lo, g.internal_hi, window);
      ps.generator = g;
      return ps;
    }
    case Generator::Kind::union_of: {
      std::vector<PointSet> parts;
      for (const auto& p : g.parts) parts.push_back(realize(p, window));
      auto ps = union_of(parts);
      ps.window = window;
      ps.generator = g;
      return ps;
    }
    case Generator::Kind::translate: {
      require(g.parts.size() == 1, "translate generator needs one part");
      auto inner = realize(g.parts[0], window.translated(-g.shift));
      std::vector<Point> pts;
      for (const auto& p : inner.points) pts.push_back(p + g.shift);
      return PointSet::make(d, pts, window, g);
    }
    case Generator::Kind::scale: {
      require(g.parts.size() == 1, "scale generator needs one part");
      auto inner = realize(g.parts[0], window.scaled(1.0 / g.factor));
      std::vector<Point> pts;
      for (const auto& p : inner.points) pts.push_back(p * g.factor);
      return PointSet::make(d, pts, window, g);
    }
  }
  throw Error("unknown generator kind");
}

// ---------------------------------------------------------------------------
// Predicates

/// Minimum pairwise distance.
inline double min_gap(const PointSet& ps) {
  require(ps.size() >= 2, "insufficient points");
  std::vector<Point> pts = ps.points;  // already sorted by first coordinate
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size() && pts[j][0] - pts[i][0] < best; ++j)
      best = std::min(best, distance(pts[i], pts[j]));
  return best;
}

namespace detail {

/// Nearest-point distance over points sorted by first coordinate.
inline double nearest_distance(std::span<const Point> sorted, const Point& q) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), q[0], [](const Point& a, double v) { return a[0] < v; });
  double best = std::numeric_limits<double>::infinity();
  for (auto r = it; r != sorted.end() && (*r)[0] - q[0] < best; ++r) best = std::min(best, distance(*r, q));
  for (auto l = it; l != sorted.begin();) {
    --l;
    if (q[0] - (*l)[0] >= best) break;
    best = std::min(best, distance(*l, q));
  }
  return best;
}

/// Node-centred sample grid over `box` with spacing at most h.
inline std::vector<Point> sample_grid(const Box& box, double h) {
  const int d = box.dim();
  std::vector<long> n(d);
  std::vector<double> step(d);
  double total = 1;
  for (int i = 0; i < d; ++i) {
    n[i] = std::max<long>(1, static_cast<long>(std::ceil(box.side(i) / h)));
    step[i] = box.side(i) / static_cast<double>(n[i]);
    total *= static_cast<double>(n[i] + 1);
  }
  require(total <= 2e7, "covering-radius sample grid too large; lower the sample density");
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<long> lo(d, 0);
  for_each_integer_vector(lo, n, [&](const std::vector<long>& m) {
    Point p(d);
    for (int i = 0; i < d; ++i) p[i] = box.lo[i] + step[i] * static_cast<double>(m[i]);
    out.push_back(p);
  });
  return out;
}

inline double max_nearest(std::span<const Point> sorted, const Box& region, double h) {
  const auto grid = sample_grid(region, h);
  std::vector<double> dist(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { dist[i] = nearest_distance(sorted, grid[i]); });
  return dist.empty() ? 0.0 : *std::max_element(dist.begin(), dist.end());
}

}  // namespace detail

/// Largest distance from a sample point of the window to the set. Sampling
/// is restricted to the window shrunk by the current estimate so the missing
/// points beyond the window do not inflate the result.
inline double covering_radius(const PointSet& ps, double sample_density) {
  require(sample_density > 0, "sample density must be positive");
  if (ps.empty()) return std::numeric_limits<double>::infinity();
  const double h = 1.0 / sample_density;
  double r = detail::max_nearest(ps.points, ps.window, h);
  for (int it = 0; it < 4; ++it) {
    Box inner;
    if (!ps.window.shrunk(r, inner)) break;
    const double next = detail::max_nearest(ps.points, inner, h);
    const bool settled = std::abs(next - r) <= h;
    r = next;
    if (settled) break;
  }
  return r;
}

namespace detail {

struct Weighted {
  Point x;
  double w;
};

/// max over translates t of sum of weights in t + box with the given side
/// lengths. Exact: an optimal closed box can always be slid until each lower
/// face touches a point.
inline double max_box_mass(std::vector<Weighted> pts, const std::array<double, kMaxDim>& sides, int axis, int dim,
                           double tol) {
  if (pts.empty()) return 0.0;
  std::sort(pts.begin(), pts.end(), [axis](const Weighted& a, const Weighted& b) { return a.x[axis] < b.x[axis]; });
  const double len = sides[axis] + tol;
  double best = 0;
  if (axis == dim - 1) {
    double s = 0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      while (j < pts.size() && pts[j].x[axis] - pts[i].x[axis] <= len) s += pts[j++].w;
      best = std::max(best, s);
      s -= pts[i].w;
    }
    return best;
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0 && pts[i].x[axis] - pts[i - 1].x[axis] <= tol) continue;
    std::vector<Weighted> strip;
    for (std::size_t j = i; j < pts.size() && pts[j].x[axis] - pts[i].x[axis] <= len; ++j) strip.push_back(pts[j]);
    best = std::max(best, max_box_mass(std::move(strip), sides, axis + 1, dim, tol));
  }
  return best;
}

}  // namespace detail

/// Largest number of points of `ps` in any translate of `k_box`.
inline std::size_t weak_ud_count(const PointSet& ps, const Box& k_box) {
  require(k_box.volume() > 0, "k_box must have positive volume");
  if (ps.empty()) return 0;
  require(k_box.dim() == ps.dim, "k_box dimension mismatch");
  std::vector<detail::Weighted> pts;
  for (const auto& p : ps.points) pts.push_back({p, 1.0});
  std::array<double, kMaxDim> sides{};
  for (int i = 0; i < ps.dim; ++i) sides[i] = k_box.side(i);
  return static_cast<std::size_t>(std::llround(detail::max_box_mass(std::move(pts), sides, 0, ps.dim, ps.tol())));
}

inline constexpr double kDefaultPairBudget = 1e8;

/// {x - y : x, y in ps} intersected with out_window. Differences closer
/// than `resolution` are merged (default: the merge tolerance of out_window).
inline PointSet difference_set(const PointSet& ps, const Box& out_window, double pair_budget = kDefaultPairBudget,
                               double resolution = 0) {
  require(out_window.dim() == ps.dim, "out_window dimension mismatch");
  require(static_cast<double>(ps.size()) * static_cast<double>(ps.size()) <= pair_budget,
          "difference set exceeds the pair budget; reduce the window");
  const double tol = std::max(resolution, merge_tolerance(out_window));
  PointIndex idx(ps.dim, tol);
  const auto& pts = ps.points;  // sorted by first coordinate
  for (const auto& x : pts) {
    // y[0] in [x[0] - hi0, x[0] - lo0]
    auto first = std::lower_bound(pts.begin(), pts.end(), x[0] - out_window.hi[0] - tol,
                                  [](const Point& a, double v) { return a[0] < v; });
    for (auto it = first; it != pts.end() && (*it)[0] <= x[0] - out_window.lo[0] + tol; ++it) {
      const Point z = x - *it;
      if (out_window.contains(z, tol)) idx.insert(z);
    }
  }
  Generator g = Generator::explicit_points({}, "difference_set");
  auto out = PointSet::make(ps.dim, idx.points(), out_window, g);
  out.generator.points = out.points;
  return out;
}

// ---------------------------------------------------------------------------
// Van Hove boxes

/// Nested centred cubes A_n = [-s_n, s_n]^d with s strictly increasing.
struct VanHoveFamily {
  int dim = 1;
  std::vector<double> half_widths;

  VanHoveFamily() = default;
  VanHoveFamily(int d, std::vector<double> s) : dim(d), half_widths(std::move(s)) {
    require(d >= 1 && d <= kMaxDim, "family dimension must be 1, 2 or 3");
    require(!half_widths.empty(), "family needs at least one box");
    for (std::size_t i = 0; i < half_widths.size(); ++i) {
      require(half_widths[i] > 0, "family half-widths must be positive");
      if (i > 0) require(half_widths[i] > half_widths[i - 1], "family half-widths must increase strictly");
    }
  }
  /// s_m = s0 * 2^m, m = 0..count-1.
  static VanHoveFamily geometric(int d, double s0, int count) {
    std::vector<double> s;
    for (int m = 0; m < count; ++m) s.push_back(s0 * std::ldexp(1.0, m));
    return VanHoveFamily(d, s);
  }
  std::size_t size() const { return half_widths.size(); }
  Box box(std::size_t n) const { return Box::cube(dim, half_widths.at(n)); }
  Box largest() const { return box(size() - 1); }
};

/// Boxes sharing the centre of `w`, with sides scaled by each factor.
inline std::vector<Box> nested_scales(const Box& w, std::initializer_list<double> factors = {0.25, 0.5, 1.0}) {
  const Point c = w.center();
  std::vector<Box> out;
  for (double f : factors) {
    Point l = c, h = c;
    for (int a = 0; a < w.dim(); ++a) {
      l[a] -= f * 0.5 * w.side(a);
      h[a] += f * 0.5 * w.side(a);
    }
    out.emplace_back(l, h);
  }
  return out;
}

namespace detail {
inline double unit_ball_volume(int k) {
  switch (k) {
    case 0: return 1.0;
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
  }
  return 0.0;
}
}  // namespace detail

/// |boundary_R A_n| / |A_n| for the Euclidean distance. The outer shell uses
/// the Steiner formula for boxes, vol(B + R ball) = sum_j e_j(sides)
/// kappa_{d-j} R^{d-j}; the inner shell is B minus the box shrunk by R.
inline double van_hove_ratio(const VanHoveFamily& family, double R, std::size_t n) {
  require(R > 0, "R must be positive");
  require(n < family.size(), "family index out of range");
  const int d = family.dim;
  const double side = 2.0 * family.half_widths[n];
  const double vol = std::pow(side, d);
  // elementary symmetric polynomials of d equal sides: C(d,j) side^j
  double outer = 0;
  double binom = 1;
  for (int j = 0; j < d; ++j) {
    outer += binom * std::pow(side, j) * detail::unit_ball_volume(d - j) * std::pow(R, d - j);
    binom = binom * (d - j) / (j + 1);
  }
  const double inner = vol - std::pow(std::max(0.0, side - 2.0 * R), d);
  return (outer + inner) / vol;
}

// ---------------------------------------------------------------------------
// Meyer check

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct MeyerReport {
  std::vector<double> half_widths;
  std::vector<double> covering_radii;
  std::vector<std::size_t> point_counts;
  std::vector<std::size_t> diff_set_counts;
  bool relatively_dense = false;
  bool radius_diverges = false;
  bool counts_bounded = false;
  bool counts_grow = false;
  std::size_t constant = 0;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> witnesses;
  /// Finite windows can only give evidence, never a proof.
  bool windowed_evidence = true;
};

struct MeyerOptions {
  double sample_density = 20.0;
  double pair_budget = kDefaultPairBudget;
  double resolution = 0;  // position uncertainty of the points; differences merge at twice this
};

/// Windowed Meyer test: relative denseness from covering radii and weak
/// uniform discreteness of the difference set, both across growing windows.
/// Counts must plateau exactly after the first scale.
inline MeyerReport meyer_check(const std::function<PointSet(const Box&)>& realize_in, std::span<const Box> scales,
                               const Box& k_box, const MeyerOptions& opt = {}) {
  require(scales.size() >= 3, "meyer_check needs at least three window scales");
  MeyerReport rep;
  const double h = 1.0 / opt.sample_density;
  for (const auto& w : scales) {
    const auto ps = realize_in(w);
    rep.half_widths.push_back(w.min_half_width());
    rep.point_counts.push_back(ps.size());
    rep.covering_radii.push_back(covering_radius(ps, opt.sample_density));
    const auto diff = difference_set(ps, w.difference_box(), opt.pair_budget, 2 * opt.resolution);
    rep.diff_set_counts.push_back(weak_ud_count(diff, k_box));
  }
  const auto& r = rep.covering_radii;
  const auto& hw = rep.half_widths;
  const auto& c = rep.diff_set_counts;
  const std::size_t n = scales.size();

  bool stable = std::isfinite(r[1]);
  for (std::size_t i = 1; i < n; ++i) stable = stable && std::isfinite(r[i]) && std::abs(r[i] - r[1]) <= 2 * h + 0.1 * r[1];
  stable = stable && r.back() <= 0.25 * hw.back();
  bool proportional = true, increasing = true;
  for (std::size_t i = 0; i < n; ++i) {
    proportional = proportional && (!std::isfinite(r[i]) || r[i] >= 0.4 * hw[i]);
    if (i > 0) increasing = increasing && r[i] > r[i - 1];
  }
  rep.relatively_dense = stable;
  rep.radius_diverges = proportional || (increasing && r.back() >= 2 * r.front());

  bool plateau = c[0] <= c[1];
  bool nondecreasing = true;
  for (std::size_t i = 1; i < n; ++i) {
    plateau = plateau && c[i] == c[1];
    nondecreasing = nondecreasing && c[i] >= c[i - 1];
  }
  rep.counts_bounded = plateau;
  rep.counts_grow = nondecreasing && c.back() > c[1];
  rep.constant = *std::max_element(c.begin(), c.end());

  std::ostringstream os;
  if (rep.radius_diverges) {
    os << "covering radius " << r.back() << " at half-width " << hw.back() << " (ratio " << r.back() / hw.back()
       << ") grows with the window";
    rep.witnesses.push_back(os.str());
    os.str("");
  }
  if (rep.counts_grow) {
    os << "difference-set count in k_box rose from " << c[1] << " to " << c.back();
    rep.witnesses.push_back(os.str());
  }
  if (rep.relatively_dense && rep.counts_bounded)
    rep.verdict = Verdict::pass;
  else if (rep.radius_diverges || rep.counts_grow)
    rep.verdict = Verdict::fail;
  else
    rep.verdict = Verdict::inconclusive;
  return rep;
}

inline MeyerReport meyer_check(const Generator& gen, std::span<const Box> scales, const Box& k_box,
                               const MeyerOptions& opt = {}) {
  return meyer_check([&gen](const Box& w) { return realize(gen, w); }, scales, k_box, opt);
}

}  // namespace bragg
