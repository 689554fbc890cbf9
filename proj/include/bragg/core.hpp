// Basic value types shared by every module: points and boxes in R^d (d <= 3),
// merge tolerances, a tolerance-aware point index and a deterministic
// parallel loop.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

namespace bragg {

inline constexpr int kMaxDim = 3;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kGolden = std::numbers::phi;

/// Relative merge tolerance: points closer than this times the window
/// diameter are the same point.
inline constexpr double kMergeRel = 1e-9;

using cplx = std::complex<double>;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error(what);
}

// ---------------------------------------------------------------------------
// Point

struct Point {
  std::array<double, kMaxDim> x{};
  int dim = 0;

  Point() = default;
  explicit Point(int d) : dim(d) { require(d >= 1 && d <= kMaxDim, "dimension must be 1, 2 or 3"); }
  Point(std::initializer_list<double> c) : dim(static_cast<int>(c.size())) {
    require(dim >= 1 && dim <= kMaxDim, "dimension must be 1, 2 or 3");
    std::copy(c.begin(), c.end(), x.begin());
  }
  static Point from(std::span<const double> c) {
    Point p(static_cast<int>(c.size()));
    std::copy(c.begin(), c.end(), p.x.begin());
    return p;
  }
  static Point zero(int d) { return Point(d); }

  double operator[](int i) const { return x[i]; }
  double& operator[](int i) { return x[i]; }

  Point& operator+=(const Point& o) {
    for (int i = 0; i < dim; ++i) x[i] += o.x[i];
    return *this;
  }
  Point& operator-=(const Point& o) {
    for (int i = 0; i < dim; ++i) x[i] -= o.x[i];
    return *this;
  }
  Point& operator*=(double c) {
    for (int i = 0; i < dim; ++i) x[i] *= c;
    return *this;
  }
  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double c) { return a *= c; }
  friend Point operator*(double c, Point a) { return a *= c; }
  friend Point operator-(Point a) { return a *= -1.0; }
  friend bool operator==(const Point& a, const Point& b) {
    if (a.dim != b.dim) return false;
    for (int i = 0; i < a.dim; ++i)
      if (a.x[i] != b.x[i]) return false;
    return true;
  }
};

inline double dot(const Point& a, const Point& b) {
  double s = 0;
  for (int i = 0; i < a.dim; ++i) s += a.x[i] * b.x[i];
  return s;
}
inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }
inline double max_abs(const Point& a) {
  double m = 0;
  for (int i = 0; i < a.dim; ++i) m = std::max(m, std::abs(a.x[i]));
  return m;
}

/// Lexicographic order, used for canonical sorting of every container.
inline bool lex_less(const Point& a, const Point& b) {
  for (int i = 0; i < a.dim; ++i) {
    if (a.x[i] < b.x[i]) return true;
    if (a.x[i] > b.x[i]) return false;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Box

/// Axis-aligned closed box prod [lo_i, hi_i].
struct Box {
  Point lo, hi;

  Box() = default;
  Box(Point l, Point h) : lo(l), hi(h) {
    require(lo.dim == hi.dim && lo.dim >= 1, "box corners must share a dimension");
    for (int i = 0; i < lo.dim; ++i) {
      require(std::isfinite(lo[i]) && std::isfinite(hi[i]), "box bounds must be finite");
      require(lo[i] < hi[i], "box requires lo < hi on every axis");
    }
  }
  static Box interval(double l, double h) { return Box(Point{l}, Point{h}); }
  static Box cube(int d, double half) {
    Point l(d), h(d);
    for (int i = 0; i < d; ++i) {
      l[i] = -half;
      h[i] = half;
    }
    return Box(l, h);
  }
  static Box cube(int d, double l_, double h_) {
    Point l(d), h(d);
    for (int i = 0; i < d; ++i) {
      l[i] = l_;
      h[i] = h_;
    }
    return Box(l, h);
  }

  int dim() const { return lo.dim; }
  double side(int i) const { return hi[i] - lo[i]; }
  double volume() const {
    double v = 1;
    for (int i = 0; i < dim(); ++i) v *= side(i);
    return v;
  }
  double diameter() const { return distance(lo, hi); }
  Point center() const { return 0.5 * (lo + hi); }
  double min_half_width() const {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim(); ++i) m = std::min(m, 0.5 * side(i));
    return m;
  }
  bool contains(const Point& p, double tol = 0.0) const {
    for (int i = 0; i < dim(); ++i)
      if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
    return true;
  }
  /// True when `o` lies inside this box (with tolerance).
  bool contains(const Box& o, double tol = 0.0) const { return contains(o.lo, tol) && contains(o.hi, tol); }

  Box translated(const Point& v) const { return Box(lo + v, hi + v); }
  Box grown(double m) const {
    Point l = lo, h = hi;
    for (int i = 0; i < dim(); ++i) {
      l[i] -= m;
      h[i] += m;
    }
    return Box(l, h);
  }
  /// Shrinks every side by `m`; returns false when nothing is left.
  bool shrunk(double m, Box& out) const {
    Point l = lo, h = hi;
    for (int i = 0; i < dim(); ++i) {
      l[i] += m;
      h[i] -= m;
      if (!(l[i] < h[i])) return false;
    }
    out = Box(l, h);
    return true;
  }
  Box scaled(double c) const {
    require(c != 0.0, "scale factor must be nonzero");
    Point l = lo * c, h = hi * c;
    for (int i = 0; i < dim(); ++i)
      if (l[i] > h[i]) std::swap(l[i], h[i]);
    return Box(l, h);
  }
  /// Minkowski difference B - B, the box holding all differences.
  Box difference_box() const {
    Point l(dim()), h(dim());
    for (int i = 0; i < dim(); ++i) {
      l[i] = lo[i] - hi[i];
      h[i] = hi[i] - lo[i];
    }
    return Box(l, h);
  }
  Box hull(const Box& o) const {
    Point l = lo, h = hi;
    for (int i = 0; i < dim(); ++i) {
      l[i] = std::min(l[i], o.lo[i]);
      h[i] = std::max(h[i], o.hi[i]);
    }
    return Box(l, h);
  }
  friend bool operator==(const Box& a, const Box& b) { return a.lo == b.lo && a.hi == b.hi; }
};

inline double merge_tolerance(const Box& window) { return kMergeRel * window.diameter(); }

/// Smallest box containing all points, padded to keep lo < hi.
inline Box bounding_box(std::span<const Point> pts, int dim, double pad = 0.5) {
  if (pts.empty()) return Box::cube(dim, pad);
  Point l = pts[0], h = pts[0];
  for (const auto& p : pts)
    for (int i = 0; i < dim; ++i) {
      l[i] = std::min(l[i], p[i]);
      h[i] = std::max(h[i], p[i]);
    }
  for (int i = 0; i < dim; ++i) {
    l[i] -= pad;
    h[i] += pad;
  }
  return Box(l, h);
}

// ---------------------------------------------------------------------------
// PointIndex: hash grid with cell size = tolerance; lookups check the 3^d
// neighbouring cells so any point within `tol` (max-norm) is found.

class PointIndex {
public:
  PointIndex() = default;
  PointIndex(int dim, double tol) : dim_(dim), tol_(std::max(tol, 1e-12)) {}

  int dim() const { return dim_; }
  double tol() const { return tol_; }

  /// Returns the id of a stored point within tol of p, or -1.
  long find(const Point& p) const {
    const auto key = cell(p);
    long best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    visit_neighbours(key, [&](std::int64_t k) {
      auto it = map_.find(k);
      if (it == map_.end()) return;
      for (long id : it->second) {
        const double d = max_abs(pts_[static_cast<std::size_t>(id)] - p);
        if (d <= tol_ && d < best_d) {
          best_d = d;
          best = id;
        }
      }
    });
    return best;
  }

  /// Inserts p unless a point within tol exists; returns the id either way.
  long insert(const Point& p, bool* inserted = nullptr) {
    long id = find(p);
    if (id >= 0) {
      if (inserted) *inserted = false;
      return id;
    }
    id = static_cast<long>(pts_.size());
    pts_.push_back(p);
    map_[hash(cell(p))].push_back(id);
    if (inserted) *inserted = true;
    return id;
  }

  const std::vector<Point>& points() const { return pts_; }
  std::size_t size() const { return pts_.size(); }

private:
  using Key = std::array<std::int64_t, kMaxDim>;

  Key cell(const Point& p) const {
    Key k{};
    for (int i = 0; i < dim_; ++i) k[i] = static_cast<std::int64_t>(std::floor(p[i] / tol_));
    return k;
  }
  static std::int64_t hash(const Key& k) {
    std::uint64_t h = 1469598103934665603ull;
    for (auto v : k) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 1099511628211ull;
    }
    return static_cast<std::int64_t>(h);
  }
  template <class F>
  void visit_neighbours(const Key& k, F&& f) const {
    const int n = dim_ == 1 ? 3 : (dim_ == 2 ? 9 : 27);
    for (int c = 0; c < n; ++c) {
      Key q = k;
      int r = c;
      for (int i = 0; i < dim_; ++i) {
        q[i] += (r % 3) - 1;
        r /= 3;
      }
      f(hash(q));
    }
  }

  int dim_ = 1;
  double tol_ = 1e-12;
  std::vector<Point> pts_;
  std::unordered_map<std::int64_t, std::vector<long>> map_;
};

// ---------------------------------------------------------------------------
// Parallel loop. Work is split into contiguous chunks and each index writes
// its own output slot, so results never depend on the thread count.
// BRAGG_THREADS caps the number of workers.

inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BRAGG_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
  }
  return hw;
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
  const unsigned workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(1, n / 64));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk, e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e] {
      for (std::size_t i = b; i < e; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// e^{-2 pi i k.x}
inline cplx character(const Point& k, const Point& x) {
  const double ph = -kTwoPi * dot(k, x);
  return {std::cos(ph), std::sin(ph)};
}

}  // namespace bragg
