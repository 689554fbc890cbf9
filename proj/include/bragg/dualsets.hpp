// Grid approximations of eps-dual sets, the double dual and the
// construction that places a Meyer set inside the visible Bragg peaks of
// a Delone set in the dual.
#pragma once

#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bragg/diffraction.hpp"
#include "bragg/geometry.hpp"

namespace bragg {

/// Boolean node grid over a box. Nodes sit at lo + side * m / n, so grid
/// points with simple rational coordinates are hit exactly.
struct GridRegion {
  Box domain;
  double spacing = 0;
  std::vector<long> steps;           // intervals per axis; nodes per axis = steps + 1
  std::vector<std::uint8_t> mask;    // node order: axis 0 fastest
  std::vector<Point> representatives;
  std::vector<std::size_t> component_sizes;

  int dim() const { return domain.dim(); }
  std::size_t node_count() const { return mask.size(); }
  std::size_t true_count() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1)); }
  bool full() const { return true_count() == node_count(); }
  bool empty() const { return true_count() == 0; }

  Point node(std::size_t i) const {
    Point p(dim());
    for (int a = 0; a < dim(); ++a) {
      const long n = steps[a] + 1;
      const long m = static_cast<long>(i % static_cast<std::size_t>(n));
      i /= static_cast<std::size_t>(n);
      p[a] = domain.lo[a] + domain.side(a) * static_cast<double>(m) / static_cast<double>(steps[a]);
    }
    return p;
  }

  /// Mask value at the node nearest to p; false outside the domain.
  bool at(const Point& p) const {
    if (!domain.contains(p, 0.5 * spacing)) return false;
    std::size_t idx = 0, stride = 1;
    for (int a = 0; a < dim(); ++a) {
      const double t = (p[a] - domain.lo[a]) / domain.side(a) * static_cast<double>(steps[a]);
      const long m = std::clamp(std::lround(t), 0L, steps[a]);
      idx += static_cast<std::size_t>(m) * stride;
      stride *= static_cast<std::size_t>(steps[a] + 1);
    }
    return mask[idx] != 0;
  }

  /// True when some true node lies within `radius` (max-norm) of p.
  bool near(const Point& p, double radius) const {
    if (at(p)) return true;
    const int d = dim();
    std::vector<long> lo(d), hi(d);
    for (int a = 0; a < d; ++a) {
      const double scale = static_cast<double>(steps[a]) / domain.side(a);
      lo[a] = std::max(0L, static_cast<long>(std::floor((p[a] - radius - domain.lo[a]) * scale)));
      hi[a] = std::min(steps[a], static_cast<long>(std::ceil((p[a] + radius - domain.lo[a]) * scale)));
      if (lo[a] > hi[a]) return false;
    }
    bool found = false;
    detail::for_each_integer_vector(lo, hi, [&](const std::vector<long>& m) {
      if (found) return;
      std::size_t idx = 0, stride = 1;
      for (int a = 0; a < d; ++a) {
        idx += static_cast<std::size_t>(m[a]) * stride;
        stride *= static_cast<std::size_t>(steps[a] + 1);
      }
      if (mask[idx] && max_abs(node(idx) - p) <= radius + 1e-12) found = true;
    });
    return found;
  }

  PointSet representative_set() const {
    auto ps = PointSet::from_points(dim(), representatives, domain);
    ps.generator.label = "grid_region_representatives";
    return ps;
  }
};

namespace detail {

inline GridRegion make_grid(const Box& domain, double spacing) {
  require(spacing > 0, "grid spacing must be positive");
  GridRegion g;
  g.domain = domain;
  g.spacing = spacing;
  double total = 1;
  for (int a = 0; a < domain.dim(); ++a) {
    const long n = std::max(1L, std::lround(domain.side(a) / spacing));
    g.steps.push_back(n);
    total *= static_cast<double>(n + 1);
  }
  require(total <= 5e7, "grid too fine for the domain");
  g.mask.assign(static_cast<std::size_t>(total), 0);
  return g;
}

/// Face-adjacent components; representative = true node nearest the centroid.
inline void cluster(GridRegion& g) {
  const int d = g.dim();
  std::vector<std::size_t> stride(d);
  std::size_t s = 1;
  for (int a = 0; a < d; ++a) {
    stride[a] = s;
    s *= static_cast<std::size_t>(g.steps[a] + 1);
  }
  std::vector<std::uint8_t> seen(g.mask.size(), 0);
  std::vector<std::size_t> stack, members;
  g.representatives.clear();
  g.component_sizes.clear();
  for (std::size_t start = 0; start < g.mask.size(); ++start) {
    if (!g.mask[start] || seen[start]) continue;
    members.clear();
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      members.push_back(i);
      for (int a = 0; a < d; ++a) {
        const long m = static_cast<long>((i / stride[a]) % static_cast<std::size_t>(g.steps[a] + 1));
        if (m > 0 && g.mask[i - stride[a]] && !seen[i - stride[a]]) {
          seen[i - stride[a]] = 1;
          stack.push_back(i - stride[a]);
        }
        if (m < g.steps[a] && g.mask[i + stride[a]] && !seen[i + stride[a]]) {
          seen[i + stride[a]] = 1;
          stack.push_back(i + stride[a]);
        }
      }
    }
    std::sort(members.begin(), members.end());
    Point c = Point::zero(d);
    for (auto i : members) c += g.node(i);
    c *= 1.0 / static_cast<double>(members.size());
    std::size_t best = members.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (auto i : members) {
      const double dist = distance(g.node(i), c);
      if (dist < best_d) {
        best_d = dist;
        best = i;
      }
    }
    g.representatives.push_back(g.node(best));
    g.component_sizes.push_back(members.size());
  }
}

/// 2|sin(pi k.x)| = |e^{2 pi i k.x} - 1|; strict "< eps" is tested as <= eps - 1e-12.
inline bool within(const Point& k, std::span<const Point> xs, double eps) {
  const double lim = eps - 1e-12;
  for (const auto& x : xs)
    if (2.0 * std::abs(std::sin(std::numbers::pi * dot(k, x))) > lim) return false;
  return true;
}

inline GridRegion dual_region(std::span<const Point> constraints, double eps, const Box& domain, double spacing) {
  require(eps > 0 && eps < 2, "eps must lie in (0, 2)");
  GridRegion g = make_grid(domain, spacing);
  parallel_for(g.mask.size(), [&](std::size_t i) { g.mask[i] = within(g.node(i), constraints, eps) ? 1 : 0; });
  cluster(g);
  return g;
}

}  // namespace detail

/// Sigma^eps = {k : |e^{2 pi i k.x} - 1| < eps for all x in ps}, sampled on a node grid.
inline GridRegion eps_dual(const PointSet& ps, double eps, const Box& dual_domain, double spacing) {
  require(!ps.empty(), "eps_dual needs a nonempty point set");
  require(dual_domain.dim() == ps.dim, "domain dimension mismatch");
  return detail::dual_region(ps.points, eps, dual_domain, spacing);
}

/// Xi^eps evaluated through the component representatives of `region`.
inline GridRegion eps_dual_back(const GridRegion& region, double eps, const Box& phys_domain, double spacing) {
  require(!region.representatives.empty(), "eps_dual_back needs a nonempty region");
  require(phys_domain.dim() == region.dim(), "domain dimension mismatch");
  return detail::dual_region(region.representatives, eps, phys_domain, spacing);
}

struct DoubleDual {
  GridRegion first;   // Lambda^{eps'/2}
  GridRegion back;    // (Lambda^{eps'/2})^{eps'/2}
  PointSet result;    // representatives of `back`
  bool degenerate = false;
  bool contains_input = false;
  std::vector<Point> missing;  // input points with no true node within one spacing
};

/// Lambda' = (Lambda^{eps'/2})^{eps'/2}.
inline DoubleDual double_dual(const PointSet& ps, double eps_prime, const Box& dual_domain, const Box& phys_domain,
                              double dual_spacing, double phys_spacing) {
  require(eps_prime > 0 && eps_prime < 1, "eps' must lie in (0, 1)");
  DoubleDual dd;
  dd.first = eps_dual(ps, eps_prime / 2, dual_domain, dual_spacing);
  dd.back = eps_dual_back(dd.first, eps_prime / 2, phys_domain, phys_spacing);
  dd.result = dd.back.representative_set();
  dd.degenerate = dd.first.full() || dd.back.full() || dd.back.empty();
  for (const auto& x : ps.points)
    if (phys_domain.contains(x) && !dd.back.near(x, phys_spacing)) dd.missing.push_back(x);
  dd.contains_input = dd.missing.empty();
  return dd;
}

// ---------------------------------------------------------------------------
// Construction check

struct Theorem2Options {
  Box dual_domain = Box::interval(-10, 10);
  Box phys_domain = Box::interval(-10, 10);
  double dual_spacing = 1e-3;
  double phys_spacing = 1e-3;
  std::optional<VanHoveFamily> family;  // defaults to {s/4, s/2, s} over the dual domain
  MeyerOptions meyer;
};

struct Theorem2Check {
  Point y;
  BraggPeak peak;
  double required = 0;  // eps * gamma^({0}) - guard
  bool ok = false;
};

struct Theorem2Report {
  double eps = 0, eps_prime = 0;
  std::optional<MeyerReport> hypothesis;  // meyer_check on the input
  bool hypothesis_verified = false;
  PointSet lambda_prime, gamma;
  std::size_t first_dual_components = 0;
  bool lambda_in_lambda_prime = false;
  std::vector<Point> missing_from_lambda_prime;
  bool lambda_prime_in_gamma_dual = false;
  std::vector<Point> delta_tension;  // y in Lambda outside (Gamma - Gamma)^{eps'}
  std::vector<std::string> notes;
  BraggPeak zero;
  std::vector<Theorem2Check> checks;
  Verdict verdict = Verdict::inconclusive;
};

/// Builds Gamma = (Lambda')^{eps'/2} and checks that every y in Lambda is an
/// eps * gamma^({0})-visible peak of the Dirac comb on Gamma.
///
/// Gamma is cut out by the representatives of Lambda' together with Lambda
/// itself, so the grid approximation of Lambda' cannot drop constraints that
/// the exact set carries.
inline Theorem2Report theorem2_verify(const PointSet& ps, double eps, const Theorem2Options& opt = {}) {
  require(eps > 0 && eps < 1, "eps must lie in (0, 1)");
  require(!ps.empty(), "theorem2_verify needs a nonempty point set");
  require(ps.dim == opt.phys_domain.dim() && ps.dim == opt.dual_domain.dim(), "domain dimension mismatch");
  Theorem2Report rep;
  rep.eps = eps;
  rep.eps_prime = 1 - eps;
  const double half = rep.eps_prime / 2;

  {
    const auto scales = nested_scales(ps.window);
    const PointSet& src = ps;
    rep.hypothesis = meyer_check(
        [&src](const Box& b) {
          std::vector<Point> in;
          for (const auto& p : src.points)
            if (b.contains(p, src.tol())) in.push_back(p);
          return PointSet::from_points(src.dim, in, b);
        },
        scales, Box::cube(ps.dim, 0.0, 1.0), opt.meyer);
    rep.hypothesis_verified = rep.hypothesis->verdict == Verdict::pass;
    if (!rep.hypothesis_verified) rep.notes.push_back("Meyer hypothesis unverified: input did not pass meyer_check");
  }

  const auto dd = double_dual(ps, rep.eps_prime, opt.dual_domain, opt.phys_domain, opt.dual_spacing, opt.phys_spacing);
  rep.first_dual_components = dd.first.representatives.size();
  rep.lambda_prime = dd.result;
  rep.lambda_in_lambda_prime = dd.contains_input;
  rep.missing_from_lambda_prime = dd.missing;
  if (dd.degenerate) rep.notes.push_back("double dual is degenerate (full or empty region)");

  std::vector<Point> constraints = dd.back.representatives;
  for (const auto& x : ps.points)
    if (opt.phys_domain.contains(x, ps.tol())) constraints.push_back(x);
  const GridRegion gamma_region = detail::dual_region(constraints, half, opt.dual_domain, opt.dual_spacing);
  require(!gamma_region.empty() && !gamma_region.full(),
          "degenerate Gamma: region is " + std::string(gamma_region.empty() ? "empty" : "the full domain") + " (" +
              std::to_string(gamma_region.true_count()) + " of " + std::to_string(gamma_region.node_count()) +
              " nodes, " + std::to_string(constraints.size()) + " constraints)");
  rep.gamma = gamma_region.representative_set();
  const auto& G = rep.gamma.points;

  rep.lambda_prime_in_gamma_dual = std::all_of(dd.back.representatives.begin(), dd.back.representatives.end(),
                                               [&](const Point& y) { return detail::within(y, G, half); });

  // (Gamma - Gamma)^{eps'} membership of the tested y, windowed
  std::vector<Point> diffs;
  for (const auto& g1 : G)
    for (const auto& g2 : G) diffs.push_back(g1 - g2);

  const VanHoveFamily family = opt.family ? *opt.family
                                          : VanHoveFamily(ps.dim, {opt.dual_domain.min_half_width() / 4,
                                                                   opt.dual_domain.min_half_width() / 2,
                                                                   opt.dual_domain.min_half_width()});
  const auto comb = dirac_comb(rep.gamma);
  FamilySums fs(comb, family);
  rep.zero = make_peak(Point::zero(ps.dim), fs.sums(Point::zero(ps.dim)), kDefaultEpsAtom);

  bool all_ok = true;
  for (const auto& y : ps.points) {
    if (!opt.phys_domain.contains(y, ps.tol())) continue;
    Theorem2Check c;
    c.y = y;
    c.peak = make_peak(y, fs.sums(y), kDefaultEpsAtom);
    c.required = eps * rep.zero.intensity - 2.0 * c.peak.stderr_proxy;
    c.ok = c.peak.intensity >= c.required;
    all_ok = all_ok && c.ok;
    if (!detail::within(y, diffs, rep.eps_prime)) rep.delta_tension.push_back(y);
    rep.checks.push_back(c);
  }
  if (!rep.delta_tension.empty())
    rep.notes.push_back("imported-fact tension: " + std::to_string(rep.delta_tension.size()) +
                        " tested points fall outside (Gamma - Gamma)^{eps'}");
  if (!rep.lambda_in_lambda_prime) rep.notes.push_back("Lambda is not contained in Lambda' within one spacing");

  if (!all_ok || !rep.lambda_in_lambda_prime) rep.verdict = Verdict::fail;
  else if (rep.checks.empty()) rep.verdict = Verdict::inconclusive;
  else rep.verdict = Verdict::pass;
  return rep;
}

}  // namespace bragg
