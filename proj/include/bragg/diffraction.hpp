// Finite-volume autocorrelations, Bragg intensity estimation from averaged
// exponential sums, visible Bragg sets I(a) and the Meyer check on them.
#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bragg/geometry.hpp"
#include "bragg/measure.hpp"
#include "bragg/posdef.hpp"

namespace bragg {

// ---------------------------------------------------------------------------
// Autocorrelation

/// gamma_A = (omega|_A * reflect(omega|_A)) / |A|.
///
/// Pairs are accumulated once per unordered pair and mirrored, so
/// gamma({-z}) = conj(gamma({z})) holds bit for bit.
inline AtomicMeasure autocorrelation(const AtomicMeasure& omega, const Box& A,
                                     double budget = kDefaultConvolutionBudget) {
  require(A.dim() == omega.dim(), "box dimension mismatch");
  std::vector<Atom> in;
  for (const auto& a : omega.atoms())
    if (A.contains(a.x, omega.tol())) in.push_back(a);  // sorted lexicographically
  require(static_cast<double>(in.size()) * static_cast<double>(in.size()) <= budget,
          "autocorrelation exceeds the pair budget; reduce the window");
  const Box out = A.difference_box();
  const double tol = merge_tolerance(out);
  PointIndex idx(omega.dim(), tol);
  std::vector<cplx> half;
  cplx at_zero{};
  for (std::size_t i = 0; i < in.size(); ++i) {
    at_zero += std::norm(in[i].w);
    for (std::size_t j = 0; j < i; ++j) {
      const Point z = in[i].x - in[j].x;  // lexicographically positive
      const cplx v = in[i].w * std::conj(in[j].w);
      if (max_abs(z) <= tol) {
        at_zero += 2.0 * v.real();
        continue;
      }
      bool fresh = false;
      const long id = idx.insert(z, &fresh);
      if (fresh) half.push_back(v);
      else half[static_cast<std::size_t>(id)] += v;
    }
  }
  const double inv = 1.0 / A.volume();
  std::vector<Atom> atoms;
  atoms.reserve(2 * half.size() + 1);
  if (!in.empty()) atoms.push_back({Point::zero(omega.dim()), at_zero * inv});
  for (std::size_t i = 0; i < half.size(); ++i) {
    const cplx v = half[i] * inv;
    atoms.push_back({idx.points()[i], v});
    atoms.push_back({-idx.points()[i], std::conj(v)});
  }
  return AtomicMeasure::from_atoms(omega.dim(), out, atoms, tol, "autocorrelation");
}

struct AtomTrace {
  Point z;
  cplx value;
  double delta = 0;  // |gamma_N({z}) - gamma_{N-1}({z})|
  bool converged = false;
};

struct AutocorrelationTrace {
  std::vector<AtomicMeasure> gammas;
  std::vector<AtomTrace> atoms;  // atoms of the last gamma
  double eps_atom = 0;
};

/// gamma_n along the family with per-atom Cauchy evidence for the last step.
/// No limit is claimed.
inline AutocorrelationTrace autocorrelation_trace(const AtomicMeasure& omega, const VanHoveFamily& family,
                                                  double eps_atom) {
  require(family.size() >= 3, "autocorrelation trace needs at least three family indices");
  require(eps_atom > 0, "eps_atom must be positive");
  AutocorrelationTrace tr;
  tr.eps_atom = eps_atom;
  for (std::size_t n = 0; n < family.size(); ++n) tr.gammas.push_back(autocorrelation(omega, family.box(n)));
  const auto& last = tr.gammas.back();
  const auto& prev = tr.gammas[tr.gammas.size() - 2];
  for (const auto& a : last.atoms()) {
    const double delta = std::abs(a.w - prev.at(a.x));
    tr.atoms.push_back({a.x, a.w, delta, delta <= eps_atom});
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Exponential sums and Bragg intensities

/// (1/|A|) sum_{x in supp omega, x in A} w(x) e^{-2 pi i k.x}
inline cplx exp_sum(const AtomicMeasure& omega, const Point& k, const Box& A) {
  cplx s{};
  for (const auto& a : omega.atoms())
    if (A.contains(a.x, omega.tol())) s += a.w * character(k, a.x);
  return s / A.volume();
}

/// Evaluates exponential sums for every box of a family in one pass over
/// the atoms (boxes are nested cubes, so atoms are bucketed into shells).
class FamilySums {
public:
  FamilySums(const AtomicMeasure& omega, const VanHoveFamily& family) : family_(family) {
    require(family.dim == omega.dim(), "family dimension mismatch");
    shells_.resize(family.size());
    for (const auto& a : omega.atoms()) {
      const double r = max_abs(a.x);
      for (std::size_t n = 0; n < family.size(); ++n)
        if (r <= family.half_widths[n] + omega.tol()) {
          shells_[n].push_back(a);
          l1_ += n + 1 == family.size() ? std::abs(a.w) : 0.0;
          break;
        }
    }
    for (std::size_t n = 0; n < family.size(); ++n) {
      volumes_.push_back(family.box(n).volume());
      if (n + 1 < family.size())
        for (const auto& a : shells_[n]) l1_ += std::abs(a.w);
    }
  }

  /// Averaged sums for every family box.
  std::vector<cplx> sums(const Point& k) const {
    std::vector<cplx> out(shells_.size());
    cplx s{};
    for (std::size_t n = 0; n < shells_.size(); ++n) {
      for (const auto& a : shells_[n]) s += a.w * character(k, a.x);
      out[n] = s / volumes_[n];
    }
    return out;
  }

  const VanHoveFamily& family() const { return family_; }
  /// sum |w| over the largest box
  double l1_mass() const { return l1_; }

private:
  VanHoveFamily family_;
  std::vector<std::vector<Atom>> shells_;
  std::vector<double> volumes_;
  double l1_ = 0;
};

struct BraggPeak {
  Point k;
  double intensity = 0;        // |exp_sum|^2 at the largest box
  std::vector<double> trace;   // per family index
  double stderr_proxy = 0;     // |I_N - I_{N-1}|
  bool converged = false;
};

inline constexpr double kDefaultEpsAtom = 0.02;

inline BraggPeak make_peak(const Point& k, const std::vector<cplx>& sums, double eps_atom) {
  BraggPeak p;
  p.k = k;
  for (const auto& s : sums) p.trace.push_back(std::norm(s));
  p.intensity = p.trace.back();
  p.stderr_proxy = p.trace.size() >= 2 ? std::abs(p.trace.back() - p.trace[p.trace.size() - 2]) : 0.0;
  p.converged = p.stderr_proxy <= eps_atom;
  return p;
}

inline BraggPeak bragg_intensity(const AtomicMeasure& omega, const Point& k, const VanHoveFamily& family,
                                 double eps_atom = kDefaultEpsAtom) {
  require(family.size() >= 2, "Bragg intensity needs at least two family indices");
  FamilySums fs(omega, family);
  return make_peak(k, fs.sums(k), eps_atom);
}

/// Relative difference between |A| |exp_sum|^2 and sum_z gamma_A({z})
/// e^{-2 pi i k.z}, normalized by the a-priori bound (sum |w|)^2 / |A|.
inline double autocorr_ft_identity_check(const AtomicMeasure& omega, const Point& k, const Box& A) {
  const double vol = A.volume();
  const cplx s = exp_sum(omega, k, A);
  const double lhs = vol * std::norm(s);
  const auto gamma = autocorrelation(omega, A);
  cplx rhs{};
  for (const auto& a : gamma.atoms()) rhs += a.w * character(k, a.x);
  double l1 = 0;
  for (const auto& a : omega.atoms())
    if (A.contains(a.x, omega.tol())) l1 += std::abs(a.w);
  const double scale = l1 * l1 / vol;
  if (scale == 0) return std::abs(lhs - rhs);
  return std::abs(cplx(lhs) - rhs) / scale;
}

// ---------------------------------------------------------------------------
// Diffraction estimates

struct DiffractionEstimate {
  std::vector<BraggPeak> peaks;  // sorted by frequency
  BraggPeak zero;                // k = 0
  VanHoveFamily family;
  Box dual_window;

  double gamma0() const { return zero.intensity; }
};

inline DiffractionEstimate estimate_diffraction(const AtomicMeasure& omega, std::span<const Point> candidates,
                                                const VanHoveFamily& family, const Box& dual_window,
                                                double eps_atom = kDefaultEpsAtom) {
  require(family.size() >= 2, "diffraction estimate needs at least two family indices");
  FamilySums fs(omega, family);
  DiffractionEstimate est;
  est.family = family;
  est.dual_window = dual_window;
  est.zero = make_peak(Point::zero(omega.dim()), fs.sums(Point::zero(omega.dim())), eps_atom);
  std::vector<Point> ks(candidates.begin(), candidates.end());
  std::sort(ks.begin(), ks.end(), lex_less);
  est.peaks.resize(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) { est.peaks[i] = make_peak(ks[i], fs.sums(ks[i]), eps_atom); });
  return est;
}

// ---------------------------------------------------------------------------
// Candidate frequencies

struct CandidateOptions {
  double grid_res = 0.01;
  double internal_bound = -1;     // model sets: |k*| bound; <= 0 selects 8 / |W|
  double refine_floor = 0.05;     // generic: fraction of the zero-frequency intensity
  int refine_iterations = 40;
};

namespace detail {

inline std::vector<Point> model_set_duals(const Generator& g, const Box& dual_window, double bound) {
  const Eigen::MatrixXd dual = g.basis.inverse().transpose();  // columns generate the dual lattice
  const Eigen::MatrixXd to_int = g.basis.transpose();          // (k, k*) -> n
  Eigen::VectorXd lo(2), hi(2);
  lo << dual_window.lo[0], -bound;
  hi << dual_window.hi[0], bound;
  std::vector<long> mlo, mhi;
  integer_bounds(to_int, lo, hi, mlo, mhi);
  std::vector<Point> out;
  const double tol = merge_tolerance(dual_window);
  for_each_integer_vector(mlo, mhi, [&](const std::vector<long>& n) {
    const double a = static_cast<double>(n[0]), b = static_cast<double>(n[1]);
    const double k = dual(0, 0) * a + dual(0, 1) * b;
    const double ks = dual(1, 0) * a + dual(1, 1) * b;
    if (std::abs(ks) <= bound && dual_window.contains(Point{k}, tol)) out.push_back(Point{k});
  });
  return out;
}

/// Golden-section ascent of f along one coordinate on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, int iters) {
  const double r = 1.0 / kGolden;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Coarse-to-fine peak search: the grid is scored with the smallest family
/// box (broad peaks), then each seed is refined box by box with a bracket
/// matching the main lobe of the previous box.
inline std::vector<Point> generic_candidates(const AtomicMeasure& omega, const VanHoveFamily& family,
                                             const Box& dual_window, const CandidateOptions& opt) {
  FamilySums fs(omega, family);
  const std::size_t last = family.size() - 1;
  auto intensity_at = [&](const Point& k, std::size_t box) { return std::norm(fs.sums(k)[box]); };
  const int d = omega.dim();
  const Point zero = Point::zero(d);
  const double floor0 = opt.refine_floor * intensity_at(zero, 0);
  const double floor = opt.refine_floor * intensity_at(zero, last);
  std::vector<long> n(d), lo(d, 0);
  std::vector<double> step(d);
  for (int i = 0; i < d; ++i) {
    n[i] = std::max<long>(1, static_cast<long>(std::ceil(dual_window.side(i) / opt.grid_res)));
    step[i] = dual_window.side(i) / static_cast<double>(n[i]);
  }
  std::vector<Point> grid;
  for_each_integer_vector(lo, n, [&](const std::vector<long>& m) {
    Point p(d);
    for (int i = 0; i < d; ++i) p[i] = dual_window.lo[i] + step[i] * static_cast<double>(m[i]);
    grid.push_back(p);
  });
  std::vector<double> val(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { val[i] = intensity_at(grid[i], 0); });
  std::vector<Point> seeds;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (val[i] >= floor0) seeds.push_back(grid[i]);
  std::vector<Point> refined(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t s) {
    Point k = seeds[s];
    for (std::size_t box = 0; box <= last; ++box)
      for (int axis = 0; axis < d; ++axis) {
        const double half = box == 0 ? step[axis] : 0.5 / family.half_widths[box - 1];
        auto along = [&](double t) {
          Point q = k;
          q[axis] = t;
          return intensity_at(q, box);
        };
        k[axis] = golden_max(along, k[axis] - half, k[axis] + half, opt.refine_iterations);
      }
    refined[s] = k;
  });
  PointIndex idx(d, 0.5 / family.half_widths[last]);
  for (std::size_t s = 0; s < refined.size(); ++s)
    if (dual_window.contains(refined[s]) && intensity_at(refined[s], last) >= floor) idx.insert(refined[s]);
  return idx.points();
}

}  // namespace detail

/// Search space for visible Bragg peaks. Lattices give their dual lattice,
/// model sets the projected dual lattice (bounded internal coordinate),
/// compositions combine their parts; anything else falls back to a grid
/// scan refined by golden-section ascent (requires omega and family).
inline std::vector<Point> candidate_frequencies(const Generator& g, const Box& dual_window,
                                                const CandidateOptions& opt = {},
                                                const AtomicMeasure* omega = nullptr,
                                                const VanHoveFamily* family = nullptr) {
  require(opt.grid_res > 0, "grid resolution must be positive");
  const int d = dual_window.dim();
  std::vector<Point> out;
  switch (g.kind) {
    case Generator::Kind::lattice: {
      const Eigen::MatrixXd dual = g.basis.transpose().inverse();
      out = generate_lattice(dual, dual_window).points;
      break;
    }
    case Generator::Kind::model_set: {
      const double width = g.internal_hi - g.internal_lo;
      const double bound = opt.internal_bound > 0 ? opt.internal_bound : (width > 0 ? 8.0 / width : 1.0);
      out = detail::model_set_duals(g, dual_window, bound);
      break;
    }
    case Generator::Kind::union_of: {
      PointIndex idx(d, merge_tolerance(dual_window));
      for (const auto& part : g.parts)
        for (const auto& k : candidate_frequencies(part, dual_window, opt, omega, family)) idx.insert(k);
      out = idx.points();
      break;
    }
    case Generator::Kind::translate:
      out = candidate_frequencies(g.parts.at(0), dual_window, opt, omega, family);
      break;
    case Generator::Kind::scale: {
      CandidateOptions inner = opt;
      inner.grid_res = opt.grid_res * std::abs(g.factor);
      for (const auto& k : candidate_frequencies(g.parts.at(0), dual_window.scaled(g.factor), inner, nullptr, nullptr))
        out.push_back(k * (1.0 / g.factor));
      break;
    }
    case Generator::Kind::explicit_list:
      require(omega != nullptr && family != nullptr, "generic candidate search needs the measure and the family");
      out = detail::generic_candidates(*omega, *family, dual_window, opt);
      break;
  }
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

/// I(a) restricted to `window`: frequencies whose estimated intensity is at least a.
inline PointSet visible_bragg_set(const DiffractionEstimate& est, double a, const Box& window) {
  require(a > 0, "a must be positive");
  std::vector<Point> ks;
  for (const auto& p : est.peaks)
    if (p.intensity >= a && window.contains(p.k, merge_tolerance(window))) ks.push_back(p.k);
  auto ps = PointSet::from_points(window.dim(), ks, window);
  ps.generator.label = "visible_bragg_set";
  return ps;
}

inline PointSet visible_bragg_set(const AtomicMeasure& omega, double a, std::span<const Point> candidates,
                                  const VanHoveFamily& family, const Box& dual_window) {
  const auto est = estimate_diffraction(omega, candidates, family, dual_window);
  return visible_bragg_set(est, a, dual_window);
}

/// The estimated Bragg atoms as a measure on the dual space.
inline AtomicMeasure diffraction_measure(const DiffractionEstimate& est) {
  std::vector<Atom> atoms;
  for (const auto& p : est.peaks) atoms.push_back({p.k, p.intensity});
  if (est.dual_window.contains(est.zero.k)) atoms.push_back({est.zero.k, est.zero.intensity});
  // duplicates of k = 0 carry the same value; keep one
  PointIndex idx(est.dual_window.dim(), merge_tolerance(est.dual_window));
  std::vector<Atom> uniq;
  for (const auto& a : atoms) {
    bool fresh = false;
    idx.insert(a.x, &fresh);
    if (fresh) uniq.push_back(a);
  }
  return AtomicMeasure::from_atoms(est.dual_window.dim(), est.dual_window, uniq, -1, "diffraction_estimate");
}

// ---------------------------------------------------------------------------
// Meyer property of visible Bragg sets

struct NestingCheck {
  double b = 0;
  std::size_t size_a = 0, size_b = 0;
  bool nested = false;
};

struct Theorem1Report {
  double a = 0;
  double gamma0 = 0, gamma0_stderr = 0;
  double threshold = 0;  // (sqrt3 - 1) gamma0
  double guard = 0;
  bool hypothesis_met = false;
  std::string status;
  std::optional<MeyerReport> meyer;
  std::vector<NestingCheck> nesting;
  Verdict verdict = Verdict::inconclusive;
};

struct Theorem1Options {
  CandidateOptions candidates;
  double eps_atom = kDefaultEpsAtom;
  MeyerOptions meyer;
  int nesting_values = 5;
};

/// I(a) across growing dual windows must be Meyer when a exceeds
/// (sqrt3 - 1) gamma^({0}); I(a) must sit inside I(b) for admissible b <= a.
inline Theorem1Report theorem1_check(const AtomicMeasure& omega, const Generator& gen, double a,
                                     const VanHoveFamily& family, std::span<const Box> dual_windows,
                                     const Box& k_box, const Theorem1Options& opt = {}) {
  require(!dual_windows.empty(), "need dual windows");
  for (const auto& at : omega.atoms())
    require(at.w.real() >= 0 && at.w.imag() == 0, "theorem1_check requires nonnegative real weights");
  Theorem1Report rep;
  rep.a = a;
  Box outer = dual_windows[0];
  for (const auto& w : dual_windows) outer = outer.hull(w);
  const auto cands = candidate_frequencies(gen, outer, opt.candidates, &omega, &family);
  const auto est = estimate_diffraction(omega, cands, family, outer, opt.eps_atom);
  rep.gamma0 = est.gamma0();
  rep.gamma0_stderr = est.zero.stderr_proxy;
  rep.threshold = kSparseFactor * rep.gamma0;
  rep.guard = 1e-6 + kSparseFactor * rep.gamma0_stderr;
  if (a <= rep.threshold - rep.guard) {
    rep.status = "hypothesis unmet";
    rep.verdict = Verdict::inconclusive;
    return rep;
  }
  if (a <= rep.threshold + rep.guard) {
    rep.status = "inconclusive: a lies within the guard band of the threshold";
    rep.verdict = Verdict::inconclusive;
    return rep;
  }
  rep.hypothesis_met = true;
  rep.meyer = meyer_check([&](const Box& w) { return visible_bragg_set(est, a, w); }, dual_windows, k_box, opt.meyer);

  const auto ia = visible_bragg_set(est, a, outer);
  bool nested_all = true;
  for (int j = 1; j <= opt.nesting_values; ++j) {
    NestingCheck nc;
    nc.b = rep.threshold + (a - rep.threshold) * j / opt.nesting_values;
    const auto ib = visible_bragg_set(est, nc.b, outer);
    nc.size_a = ia.size();
    nc.size_b = ib.size();
    nc.nested = std::all_of(ia.points.begin(), ia.points.end(), [&](const Point& k) { return ib.contains(k); });
    nested_all = nested_all && nc.nested;
    rep.nesting.push_back(nc);
  }
  rep.status = "hypothesis met";
  rep.verdict = nested_all ? rep.meyer->verdict : Verdict::fail;
  return rep;
}

/// Relative denseness of I(a) for several a, each judged across the dual
/// windows with the covering-radius rules of meyer_check.
struct DensityScanEntry {
  double a = 0;
  MeyerReport meyer;
};

inline std::vector<DensityScanEntry> visible_set_density_scan(const DiffractionEstimate& est,
                                                              std::span<const double> a_values,
                                                              std::span<const Box> dual_windows, const Box& k_box,
                                                              const MeyerOptions& opt = {}) {
  std::vector<DensityScanEntry> out;
  for (double a : a_values)
    out.push_back({a, meyer_check([&](const Box& w) { return visible_bragg_set(est, a, w); }, dual_windows, k_box, opt)});
  return out;
}

}  // namespace bragg
