// Command implementations behind the bragg CLI. Each command maps a RunConfig
// to files and an exit code.
#pragma once

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bragg/cases.hpp"
#include "bragg/io.hpp"

namespace bragg::cli {

enum Exit : int { kPass = 0, kFail = 1, kInconclusive = 2, kError = 3 };

inline int exit_for(Verdict v) {
  switch (v) {
    case Verdict::pass: return kPass;
    case Verdict::fail: return kFail;
    case Verdict::inconclusive: return kInconclusive;
  }
  return kError;
}

struct RunConfig {
  std::string command;
  std::string input, output, report;

  std::vector<double> lattice;  // row-major d x d basis
  bool fibonacci = false;
  std::string paper_example;  // zpz | union2d | z-union-third
  std::vector<double> window;
  int range = 0;

  std::string family = "geometric:5";
  std::vector<double> dual_window;
  std::vector<double> dual_scales;  // half-widths of the dual windows
  std::vector<double> scales;       // half-widths of physical windows
  double grid = 0.01;
  double a = 0;
  double a_rel = 0;
  double eps = 0.5;
  double spacing = 1e-3;
  bool theorem2 = false;
  double box = 0;
  double k_box = 1.0;

  double eps_atom = kDefaultEpsAtom;
  double eps_psd = 1e-9;
  double krein_tol = 1e-9;
  std::uint64_t seed = 0;
  std::string case_name;
};

inline void validate(const RunConfig& c) {
  require(c.eps_atom > 0 && c.eps_psd > 0 && c.krein_tol > 0, "tolerances must be positive");
  require(c.grid > 0 && c.spacing > 0 && c.k_box > 0, "grid, spacing and k-box must be positive");
}

// ---------------------------------------------------------------------------
// Parsing helpers

/// Two values give a cube [lo, hi]^d; 2d values give lo_1..lo_d hi_1..hi_d.
inline Box parse_window(const std::vector<double>& v, int d) {
  if (v.size() == 2) return Box::cube(d, v[0], v[1]);
  require(static_cast<int>(v.size()) == 2 * d, "window needs 2 or 2*d numbers");
  Point lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = v[i];
    hi[i] = v[d + i];
  }
  return Box(lo, hi);
}

/// Largest centred cube half-width inside `w`.
inline double centred_half_width(const Box& w) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < w.dim(); ++i) m = std::min({m, -w.lo[i], w.hi[i]});
  require(m > 0, "window must contain the origin in its interior");
  return m;
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error("invalid number '" + item + "' in list");
    }
  }
  return out;
}

/// geometric:COUNT[:S0] or list:S1,S2,... ; the default S0 makes the largest
/// box fill `max_half`.
inline VanHoveFamily parse_family(const std::string& spec, int d, double max_half) {
  const auto colon = spec.find(':');
  require(colon != std::string::npos, "family must be geometric:N[:s0] or list:s1,s2,...");
  const std::string kind = spec.substr(0, colon), rest = spec.substr(colon + 1);
  if (kind == "list") return VanHoveFamily(d, parse_list(rest));
  require(kind == "geometric", "unknown family kind '" + kind + "'");
  const auto c2 = rest.find(':');
  int count = 0;
  try {
    count = std::stoi(rest.substr(0, c2));
  } catch (const std::exception&) {
    throw Error("invalid family count in '" + spec + "'");
  }
  require(count >= 1 && count <= 30, "family count must lie in 1..30");
  const double s0 = c2 == std::string::npos ? max_half / std::ldexp(1.0, count - 1) : std::stod(rest.substr(c2 + 1));
  return VanHoveFamily::geometric(d, s0, count);
}

inline std::vector<Box> cubes(int d, const std::vector<double>& half_widths) {
  std::vector<Box> out;
  for (double h : half_widths) out.push_back(Box::cube(d, h));
  return out;
}

inline Generator lattice_from(const std::vector<double>& entries) {
  const int d = entries.size() == 1 ? 1 : entries.size() == 4 ? 2 : entries.size() == 9 ? 3 : 0;
  require(d > 0, "lattice basis needs 1, 4 or 9 entries (row-major)");
  Eigen::MatrixXd b(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) b(r, c) = entries[static_cast<std::size_t>(r * d + c)];
  return Generator::lattice(b);
}

inline void emit(const RunConfig& c, const io::json& report) {
  if (c.output.empty()) std::cout << report.dump(2) << "\n";
  else io::write_json(c.output, report);
}

inline void summary(const std::string& what, Verdict v, const std::string& detail = {}) {
  std::cerr << what << ": " << to_string(v) << (detail.empty() ? "" : " (" + detail + ")") << "\n";
}

// ---------------------------------------------------------------------------
// generate

inline int cmd_generate(const RunConfig& c) {
  const int sources = (c.lattice.empty() ? 0 : 1) + (c.fibonacci ? 1 : 0) + (c.paper_example.empty() ? 0 : 1);
  require(sources == 1, "generate needs exactly one of --lattice, --fibonacci, --paper-example");
  io::json out;
  if (!c.paper_example.empty()) {
    const auto& ex = c.paper_example;
    if (ex == "zpz") {
      const Box w = c.window.empty() ? cases::zpz_window(c.range > 0 ? c.range : 12) : parse_window(c.window, 1);
      out = io::to_json(cases::zpz_measure(w));
      out["generator"] = io::to_json(cases::z_union_pi_z());
    } else if (ex == "union2d") {
      const Box w = c.window.empty() ? Box::cube(2, 10.0) : parse_window(c.window, 2);
      out = io::to_json(realize(cases::union2d(), w));
    } else if (ex == "z-union-third") {
      const Box w = c.window.empty() ? Box::interval(-20, 20) : parse_window(c.window, 1);
      out = io::to_json(realize(cases::z_union_third(), w));
    } else {
      throw Error("unknown paper example '" + ex + "' (zpz, union2d, z-union-third)");
    }
  } else {
    const Generator g = c.fibonacci ? fibonacci_generator() : lattice_from(c.lattice);
    const int d = generator_dim(g);
    require(!c.window.empty(), "generate needs --window");
    out = io::to_json(realize(g, parse_window(c.window, d)));
  }
  emit(c, out);
  if (!c.report.empty()) io::write_text(c.report, io::points_csv(io::load_pointset(out)));
  return kPass;
}

// ---------------------------------------------------------------------------
// analysis commands

struct Loaded {
  AtomicMeasure measure;
  PointSet set;
};

inline Loaded load_input(const RunConfig& c) {
  require(!c.input.empty(), "--input is required");
  const auto j = io::read_json(c.input);
  return {io::load_measure(j), io::load_pointset(j)};
}

inline int cmd_diffract(const RunConfig& c) {
  const auto in = load_input(c);
  const int d = in.measure.dim();
  const auto family = parse_family(c.family, d, centred_half_width(in.measure.window()));
  const Box dual = c.dual_window.empty() ? Box::cube(d, 5.0) : parse_window(c.dual_window, d);
  CandidateOptions opt;
  opt.grid_res = c.grid;
  const auto cands = candidate_frequencies(in.set.generator, dual, opt, &in.measure, &family);
  const auto est = estimate_diffraction(in.measure, cands, family, dual, c.eps_atom);
  const std::string csv = io::peaks_csv(est.peaks);
  if (c.output.empty()) std::cout << csv;
  else io::write_text(c.output, csv);
  if (!c.report.empty()) {
    io::json peaks = io::json::array();
    for (const auto& p : est.peaks) peaks.push_back(io::to_json(p));
    io::write_json(c.report, {{"gamma0", est.gamma0()}, {"zero", io::to_json(est.zero)},
                              {"family", family.half_widths}, {"dual_window", io::to_json(dual)}, {"peaks", peaks}});
  }
  std::cerr << "diffract: " << est.peaks.size() << " candidate peaks, gamma^({0}) = " << est.gamma0() << "\n";
  return kPass;
}

inline int cmd_meyer(const RunConfig& c) {
  const auto in = load_input(c);
  const Box w = in.set.window;
  const auto scales = c.scales.empty() ? nested_scales(w) : cubes(in.set.dim, c.scales);
  const Box kb = Box::cube(in.set.dim, 0.0, c.k_box);
  MeyerReport rep;
  if (in.set.generator.kind == Generator::Kind::explicit_list) {
    const PointSet& src = in.set;
    rep = meyer_check([&src](const Box& b) { return PointSet::make(src.dim, src.points, b, src.generator); }, scales, kb);
  } else {
    rep = meyer_check(in.set.generator, scales, kb);
  }
  emit(c, io::to_json(rep));
  summary("meyer", rep.verdict, "C = " + std::to_string(rep.constant));
  return exit_for(rep.verdict);
}

inline int cmd_krein(const RunConfig& c) {
  const auto in = load_input(c);
  PairSampler ps;
  ps.seed = c.seed;
  const auto kr = krein_check(in.measure, ps, c.krein_tol);
  ConfigSampler cs;
  cs.seed = c.seed;
  const auto gr = gram_psd_check(in.measure, cs, c.eps_psd);
  const Verdict v = kr.verdict == Verdict::pass && !gr.refuted() ? Verdict::pass : Verdict::fail;
  emit(c, {{"verdict", to_string(v)}, {"krein", io::to_json(kr)}, {"gram", io::to_json(gr)}});
  summary("krein", v, std::string("gram ") + gr.verdict());
  return exit_for(v);
}

inline int cmd_autocorr(const RunConfig& c) {
  const auto in = load_input(c);
  const int d = in.measure.dim();
  const double half = c.box > 0 ? c.box : centred_half_width(in.measure.window());
  const auto gamma = autocorrelation(in.measure, Box::cube(d, half));
  emit(c, io::to_json(gamma));
  if (!c.report.empty()) {
    const auto family = parse_family(c.family, d, half);
    io::write_json(c.report, io::to_json(autocorrelation_trace(in.measure, family, c.eps_atom)));
  }
  std::cerr << "autocorr: " << gamma.size() << " atoms\n";
  return kPass;
}

inline int cmd_sparse(const RunConfig& c) {
  const auto in = load_input(c);
  require(c.a > 0, "sparse needs --a > 0");
  const auto rep = sparseness_verify(in.measure, c.a, Box::cube(in.measure.dim(), 0.0, c.k_box));
  emit(c, io::to_json(rep));
  summary("sparse", rep.verdict, rep.b ? "b = " + io::fmt(*rep.b) : "a exceeds mu({0})");
  return exit_for(rep.verdict);
}

inline int cmd_rigidity(const RunConfig& c) {
  const auto in = load_input(c);
  ConfigSampler cs;
  cs.seed = c.seed;
  const auto rep = rigidity_check(in.set, cs);
  emit(c, io::to_json(rep));
  summary("rigidity", rep.verdict, rep.note);
  return exit_for(rep.verdict);
}

inline int cmd_epsdual(const RunConfig& c) {
  const auto in = load_input(c);
  const int d = in.set.dim;
  const Box dual = c.dual_window.empty() ? Box::cube(d, 10.0) : parse_window(c.dual_window, d);
  if (c.theorem2) {
    Theorem2Options opt;
    opt.dual_domain = dual;
    opt.phys_domain = c.window.empty() ? Box::cube(d, 10.0) : parse_window(c.window, d);
    opt.dual_spacing = opt.phys_spacing = c.spacing;
    const auto rep = theorem2_verify(in.set, c.eps, opt);
    emit(c, io::to_json(rep));
    summary("theorem2", rep.verdict, std::to_string(rep.checks.size()) + " points checked");
    return exit_for(rep.verdict);
  }
  const auto region = eps_dual(in.set, c.eps, dual, c.spacing);
  emit(c, io::to_json(region));
  std::cerr << "epsdual: " << region.representatives.size() << " components, " << region.true_count() << " of "
            << region.node_count() << " nodes\n";
  return kPass;
}

inline int cmd_theorem1(const RunConfig& c) {
  const auto in = load_input(c);
  const int d = in.measure.dim();
  const auto family = parse_family(c.family, d, centred_half_width(in.measure.window()));
  const auto scales = cubes(d, c.dual_scales.empty() ? std::vector<double>{5, 10, 20} : c.dual_scales);
  double a = c.a;
  if (c.a_rel > 0) a = c.a_rel * bragg_intensity(in.measure, Point::zero(d), family, c.eps_atom).intensity;
  require(a > 0, "theorem1 needs --a or --a-rel");
  Theorem1Options opt;
  opt.candidates.grid_res = c.grid;
  opt.eps_atom = c.eps_atom;
  const auto rep = theorem1_check(in.measure, in.set.generator, a, family, scales, Box::cube(d, 0.0, c.k_box), opt);
  emit(c, io::to_json(rep));
  summary("theorem1", rep.verdict, rep.status);
  return exit_for(rep.verdict);
}

// ---------------------------------------------------------------------------
// reproduce

struct Expectation {
  std::string name;
  bool expected = true;
  bool observed = false;
};

inline io::json expectations_json(const std::vector<Expectation>& ex, bool& all) {
  io::json a = io::json::array();
  all = true;
  for (const auto& e : ex) {
    const bool ok = e.expected == e.observed;
    all = all && ok;
    a.push_back({{"check", e.name}, {"expected", e.expected}, {"observed", e.observed}, {"match", ok}});
  }
  return a;
}

inline io::json reproduce_zpz(const std::filesystem::path& dir, std::vector<Expectation>& ex) {
  const Box w = Box::interval(-20, 20);
  const auto mu = cases::zpz_measure(w);
  auto mj = io::to_json(mu);
  mj["generator"] = io::to_json(cases::z_union_pi_z());
  io::write_json(dir / "zpz.json", mj);

  const auto i12 = high_intensity_set(mu, 1.2);
  ex.push_back({"I(1.2) = {0}", true, i12.size() == 1 && i12.contains(Point{0.0})});
  const auto high = [](const Box& b) { return high_intensity_set(cases::zpz_measure(b), 1.2); };
  const auto scales = cubes(1, {5, 10, 20});
  const auto m12 = meyer_check(high, scales, Box::interval(0, 1));
  ex.push_back({"I(1.2) covering radius diverges", true, m12.radius_diverges});

  const auto i10 = high_intensity_set(mu, 1.0);
  ex.push_back({"I(1.0) = (Z u piZ) in window", true, i10.size() == mu.size()});
  io::json growth = io::json::array();
  std::vector<std::size_t> counts;
  for (int n : {12, 24, 48}) {
    const auto in = high_intensity_set(cases::zpz_measure(cases::zpz_window(n)), 1.0);
    const auto diff = difference_set(in, in.window.difference_box());
    counts.push_back(weak_ud_count(diff, Box::interval(0, 1)));
    growth.push_back({{"range", n}, {"points", in.size()}, {"unit_box_count", counts.back()}});
  }
  ex.push_back({"I(1.0) - I(1.0) unit-box counts grow", true, counts[0] < counts[1] && counts[1] < counts[2]});

  const auto s12 = sparseness_verify(mu, 1.2, Box::interval(0, 1));
  const auto s10 = sparseness_verify(mu, 1.0, Box::interval(0, 1));
  ex.push_back({"a = 1.2 below the sparseness threshold", false, s12.hypothesis_met});
  io::write_json(dir / "sparse_a1.2.json", io::to_json(s12));
  io::write_json(dir / "sparse_a1.0.json", io::to_json(s10));
  io::write_json(dir / "meyer_I1.2.json", io::to_json(m12));
  io::write_text(dir / "I1.0.csv", io::points_csv(i10));
  return {{"I_1.2", io::points_json(i12.points)}, {"difference_counts", growth}};
}

inline io::json reproduce_union2d(const std::filesystem::path& dir, std::vector<Expectation>& ex) {
  const auto gen = cases::union2d();
  const auto family = VanHoveFamily::geometric(2, 8, 3);
  const auto ps = realize(gen, family.largest());
  io::write_json(dir / "union2d.json", io::to_json(ps));
  const auto omega = dirac_comb(ps);
  // beyond |k2| = 6 the peaks near (2m, 22/pi) and (2m, 7) are not resolved at this family
  const Box dual = Box::cube(2, 6.0);
  const auto cands = candidate_frequencies(gen, dual);
  const auto est = estimate_diffraction(omega, cands, family, dual);
  io::write_text(dir / "peaks.csv", io::peaks_csv(est.peaks));
  const std::vector<double> as{0.8, 1.5};
  const auto scales = cubes(2, {1.5, 3, 6});
  const auto scan = visible_set_density_scan(est, as, scales, Box::cube(2, 0.0, 1.0));
  io::json rows = io::json::array();
  for (const auto& e : scan) rows.push_back({{"a", e.a}, {"meyer", io::to_json(e.meyer)}});
  ex.push_back({"I(0.8) relatively dense", true, scan[0].meyer.relatively_dense});
  ex.push_back({"I(1.5) covering radius grows", true, scan[1].meyer.radius_diverges});
  io::write_json(dir / "density_scan.json", rows);
  return {{"gamma0", est.gamma0()}, {"threshold", kSparseFactor * est.gamma0()}};
}

inline io::json reproduce_fibonacci(const std::filesystem::path& dir, std::vector<Expectation>& ex) {
  const auto gen = fibonacci_generator();
  const auto family = VanHoveFamily::geometric(1, 25, 5);
  const auto ps = realize(gen, family.largest());
  io::write_json(dir / "fibonacci.json", io::to_json(ps));
  const auto omega = dirac_comb(ps);
  const auto scales = cubes(1, {5, 10, 20});
  const auto cands = candidate_frequencies(gen, scales.back());
  const auto est = estimate_diffraction(omega, cands, family, scales.back());
  io::write_text(dir / "peaks.csv", io::peaks_csv(est.peaks));
  const double a = 0.8 * est.gamma0();
  const auto t1 = theorem1_check(omega, gen, a, family, scales, Box::interval(0, 1));
  io::write_json(dir / "theorem1.json", io::to_json(t1));
  ex.push_back({"I(0.8 gamma0) is Meyer", true, t1.verdict == Verdict::pass});
  const auto sp = sparseness_verify(diffraction_measure(est), a, Box::interval(0, 1));
  io::write_json(dir / "sparse.json", io::to_json(sp));
  ex.push_back({"sparseness check on the diffraction atoms", true, sp.verdict == Verdict::pass});
  return {{"gamma0", est.gamma0()}, {"a", a}};
}

inline io::json reproduce_theorem2_lattice(const std::filesystem::path& dir, std::vector<Expectation>& ex) {
  const auto ps = generate_lattice(cases::diag({1.0}), Box::interval(-10, 10));
  const auto rep = theorem2_verify(ps, 0.5);
  io::write_json(dir / "theorem2.json", io::to_json(rep));
  ex.push_back({"Z, eps = 0.5", true, rep.verdict == Verdict::pass});
  return {{"gamma_points", rep.gamma.size()}};
}

inline int cmd_reproduce(const RunConfig& c) {
  const std::string& name = c.case_name;
  const std::filesystem::path dir = c.output.empty() ? std::filesystem::path("reproduce_" + name) : std::filesystem::path(c.output);
  std::filesystem::create_directories(dir);
  std::vector<Expectation> ex;
  io::json details;
  if (name == "zpz") details = reproduce_zpz(dir, ex);
  else if (name == "union2d") details = reproduce_union2d(dir, ex);
  else if (name == "fibonacci") details = reproduce_fibonacci(dir, ex);
  else if (name == "theorem2_lattice") details = reproduce_theorem2_lattice(dir, ex);
  else throw Error("unknown case '" + name + "' (zpz, union2d, fibonacci, theorem2_lattice)");
  bool all = false;
  const auto checks = expectations_json(ex, all);
  io::write_json(dir / "summary.json", {{"case", name}, {"all_match", all}, {"checks", checks}, {"details", details}});
  for (const auto& e : checks)
    std::cerr << (e["match"].get<bool>() ? "[match] " : "[MISMATCH] ") << e["check"].get<std::string>() << "\n";
  return all ? kPass : kFail;
}

inline int run(const RunConfig& c) {
  validate(c);
  if (c.command == "generate") return cmd_generate(c);
  if (c.command == "diffract") return cmd_diffract(c);
  if (c.command == "meyer") return cmd_meyer(c);
  if (c.command == "krein") return cmd_krein(c);
  if (c.command == "autocorr") return cmd_autocorr(c);
  if (c.command == "sparse") return cmd_sparse(c);
  if (c.command == "rigidity") return cmd_rigidity(c);
  if (c.command == "epsdual") return cmd_epsdual(c);
  if (c.command == "theorem1") return cmd_theorem1(c);
  if (c.command == "reproduce") return cmd_reproduce(c);
  throw Error("unknown command '" + c.command + "'");
}

}  // namespace bragg::cli
