// JSON and CSV serialization of point sets, measures, regions and reports.
#pragma once

#include <charconv>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <string>

#include "bragg/diffraction.hpp"
#include "bragg/dualsets.hpp"
#include "bragg/posdef.hpp"

namespace bragg::io {

using json = nlohmann::ordered_json;

/// Shortest decimal that round-trips to the same double.
inline std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

// ---------------------------------------------------------------------------
// Basic values

inline json to_json(const Point& p) {
  json a = json::array();
  for (int i = 0; i < p.dim; ++i) a.push_back(p[i]);
  return a;
}

inline Point point_from_json(const json& j) {
  require(j.is_array() && !j.empty() && j.size() <= kMaxDim, "point must be an array of 1 to 3 numbers");
  std::vector<double> c;
  for (const auto& v : j) c.push_back(v.get<double>());
  return Point::from(c);
}

inline json to_json(const Box& b) { return {{"lo", to_json(b.lo)}, {"hi", to_json(b.hi)}}; }

inline Box box_from_json(const json& j) { return Box(point_from_json(j.at("lo")), point_from_json(j.at("hi"))); }

inline json points_json(std::span<const Point> pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(to_json(p));
  return a;
}

inline json to_json(const Generator& g) {
  json j;
  j["kind"] = kind_name(g.kind);
  if (!g.label.empty()) j["label"] = g.label;
  switch (g.kind) {
    case Generator::Kind::explicit_list:
      break;
    case Generator::Kind::lattice:
    case Generator::Kind::model_set: {
      json rows = json::array();
      for (int r = 0; r < g.basis.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < g.basis.cols(); ++c) row.push_back(g.basis(r, c));
        rows.push_back(row);
      }
      j["basis"] = rows;
      if (g.kind == Generator::Kind::model_set) j["internal_window"] = {g.internal_lo, g.internal_hi};
      break;
    }
    case Generator::Kind::union_of:
    case Generator::Kind::translate:
    case Generator::Kind::scale: {
      json parts = json::array();
      for (const auto& p : g.parts) parts.push_back(to_json(p));
      j["parts"] = parts;
      if (g.kind == Generator::Kind::translate) j["shift"] = to_json(g.shift);
      if (g.kind == Generator::Kind::scale) j["factor"] = g.factor;
      break;
    }
  }
  return j;
}

/// Explicit generators do not store their points; pass them in.
inline Generator generator_from_json(const json& j, const std::vector<Point>& explicit_pts = {}) {
  const std::string kind = j.value("kind", "explicit");
  const std::string label = j.value("label", kind);
  if (kind == "explicit") return Generator::explicit_points(explicit_pts, label);
  if (kind == "lattice" || kind == "model_set") {
    const auto& rows = j.at("basis");
    require(rows.is_array() && !rows.empty(), "generator basis must be a nonempty matrix");
    Eigen::MatrixXd b(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      require(rows[r].size() == rows[0].size(), "generator basis rows must have equal length");
      for (std::size_t c = 0; c < rows[r].size(); ++c) b(r, c) = rows[r][c].get<double>();
    }
    if (kind == "lattice") return Generator::lattice(b, label);
    const auto& w = j.at("internal_window");
    return Generator::model_set(b, w.at(0).get<double>(), w.at(1).get<double>(), label);
  }
  Generator g;
  g.label = label;
  for (const auto& p : j.at("parts")) g.parts.push_back(generator_from_json(p, explicit_pts));
  if (kind == "union") {
    g.kind = Generator::Kind::union_of;
  } else if (kind == "translate") {
    g.kind = Generator::Kind::translate;
    g.shift = point_from_json(j.at("shift"));
  } else if (kind == "scale") {
    g.kind = Generator::Kind::scale;
    g.factor = j.at("factor").get<double>();
    require(g.factor != 0, "scale factor must be nonzero");
  } else {
    throw Error("unknown generator kind '" + kind + "'");
  }
  return g;
}

// ---------------------------------------------------------------------------
// Point sets and measures

inline json to_json(const PointSet& ps) {
  return {{"dim", ps.dim}, {"points", points_json(ps.points)}, {"window", to_json(ps.window)},
          {"generator", to_json(ps.generator)}};
}

inline PointSet pointset_from_json(const json& j) {
  const int dim = j.at("dim").get<int>();
  std::vector<Point> pts;
  for (const auto& p : j.at("points")) pts.push_back(point_from_json(p));
  const Box window = j.contains("window") ? box_from_json(j.at("window")) : bounding_box(pts, dim);
  Generator g = j.contains("generator") ? generator_from_json(j.at("generator"), pts) : Generator::explicit_points(pts);
  return PointSet::make(dim, pts, window, std::move(g));
}

inline json to_json(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) atoms.push_back({{"x", to_json(a.x)}, {"re", a.w.real()}, {"im", a.w.imag()}});
  json j = {{"dim", mu.dim()}, {"atoms", atoms}, {"tol", mu.tol()}, {"window", to_json(mu.window())}};
  if (!mu.provenance().empty()) j["provenance"] = mu.provenance();
  return j;
}

inline AtomicMeasure measure_from_json(const json& j) {
  const int dim = j.at("dim").get<int>();
  std::vector<Atom> atoms;
  std::vector<Point> locs;
  for (const auto& a : j.at("atoms")) {
    Atom at{point_from_json(a.at("x")), cplx(a.value("re", 0.0), a.value("im", 0.0))};
    require(at.x.dim == dim, "atom dimension mismatch");
    atoms.push_back(at);
    locs.push_back(at.x);
  }
  const Box window = j.contains("window") ? box_from_json(j.at("window")) : bounding_box(locs, dim);
  return AtomicMeasure::from_atoms(dim, window, atoms, j.value("tol", -1.0), j.value("provenance", std::string()));
}

/// A measure file ({atoms}) or a point set file ({points}, read as its Dirac comb).
inline AtomicMeasure load_measure(const json& j) {
  if (j.contains("atoms")) return measure_from_json(j);
  return dirac_comb(pointset_from_json(j));
}

/// A point set file, or the support of a measure file (generator kept when present).
inline PointSet load_pointset(const json& j) {
  if (j.contains("points")) return pointset_from_json(j);
  auto ps = support(measure_from_json(j));
  if (j.contains("generator")) ps.generator = generator_from_json(j.at("generator"), ps.points);
  return ps;
}

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("invalid JSON in '" + path + "': " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write '" + path + "'");
  out << text;
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// CSV

inline std::string points_csv(const PointSet& ps) {
  std::string s;
  for (int i = 0; i < ps.dim; ++i) s += (i ? ",x" : "x") + std::to_string(i);
  s += "\n";
  for (const auto& p : ps.points) {
    for (int i = 0; i < ps.dim; ++i) s += (i ? "," : "") + fmt(p[i]);
    s += "\n";
  }
  return s;
}

inline std::string measure_csv(const AtomicMeasure& mu) {
  std::string s;
  for (int i = 0; i < mu.dim(); ++i) s += "x" + std::to_string(i) + ",";
  s += "re,im\n";
  for (const auto& a : mu.atoms()) {
    for (int i = 0; i < mu.dim(); ++i) s += fmt(a.x[i]) + ",";
    s += fmt(a.w.real()) + "," + fmt(a.w.imag()) + "\n";
  }
  return s;
}

inline std::string peaks_csv(std::span<const BraggPeak> peaks) {
  std::string s;
  const int d = peaks.empty() ? 1 : peaks.front().k.dim;
  for (int i = 0; i < d; ++i) s += "k" + std::to_string(i) + ",";
  s += "intensity,stderr_proxy,converged\n";
  for (const auto& p : peaks) {
    for (int i = 0; i < d; ++i) s += fmt(p.k[i]) + ",";
    s += fmt(p.intensity) + "," + fmt(p.stderr_proxy) + "," + (p.converged ? "1" : "0") + "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Regions: run-length encoding per grid row (rows run along axis 0)

inline json to_json(const GridRegion& g) {
  const std::size_t row = static_cast<std::size_t>(g.steps[0] + 1);
  json rows = json::array();
  for (std::size_t start = 0; start < g.mask.size(); start += row) {
    json runs = json::array();
    std::size_t i = 0;
    while (i < row) {
      if (!g.mask[start + i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < row && g.mask[start + j]) ++j;
      runs.push_back({i, j - i});
      i = j;
    }
    rows.push_back(runs);
  }
  return {{"domain", to_json(g.domain)}, {"spacing", g.spacing}, {"steps", g.steps},
          {"true_nodes", g.true_count()}, {"rows", rows}, {"representatives", points_json(g.representatives)}};
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const MeyerReport& r) {
  return {{"verdict", to_string(r.verdict)},
          {"relatively_dense", r.relatively_dense},
          {"radius_diverges", r.radius_diverges},
          {"counts_bounded", r.counts_bounded},
          {"counts_grow", r.counts_grow},
          {"constant", r.constant},
          {"half_widths", r.half_widths},
          {"covering_radii", r.covering_radii},
          {"point_counts", r.point_counts},
          {"diff_set_counts", r.diff_set_counts},
          {"witnesses", r.witnesses},
          {"windowed_evidence", r.windowed_evidence}};
}

inline json cplx_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline json to_json(const GramReport& r) {
  json j = {{"verdict", r.verdict()},
            {"configurations", r.configurations},
            {"skipped", r.skipped},
            {"eps_psd", r.eps_psd}};
  j["min_relative_eigenvalue"] = std::isfinite(r.min_relative_eigenvalue) ? json(r.min_relative_eigenvalue) : json();
  if (r.hermitian_violation)
    j["hermitian_violation"] = {{"x", to_json(r.hermitian_violation->x)},
                                {"f_x", cplx_json(r.hermitian_violation->f_x)},
                                {"f_minus_x", cplx_json(r.hermitian_violation->f_minus_x)}};
  if (r.witness) {
    json m = json::array();
    for (int a = 0; a < r.witness->matrix.rows(); ++a) {
      json row = json::array();
      for (int b = 0; b < r.witness->matrix.cols(); ++b) row.push_back(cplx_json(r.witness->matrix(a, b)));
      m.push_back(row);
    }
    j["witness"] = {{"config", points_json(r.witness->config)},
                    {"min_eigenvalue", r.witness->min_eigenvalue},
                    {"matrix", m}};
  }
  return j;
}

inline json to_json(const KreinReport& r) {
  json j = {{"verdict", to_string(r.verdict)}, {"f0", cplx_json(r.f0)}, {"pairs", r.pairs},
            {"threshold", r.threshold}, {"nonpositive_origin", r.nonpositive_origin}, {"note", r.note}};
  j["max_violation"] = std::isfinite(r.max_violation) ? json(r.max_violation) : json();
  if (r.witness)
    j["witness"] = {{"x", to_json(r.witness->x)}, {"t", to_json(r.witness->t)}, {"lhs", r.witness->lhs},
                    {"rhs", r.witness->rhs}};
  if (r.bound_witness) j["bound_witness"] = to_json(*r.bound_witness);
  return j;
}

inline json to_json(const SparsenessReport& r) {
  json j = {{"verdict", to_string(r.verdict)},
            {"a", r.a},
            {"mu0", r.mu0},
            {"threshold", kSparseFactor * r.mu0},
            {"hypothesis_met", r.hypothesis_met},
            {"b", r.b ? json(*r.b) : json()},
            {"I", points_json(r.high_set.points)},
            {"J_size", r.threshold_set.size()},
            {"translation_constant", r.translation_constant},
            {"count_bound", r.count_bound ? json(*r.count_bound) : json()},
            {"measured_count", r.measured_count},
            {"containment", r.containment},
            {"note", r.note}};
  if (r.containment_witness) j["containment_witness"] = to_json(*r.containment_witness);
  return j;
}

inline json to_json(const RigidityReport& r) {
  json j = {{"verdict", to_string(r.verdict)}, {"subgroup", r.subgroup},        {"pd_consistent", !r.gram.refuted()},
            {"agree", r.agree},                 {"unit_box_count", r.unit_box_count}, {"note", r.note},
            {"gram", to_json(r.gram)}};
  if (r.subgroup_witness) {
    const auto& w = *r.subgroup_witness;
    j["subgroup_witness"] = w.missing_origin ? json{{"missing_origin", true}}
                                             : json{{"x", to_json(w.x)}, {"y", to_json(w.y)},
                                                    {"difference", to_json(w.difference)}};
  }
  return j;
}

inline json to_json(const BraggPeak& p) {
  return {{"k", to_json(p.k)}, {"intensity", p.intensity}, {"trace", p.trace}, {"stderr_proxy", p.stderr_proxy},
          {"converged", p.converged}};
}

inline json to_json(const Theorem1Report& r) {
  json nest = json::array();
  for (const auto& n : r.nesting)
    nest.push_back({{"b", n.b}, {"size_a", n.size_a}, {"size_b", n.size_b}, {"nested", n.nested}});
  return {{"verdict", to_string(r.verdict)}, {"status", r.status}, {"a", r.a}, {"gamma0", r.gamma0},
          {"gamma0_stderr", r.gamma0_stderr}, {"threshold", r.threshold}, {"guard", r.guard},
          {"hypothesis_met", r.hypothesis_met}, {"meyer", r.meyer ? to_json(*r.meyer) : json()},
          {"nesting", nest}};
}

inline json to_json(const Theorem2Report& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"y", to_json(c.y)}, {"intensity", c.peak.intensity}, {"stderr_proxy", c.peak.stderr_proxy},
                      {"required", c.required}, {"ok", c.ok}});
  return {{"verdict", to_string(r.verdict)},
          {"eps", r.eps},
          {"eps_prime", r.eps_prime},
          {"hypothesis_verified", r.hypothesis_verified},
          {"hypothesis", r.hypothesis ? to_json(*r.hypothesis) : json()},
          {"first_dual_components", r.first_dual_components},
          {"lambda_prime", points_json(r.lambda_prime.points)},
          {"gamma", points_json(r.gamma.points)},
          {"lambda_in_lambda_prime", r.lambda_in_lambda_prime},
          {"missing_from_lambda_prime", points_json(r.missing_from_lambda_prime)},
          {"lambda_prime_in_gamma_dual", r.lambda_prime_in_gamma_dual},
          {"delta_tension", points_json(r.delta_tension)},
          {"gamma0", r.zero.intensity},
          {"checks", checks},
          {"notes", r.notes}};
}

inline json to_json(const AutocorrelationTrace& t) {
  json atoms = json::array();
  for (const auto& a : t.atoms)
    atoms.push_back({{"z", to_json(a.z)}, {"value", cplx_json(a.value)}, {"delta", a.delta}, {"converged", a.converged}});
  json sizes = json::array();
  for (const auto& g : t.gammas) sizes.push_back(g.size());
  return {{"eps_atom", t.eps_atom}, {"atom_counts", sizes}, {"atoms", atoms}};
}

}  // namespace bragg::io
