#pragma once

// Suite execution behind the command-line tool: config parsing, suites, JSON
// report and CSV table assembly, exit codes.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <locale>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chernlab/bochner.hpp"
#include "chernlab/global.hpp"
#include "chernlab/probe.hpp"
#include "chernlab/registry.hpp"
#include "chernlab/schema.hpp"
#include "chernlab/schemas_embedded.hpp"

namespace chernlab {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitInvalid = 2, kExitBreakdown = 3 };

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"curvature", "bochner1", "bochner2", "schwarz-a", "schwarz-b", "schwarz-c",
                                              "rigidity",  "integral", "gauduchon", "kahler",    "all"};
  return names;
}

/// Per-point values for CSV output: coordinates, then named scalars.
struct CsvTable {
  int dim = 0;
  std::vector<std::string> columns;
  std::vector<std::pair<ChartPoint, std::map<std::string, double>>> rows;

  void add(const ChartPoint& p, const std::vector<std::pair<std::string, double>>& values, const std::string& prefix = {}) {
    std::map<std::string, double> row;
    for (const auto& [name, v] : values) {
      const std::string col = prefix.empty() ? name : prefix + "." + name;
      if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
      row[col] = v;
    }
    dim = std::max(dim, p.dim());
    rows.emplace_back(p, std::move(row));
  }

  std::string render() const {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17);
    for (int k = 1; k <= dim; ++k) os << (k > 1 ? "," : "") << "re_z" << k << ",im_z" << k;
    for (const auto& c : columns) os << "," << c;
    os << "\n";
    for (const auto& [p, row] : rows) {
      for (int k = 0; k < dim; ++k) {
        if (k > 0) os << ",";
        if (k < p.dim()) os << p[k].real() << "," << p[k].imag();
        else os << ",";
      }
      for (const auto& c : columns) {
        os << ",";
        auto it = row.find(c);
        if (it != row.end()) os << it->second;
      }
      os << "\n";
    }
    return os.str();
  }
};

struct RunResult {
  json report;
  int exit_code = kExitPass;
  CsvTable table;
};

/// Writes through a temporary file and a rename, so readers never see a partial file.
inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::InvalidArgument, "cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) fail(ErrorKind::InvalidArgument, "write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

namespace detail {

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const ChartPoint& p) {
  json out = json::array();
  for (int k = 0; k < p.dim(); ++k) out.push_back(to_json(p[k]));
  return out;
}

inline json to_json(const CMatrix& M) {
  json out = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(to_json(M(i, j)));
    out.push_back(row);
  }
  return out;
}

inline json to_json(const RVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

// Non-finite numbers are not representable in JSON; they appear as null.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Settings {
  std::string suite;
  json scene_echo;
  MetricField g;
  std::optional<MetricField> h;
  std::optional<ChartedMap> f;
  std::vector<ChartPoint> points;
  std::optional<GridSpec> grid;
  std::optional<int> ell;
  std::string part = "a";
  FdConfig fd = FdConfig::precise();
  ProbeOptions probe;
  double tol_bochner = kBochnerTolerance;
  double tol_gram = 1e-7;
  double tol_kahler = kKahlerTolerance;
  double tol_gauduchon = kGauduchonTolerance;
  json echo;

  int m() const { return g.dim; }
  MapScene scene() const {
    if (!h || !f) fail(ErrorKind::InvalidArgument, "suite '" + suite + "' needs scene.target and scene.map");
    return MapScene{g, *h, *f};
  }
  const GridSpec& require_grid() const {
    if (!grid) fail(ErrorKind::InvalidArgument, "suite '" + suite + "' needs a grid");
    return *grid;
  }
  const std::vector<ChartPoint>& require_points() const {
    if (points.empty()) fail(ErrorKind::InvalidArgument, "suite '" + suite + "' needs points or a grid");
    return points;
  }
};

inline json component_echo(const json& c) {
  return json{{"id", c.at("id")}, {"params", c.contains("params") ? c.at("params") : json::object()}};
}

inline GridSpec parse_grid(const json& j, int domain_dim) {
  const std::string kind = j.at("kind").get<std::string>();
  const auto res = j.at("resolution").get<std::vector<int>>();
  const int dim = j.value("dim", domain_dim);
  if (dim != domain_dim) fail(ErrorKind::InvalidArgument, "grid dimension does not match the domain metric");
  if (kind == "rectangular") {
    if (!j.contains("bounds")) fail(ErrorKind::InvalidArgument, "rectangular grid needs bounds");
    std::vector<std::pair<double, double>> bounds;
    for (const auto& b : j.at("bounds")) bounds.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
    return GridSpec::rectangular(dim, bounds, res);
  }
  if (kind == "torus") {
    std::vector<cplx> l{1.0, I_unit};
    if (j.contains("lattice")) l = params::complex_list(j, "lattice");
    if (res.size() != 2) fail(ErrorKind::InvalidArgument, "torus grid needs two resolutions");
    return GridSpec::torus(l[0], l[1], res[0], res[1]);
  }
  if (res.size() != 2) fail(ErrorKind::InvalidArgument, "disk_polar grid needs (n_radial, n_angular)");
  return GridSpec::disk_polar(dim, j.value("radius", 0.9), res[0], res[1]);
}

inline Settings parse_settings(const std::string& suite, const json& cfg) {
  Settings s;
  s.suite = suite;
  if (cfg.contains("suite") && cfg.at("suite").get<std::string>() != suite)
    fail(ErrorKind::InvalidArgument, "config names suite '" + cfg.at("suite").get<std::string>() + "' but '" + suite + "' was requested");

  const auto& reg = Registry::instance();
  const json& scene = cfg.at("scene");
  s.scene_echo = json{{"domain", component_echo(scene.at("domain"))}};
  s.g = reg.metric(scene["domain"]["id"].get<std::string>(), s.scene_echo["domain"]["params"]);
  if (scene.contains("target")) {
    s.scene_echo["target"] = component_echo(scene.at("target"));
    s.h = reg.metric(scene["target"]["id"].get<std::string>(), s.scene_echo["target"]["params"]);
  }
  if (scene.contains("map")) {
    if (!s.h) fail(ErrorKind::InvalidArgument, "scene.map needs scene.target");
    s.scene_echo["map"] = component_echo(scene.at("map"));
    s.f = reg.map(scene["map"]["id"].get<std::string>(), s.scene_echo["map"]["params"],
                  MapContext{s.g.dim, s.h->dim, s.scene_echo["target"]["id"].get<std::string>()});
  }

  if (cfg.contains("grid")) s.grid = parse_grid(cfg.at("grid"), s.g.dim);
  if (cfg.contains("points")) {
    for (const auto& p : cfg.at("points")) {
      CVector z(static_cast<Eigen::Index>(p.size()));
      for (std::size_t k = 0; k < p.size(); ++k) z[static_cast<Eigen::Index>(k)] = params::to_complex(p[k], "points");
      if (z.size() != s.g.dim) fail(ErrorKind::InvalidArgument, "point has " + std::to_string(z.size()) + " coordinates, domain has " + std::to_string(s.g.dim));
      s.points.emplace_back(z);
    }
  } else if (s.grid) {
    s.points = s.grid->points();
  }
  if (cfg.contains("ell")) s.ell = cfg.at("ell").get<int>();
  s.part = cfg.value("part", std::string("a"));

  if (cfg.contains("fd")) {
    const json& fd = cfg.at("fd");
    s.fd.step = fd.value("step", s.fd.step);
    s.fd.richardson = fd.value("richardson", s.fd.richardson);
    s.fd.min_domain_margin = fd.value("min_domain_margin", 4.0 * s.fd.step);
  }
  s.fd.validate();
  s.probe.seed = cfg.value("seed", std::uint64_t{0});
  if (cfg.contains("probe")) {
    const json& p = cfg.at("probe");
    s.probe.n_samples = p.value("n_samples", s.probe.n_samples);
    s.probe.refine_steps = p.value("refine_steps", s.probe.refine_steps);
    s.probe.initial_step = p.value("initial_step", s.probe.initial_step);
  }
  if (cfg.contains("tolerances")) {
    const json& t = cfg.at("tolerances");
    s.tol_bochner = t.value("bochner", s.tol_bochner);
    s.tol_gram = t.value("gram", s.tol_gram);
    s.tol_kahler = t.value("kahler", s.tol_kahler);
    s.tol_gauduchon = t.value("gauduchon", s.tol_gauduchon);
  }

  s.echo = cfg;
  s.echo["suite"] = suite;
  s.echo["scene"] = s.scene_echo;
  s.echo["fd"] = json{{"step", s.fd.step}, {"richardson", s.fd.richardson}, {"min_domain_margin", s.fd.min_domain_margin}};
  s.echo["seed"] = s.probe.seed;
  s.echo["probe"] = json{{"n_samples", s.probe.n_samples}, {"refine_steps", s.probe.refine_steps}, {"initial_step", s.probe.initial_step}};
  s.echo["tolerances"] = json{{"bochner", s.tol_bochner}, {"gram", s.tol_gram}, {"kahler", s.tol_kahler}, {"gauduchon", s.tol_gauduchon}};
  return s;
}

// ---------------------------------------------------------------------------
// Suites. Each appends result objects and CSV rows.
// ---------------------------------------------------------------------------

struct Sink {
  json results = json::array();
  CsvTable table;
  std::string prefix;  // column prefix, set when several suites share one table
};

inline void suite_curvature(const Settings& s, Sink& out) {
  const auto& pts = s.require_points();
  std::vector<CurvatureSite> sites(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { sites[i] = curvature_site(s.g, pts[i], s.fd); });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const CurvatureSite& site = sites[i];
    ProbeOptions opt = s.probe;
    opt.seed = s.probe.seed + i;
    const auto hs = curvature_sign_probe(std::vector<CurvatureSite>{site}, CurvatureKind::Holomorphic, 1, opt);
    const double S = scalar_curvature(site.R, site.G);
    json r{{"check", "curvature"},
           {"point", to_json(pts[i])},
           {"scalar_curvature", number(S)},
           {"ricci_first", to_json(ricci_first(site.R, site.G))},
           {"ricci_second", to_json(ricci_second(site.R, site.G))},
           {"holomorphic_sectional", {{"min", number(hs.min)}, {"max", number(hs.max)}}},
           {"max_abs_curvature", number(site.R.max_abs())},
           {"kahler_symmetry_residual", number(site.R.kahler_symmetry_residual())},
           {"pass", std::isfinite(S) && std::isfinite(site.R.max_abs())}};
    out.results.push_back(std::move(r));
    out.table.add(pts[i],
                  {{"scalar_curvature", S},
                   {"holomorphic_min", hs.min},
                   {"holomorphic_max", hs.max},
                   {"max_abs_curvature", site.R.max_abs()},
                   {"kahler_symmetry_residual", site.R.kahler_symmetry_residual()}},
                  out.prefix);
  }
}

inline void suite_bochner(const Settings& s, int which, Sink& out) {
  const MapScene scene = s.scene();
  const auto& pts = s.require_points();
  const int m = s.m();
  std::vector<int> ells;
  if (s.ell) ells.push_back(*s.ell);
  else
    for (int l = 1; l <= m; ++l) ells.push_back(l);
  for (int l : ells)
    if (l < 1 || l > m) fail(ErrorKind::InvalidArgument, "ell must lie in [1, m]");
  const std::string name = which == 1 ? "bochner1" : "bochner2";

  struct Row {
    BochnerReport rep;
    double gram_min = 0.0;
  };
  std::vector<std::vector<Row>> rows(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto& chart = scene.f.at(pts[i]);
    const NormalizedScene ns = normalize_scene(scene.g, scene.h, chart, pts[i], s.fd);
    for (int l : ells) {
      Row r;
      r.rep = which == 1 ? verify_eq1(ns, l, s.fd) : verify_eq2(ns, l, s.fd);
      if (which == 2) r.gram_min = min_eigenvalue(eq2_gram_residue(r.rep));
      rows[i].push_back(std::move(r));
    }
  });
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (const Row& row : rows[i]) {
      const BochnerReport& b = row.rep;
      bool pass = b.residual <= s.tol_bochner;
      json r{{"check", name},
             {"point", to_json(pts[i])},
             {"ell", b.ell},
             {"residual", number(b.residual)},
             {"tolerance", s.tol_bochner},
             {"lhs_trace", number(b.lhs.trace().real())},
             {"rhs_trace", number(b.rhs.trace().real())},
             {"lhs_error_estimate", number(b.lhs_error_estimate)},
             {"breakdown",
              {{"curvature_domain", number(b.breakdown.curvature_M.trace().real())},
               {"curvature_target", number(b.breakdown.curvature_N.trace().real())},
               {"metric_derivative", number(b.breakdown.metric_derivative.trace().real())},
               {"gram", number(b.breakdown.gram.trace().real())}}}};
      std::vector<std::pair<std::string, double>> csv{{"ell", double(b.ell)},
                                                      {"residual", b.residual},
                                                      {"lhs_trace", b.lhs.trace().real()},
                                                      {"rhs_trace", b.rhs.trace().real()}};
      if (which == 2) {
        r["gram_min_eigenvalue"] = number(row.gram_min);
        pass = pass && row.gram_min >= -s.tol_gram;
        csv.emplace_back("gram_min_eigenvalue", row.gram_min);
      }
      r["pass"] = pass;
      out.results.push_back(std::move(r));
      out.table.add(pts[i], csv, out.prefix);
    }
}

inline json witness_json(const ProbeWitness& w, const std::vector<ChartPoint>& pts) {
  json out{{"value", number(w.value)}, {"point_index", w.point_index}};
  if (w.point_index >= 0 && w.point_index < static_cast<int>(pts.size())) out["point"] = to_json(pts[static_cast<std::size_t>(w.point_index)]);
  return out;
}

inline void suite_schwarz(const Settings& s, const std::string& part, Sink& out) {
  const MapScene scene = s.scene();
  const GridSpec& grid = s.require_grid();
  const std::string name = "schwarz-" + part;
  try {
    EstimateReport r;
    if (part == "a") r = check_estimate_a(scene, grid, s.fd, s.probe);
    else if (part == "b") r = check_estimate_b(scene, grid, s.ell.value_or(1), s.fd, s.probe);
    else r = check_estimate_c(scene, grid, s.ell.value_or(1), s.fd, s.probe);
    const auto pts = grid.points();
    json j{{"check", name},
           {"ell", r.ell},
           {"hypothesis_probe",
            {{"K", number(r.probe.K)},
             {"kappa", number(r.probe.kappa)},
             {"K_source", r.probe.K_source},
             {"kappa_source", r.probe.kappa_source},
             {"witnesses", {{"K", witness_json(r.probe.K_witness, pts)}, {"kappa", witness_json(r.probe.kappa_witness, pts)}}}}},
           {"bound", number(r.bound)},
           {"observed_max", number(r.observed_max)},
           {"argmax", r.argmax >= 0 ? to_json(pts[static_cast<std::size_t>(r.argmax)]) : json(nullptr)},
           {"margin", number(r.margin)},
           {"points_checked", r.points_checked},
           {"pass", r.pass}};
    out.results.push_back(std::move(j));
    for (std::size_t i = 0; i < pts.size(); ++i) out.table.add(pts[i], {{"observed", r.observed[i]}, {"bound", r.bound}}, out.prefix);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::HypothesisFail && e.kind() != ErrorKind::KahlerRequired) throw;
    out.results.push_back(json{{"check", name},
                               {"pass", false},
                               {"hypothesis_fail", e.kind() == ErrorKind::HypothesisFail},
                               {"kahler_required", e.kind() == ErrorKind::KahlerRequired},
                               {"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}});
  }
}

inline void suite_rigidity(const Settings& s, Sink& out) {
  const MapScene scene = s.scene();
  const GridSpec& grid = s.require_grid();
  const RigidityReport r = rigidity_witness(scene, grid, s.part, s.ell.value_or(s.m()), s.fd, s.probe);
  const bool pass = r.degenerate || r.residual <= s.tol_bochner;
  json j{{"check", "rigidity"},
         {"part", r.part},
         {"ell", r.ell},
         {"point", to_json(r.point)},
         {"observed_max", number(r.observed_max)},
         {"degenerate", r.degenerate},
         {"lambdas", to_json(r.lambdas)},
         {"psi_lhs", number(r.psi_lhs)},
         {"psi_rhs", number(r.psi_rhs)},
         {"psi_rhs_sign", r.psi_rhs > 0.0 ? 1 : (r.psi_rhs < 0.0 ? -1 : 0)},
         {"trace_lhs", number(r.trace_lhs)},
         {"trace_rhs", number(r.trace_rhs)},
         {"psi_curvature_domain", number(r.curvature_M_trace)},
         {"psi_curvature_target", number(r.curvature_N_trace)},
         {"K_probe", r.K_probe ? number(*r.K_probe) : json(nullptr)},
         {"kappa_probe", r.kappa_probe ? number(*r.kappa_probe) : json(nullptr)},
         {"note", r.note},
         {"pass", pass}};
  if (!r.degenerate) j["residual"] = number(r.residual);
  out.results.push_back(std::move(j));
  const auto pts = grid.points();
  for (std::size_t i = 0; i < pts.size(); ++i) out.table.add(pts[i], {{"observed", r.observed[i]}}, out.prefix);
}

inline void suite_integral(const Settings& s, Sink& out) {
  const MapScene scene = s.scene();
  const GridSpec& grid = s.require_grid();
  const IntegralReport r = integral_inequality_check(scene, grid, zero_field(), s.fd);
  out.results.push_back(json{{"check", "integral"},
                             {"lhs", number(r.lhs)},
                             {"rhs", number(r.rhs)},
                             {"quadrature_error_estimate", number(r.quadrature_error_estimate)},
                             {"lhs_coarse", number(r.lhs_coarse)},
                             {"rhs_coarse", number(r.rhs_coarse)},
                             {"periodicity_residual", number(r.periodicity_residual)},
                             {"nondegenerate", r.nondegenerate},
                             {"note", r.nondegenerate ? "" : "map has rank below m at every grid point"},
                             {"points", r.points},
                             {"pass", r.pass}});
  const auto pts = grid.points();
  for (std::size_t i = 0; i < pts.size(); ++i)
    out.table.add(pts[i], {{"lhs_integrand", r.lhs_integrand[i]}, {"rhs_integrand", r.rhs_integrand[i]}}, out.prefix);
}

inline void suite_property(const Settings& s, const std::string& which, Sink& out) {
  const auto& pts = s.require_points();
  const PropertyCheck c = which == "kahler" ? kahler_check(s.g, pts, s.fd, s.tol_kahler)
                                            : gauduchon_check(s.g, pts, s.fd, s.tol_gauduchon);
  out.results.push_back(json{{"check", which},
                             {"residual", number(c.residual)},
                             {"tolerance", which == "kahler" ? s.tol_kahler : s.tol_gauduchon},
                             {"worst_point", c.worst_point >= 0 ? to_json(pts[static_cast<std::size_t>(c.worst_point)]) : json(nullptr)},
                             {"points", pts.size()},
                             {"pass", c.passed}});
  for (std::size_t i = 0; i < pts.size(); ++i) out.table.add(pts[i], {{"residual", c.per_point[i]}}, out.prefix);
}

inline json skipped(const std::string& check, const std::string& reason) {
  return json{{"check", check}, {"pass", true}, {"skipped", true}, {"reason", reason}};
}

inline void run_suite(const Settings& s, const std::string& suite, Sink& out) {
  if (suite == "curvature") suite_curvature(s, out);
  else if (suite == "bochner1") suite_bochner(s, 1, out);
  else if (suite == "bochner2") suite_bochner(s, 2, out);
  else if (suite == "schwarz-a") suite_schwarz(s, "a", out);
  else if (suite == "schwarz-b") suite_schwarz(s, "b", out);
  else if (suite == "schwarz-c") suite_schwarz(s, "c", out);
  else if (suite == "rigidity") suite_rigidity(s, out);
  else if (suite == "integral") suite_integral(s, out);
  else if (suite == "kahler" || suite == "gauduchon") suite_property(s, suite, out);
  else fail(ErrorKind::InvalidArgument, "unknown suite '" + suite + "'");
}

inline void run_all(const Settings& s, Sink& out) {
  const bool has_map = s.h && s.f;
  const bool torus = s.grid && s.grid->kind == GridKind::Torus;
  auto sub = [&](const std::string& suite) {
    out.prefix = suite;
    run_suite(s, suite, out);
  };
  sub("curvature");
  sub("kahler");
  sub("gauduchon");
  if (!has_map) {
    for (const char* name : {"bochner1", "bochner2", "schwarz-a", "schwarz-b", "schwarz-c", "rigidity", "integral"})
      out.results.push_back(skipped(name, "scene has no map"));
    return;
  }
  sub("bochner1");
  sub("bochner2");
  if (!s.grid || torus) {
    for (const char* name : {"schwarz-a", "schwarz-b", "schwarz-c", "rigidity"})
      out.results.push_back(skipped(name, torus ? "torus grids are used by the integral suite only" : "no grid"));
  } else {
    sub("schwarz-a");
    const int lb = s.ell.value_or(1);
    if (lb >= 1 && lb < s.m()) sub("schwarz-b");
    else out.results.push_back(skipped("schwarz-b", "needs 1 <= ell < m"));
    sub("schwarz-c");
    sub("rigidity");
  }
  if (torus) sub("integral");
  else out.results.push_back(skipped("integral", "needs a torus grid"));
}

inline json error_json(const std::string& kind, const std::string& message) { return json{{"kind", kind}, {"message", message}}; }

}  // namespace detail

/// Runs `suite` on the configuration text. Never throws for bad input or numerical
/// failures; those are reported through the exit code and the report's error field.
inline RunResult run(const std::string& suite, const std::string& config_text, std::optional<std::uint64_t> seed = {}) {
  const auto start = std::chrono::steady_clock::now();
  RunResult out;
  json report{{"suite", suite}, {"scene", nullptr}, {"config", nullptr}, {"results", json::array()},
              {"pass", false}, {"max_residual", nullptr}};
  auto finish = [&](int code) {
    report["exit_code"] = code;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report["timing"] = json{{"seconds", secs}};
    out.report = std::move(report);
    out.exit_code = code;
    return out;
  };

  if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end()) {
    report["error"] = detail::error_json("InvalidArgument", "unknown suite '" + suite + "'");
    return finish(kExitInvalid);
  }
  static const JsonSchema config_schema(schemas::config);
  if (auto problem = config_schema.check(config_text)) {
    report["error"] = detail::error_json("InvalidConfig", *problem);
    return finish(kExitInvalid);
  }

  detail::Settings settings;
  detail::Sink sink;
  try {
    json cfg = json::parse(config_text);
    if (seed) cfg["seed"] = *seed;
    settings = detail::parse_settings(suite, cfg);
    report["scene"] = settings.scene_echo;
    report["config"] = settings.echo;
    if (suite == "all") detail::run_all(settings, sink);
    else detail::run_suite(settings, suite, sink);
  } catch (const Error& e) {
    report["results"] = sink.results;
    report["error"] = detail::error_json(to_string(e.kind()), e.what());
    return finish(e.is_numerical_breakdown() ? kExitBreakdown : kExitInvalid);
  } catch (const json::exception& e) {
    report["error"] = detail::error_json("InvalidConfig", e.what());
    return finish(kExitInvalid);
  }

  bool pass = true;
  std::optional<double> max_residual;
  for (const auto& r : sink.results) {
    pass = pass && r.at("pass").get<bool>();
    if (r.contains("residual") && r.at("residual").is_number())
      max_residual = std::max(max_residual.value_or(0.0), r.at("residual").get<double>());
  }
  report["results"] = sink.results;
  report["pass"] = pass;
  if (max_residual) report["max_residual"] = *max_residual;
  out.table = std::move(sink.table);
  return finish(pass ? kExitPass : kExitFail);
}

/// The report without its timing field, for determinism comparisons.
inline json without_timing(json report) {
  report.erase("timing");
  return report;
}

}  // namespace chernlab
