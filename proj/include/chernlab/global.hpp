#pragma once

// Grid-level checks: Kaehler and Gauduchon tests, the Schwarz-type estimates,
// maximum-point witnesses and the torus integral inequality.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chernlab/bochner.hpp"
#include "chernlab/errors.hpp"
#include "chernlab/fields.hpp"
#include "chernlab/geometry.hpp"
#include "chernlab/maps.hpp"
#include "chernlab/parallel.hpp"
#include "chernlab/probe.hpp"
#include "chernlab/registry.hpp"
#include "chernlab/types.hpp"

namespace chernlab {

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

enum class GridKind { Rectangular, Torus, DiskPolar };

inline const char* to_string(GridKind k) {
  switch (k) {
    case GridKind::Rectangular: return "rectangular";
    case GridKind::Torus: return "torus";
    case GridKind::DiskPolar: return "disk_polar";
  }
  return "unknown";
}

/// Sample points of a chart.
///
/// rectangular: 2*dim real axes (re z^1, im z^1, re z^2, ...), each with a closed
///   interval and a point count; the grid is the tensor product.
/// torus: dim 1, cell centers of an n1 x n2 subdivision of the parallelogram
///   spanned by the periods; every point carries the cell area as weight.
/// disk_polar: per coordinate, the center plus n_radial circles of radius
///   radius * k / n_radial (k = 1..n_radial, outermost included), n_angular
///   points each; the grid is the product over coordinates.
struct GridSpec {
  GridKind kind = GridKind::Rectangular;
  int dim = 1;
  std::vector<int> resolution;
  std::vector<std::pair<double, double>> bounds;  // rectangular
  cplx w1{1.0, 0.0}, w2{0.0, 1.0};                // torus
  double radius = 0.9;                            // disk_polar

  static GridSpec rectangular(int dim, std::vector<std::pair<double, double>> bounds, std::vector<int> resolution) {
    GridSpec g;
    g.kind = GridKind::Rectangular;
    g.dim = dim;
    g.bounds = std::move(bounds);
    g.resolution = std::move(resolution);
    g.validate();
    return g;
  }

  static GridSpec torus(cplx w1, cplx w2, int n1, int n2) {
    GridSpec g;
    g.kind = GridKind::Torus;
    g.dim = 1;
    g.w1 = w1;
    g.w2 = w2;
    g.resolution = {n1, n2};
    g.validate();
    return g;
  }

  static GridSpec disk_polar(int dim, double radius, int n_radial, int n_angular) {
    GridSpec g;
    g.kind = GridKind::DiskPolar;
    g.dim = dim;
    g.radius = radius;
    g.resolution = {n_radial, n_angular};
    g.validate();
    return g;
  }

  void validate() const {
    if (dim < 1) fail(ErrorKind::InvalidArgument, "grid dimension must be positive");
    for (int r : resolution)
      if (r < 4) fail(ErrorKind::InvalidArgument, "grid resolution must be at least 4 per axis");
    switch (kind) {
      case GridKind::Rectangular:
        if (static_cast<int>(bounds.size()) != 2 * dim || static_cast<int>(resolution.size()) != 2 * dim)
          fail(ErrorKind::InvalidArgument, "rectangular grid needs 2*dim bounds and resolutions");
        for (const auto& b : bounds)
          if (!(b.first <= b.second) || !std::isfinite(b.first) || !std::isfinite(b.second))
            fail(ErrorKind::InvalidArgument, "rectangular grid bounds must be finite with lo <= hi");
        break;
      case GridKind::Torus:
        if (dim != 1 || resolution.size() != 2) fail(ErrorKind::InvalidArgument, "torus grid is one-dimensional with two resolutions");
        if (!(std::abs(cell_area_total()) > 1e-12 * std::max(1.0, std::norm(w1) + std::norm(w2))))
          fail(ErrorKind::InvalidArgument, "torus periods must be linearly independent over the reals");
        break;
      case GridKind::DiskPolar:
        if (resolution.size() != 2) fail(ErrorKind::InvalidArgument, "disk_polar grid needs (n_radial, n_angular)");
        if (!(radius > 0.0) || !std::isfinite(radius)) fail(ErrorKind::InvalidArgument, "disk_polar radius must be positive");
        break;
    }
  }

  double cell_area_total() const { return (std::conj(w1) * w2).imag(); }

  std::vector<ChartPoint> points() const {
    validate();
    std::vector<CVector> out;
    switch (kind) {
      case GridKind::Rectangular: {
        out.emplace_back(CVector::Zero(dim));
        for (int axis = 0; axis < 2 * dim; ++axis) {
          std::vector<CVector> next;
          const int n = resolution[axis];
          for (const auto& z : out)
            for (int k = 0; k < n; ++k) {
              const double t = bounds[axis].first + (bounds[axis].second - bounds[axis].first) * k / (n - 1);
              CVector y = z;
              y[axis / 2] += (axis % 2 == 0) ? cplx(t, 0.0) : cplx(0.0, t);
              next.push_back(y);
            }
          out = std::move(next);
        }
        break;
      }
      case GridKind::Torus: {
        const int n1 = resolution[0], n2 = resolution[1];
        for (int i = 0; i < n1; ++i)
          for (int j = 0; j < n2; ++j)
            out.emplace_back(CVector::Constant(1, (i + 0.5) / n1 * w1 + (j + 0.5) / n2 * w2));
        break;
      }
      case GridKind::DiskPolar: {
        const double pi = std::acos(-1.0);
        std::vector<cplx> ring{cplx(0.0, 0.0)};
        for (int k = 1; k <= resolution[0]; ++k)
          for (int j = 0; j < resolution[1]; ++j) ring.push_back(std::polar(radius * k / resolution[0], 2.0 * pi * j / resolution[1]));
        out.emplace_back(CVector::Zero(dim));
        for (int c = 0; c < dim; ++c) {
          std::vector<CVector> next;
          for (const auto& z : out)
            for (cplx w : ring) {
              CVector y = z;
              y[c] = w;
              next.push_back(y);
            }
          out = std::move(next);
        }
        break;
      }
    }
    std::vector<ChartPoint> pts;
    pts.reserve(out.size());
    for (auto& v : out) pts.emplace_back(std::move(v));
    return pts;
  }

  /// Quadrature weight of each point (torus grids only).
  double cell_weight() const {
    if (kind != GridKind::Torus) fail(ErrorKind::InvalidArgument, "quadrature weights exist only for torus grids");
    return std::abs(cell_area_total()) / (resolution[0] * resolution[1]);
  }
};

// ---------------------------------------------------------------------------
// Scene
// ---------------------------------------------------------------------------

/// Domain metric, target metric (shared by every target chart) and a map.
struct MapScene {
  MetricField g;
  MetricField h;
  ChartedMap f;

  void validate() const {
    if (f.charts.empty()) fail(ErrorKind::InvalidArgument, "scene map has no charts");
    if (g.dim != f.dim_in() || h.dim != f.dim_out())
      fail(ErrorKind::InvalidArgument, "scene map dimensions do not match the metrics");
  }
};

inline ChartedMap single_chart(HolomorphicMapField f) {
  ChartedMap out;
  out.charts.push_back(std::move(f));
  return out;
}

/// Per-point data shared by the estimate checks.
struct PointSample {
  ChartPoint p;
  int chart = 0;
  MapJets jets;
  CMatrix G, H;
  MapScalars scalars;
  NormalizedFrame frame;
};

namespace detail {

inline PointSample sample_point(const MapScene& s, const ChartPoint& p, const FdConfig& cfg) {
  PointSample out;
  out.p = p;
  out.chart = s.f.select(p);
  const auto data = map_point_data(s.g, s.h, s.f.charts.at(static_cast<std::size_t>(out.chart)), p, cfg);
  out.jets = data.jets;
  out.G = data.G;
  out.H = data.H;
  out.scalars = map_scalars(data.G, data.H, data.jets.jacobian);
  out.frame = normalize_frames(data.G, data.H, data.jets.jacobian);
  return out;
}

inline std::vector<PointSample> sample_points(const MapScene& s, const std::vector<ChartPoint>& pts, const FdConfig& cfg) {
  s.validate();
  std::vector<PointSample> out(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { out[i] = sample_point(s, pts[i], cfg); });
  return out;
}

inline std::vector<CurvatureSite> sites(const MetricField& g, const std::vector<ChartPoint>& pts, const FdConfig& cfg) {
  std::vector<CurvatureSite> out(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { out[i] = curvature_site(g, pts[i], cfg); });
  return out;
}

inline std::vector<CurvatureSite> target_sites(const MapScene& s, const std::vector<PointSample>& samples, const FdConfig& cfg) {
  std::vector<CurvatureSite> out(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) { out[i] = curvature_site(s.h, ChartPoint(samples[i].jets.value), cfg); });
  return out;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Kaehler and Gauduchon
// ---------------------------------------------------------------------------

struct PropertyCheck {
  bool passed = true;
  double residual = 0.0;
  int worst_point = -1;
  std::vector<double> per_point;
};

inline constexpr double kKahlerTolerance = 1e-7;
inline constexpr double kGauduchonTolerance = 1e-7;

namespace detail {

inline void settle(PropertyCheck& c, double tol) {
  for (std::size_t i = 0; i < c.per_point.size(); ++i)
    if (c.worst_point < 0 || c.per_point[i] > c.residual) {
      c.residual = c.per_point[i];
      c.worst_point = static_cast<int>(i);
    }
  c.passed = c.residual <= tol;
}

}  // namespace detail

/// max |g_{a b-bar, c} - g_{c b-bar, a}| over points and indices.
inline PropertyCheck kahler_check(const MetricField& g, const std::vector<ChartPoint>& points, const FdConfig& cfg,
                                  double tolerance = kKahlerTolerance) {
  PropertyCheck out;
  out.per_point.assign(points.size(), 0.0);
  parallel_for(points.size(), [&](std::size_t i) {
    const MetricJet jet = metric_jet(g, points[i], cfg);
    double r = 0.0;
    for (int a = 0; a < g.dim; ++a)
      for (int b = 0; b < g.dim; ++b)
        for (int c = 0; c < g.dim; ++c) r = std::max(r, std::abs(jet.d[c](a, b) - jet.d[a](c, b)));
    out.per_point[i] = r;
  });
  detail::settle(out, tolerance);
  return out;
}

/// Coefficient of d dbar(omega^{m-1}) against the volume form, up to a constant
/// factor: sum_{a, b} d_a dbar_b C_{a b} with C the cofactor matrix of g.
inline cplx gauduchon_coefficient(const MetricField& g, const ChartPoint& p, const FdConfig& cfg) {
  const int m = g.dim;
  if (m == 1) return cplx{};
  auto cofactor = [&g](const ChartPoint& z) -> CMatrix {
    const CMatrix G = g.components(z);
    return CMatrix(G.determinant() * G.inverse().transpose());
  };
  const auto jet = wirtinger_jet2<CMatrix>(cofactor, p, cfg, g.domain);
  cplx s{};
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) s += jet.mixed(a, b)(a, b);
  return s;
}

inline PropertyCheck gauduchon_check(const MetricField& g, const std::vector<ChartPoint>& points, const FdConfig& cfg,
                                     double tolerance = kGauduchonTolerance) {
  PropertyCheck out;
  out.per_point.assign(points.size(), 0.0);
  if (g.dim == 1) return out;
  parallel_for(points.size(), [&](std::size_t i) { out.per_point[i] = std::abs(gauduchon_coefficient(g, points[i], cfg)); });
  detail::settle(out, tolerance);
  return out;
}

// ---------------------------------------------------------------------------
// Schwarz-type estimates
// ---------------------------------------------------------------------------

struct HypothesisProbe {
  double K = 0.0;
  double kappa = 0.0;
  std::string K_source;      // functional whose minimum gives -K
  std::string kappa_source;  // functional whose maximum gives -kappa
  ProbeWitness K_witness;
  ProbeWitness kappa_witness;
};

struct EstimateReport {
  std::string part;
  int ell = 0;
  HypothesisProbe probe;
  double bound = 0.0;
  double observed_max = 0.0;
  double margin = 0.0;
  int argmax = -1;
  int points_checked = 0;
  bool pass = false;
  std::vector<double> observed;  // per grid point
  bool compact_domain = false;
};

inline constexpr double kEstimateSlack = 1e-9;

namespace detail {

inline EstimateReport finish_estimate(EstimateReport r) {
  r.points_checked = static_cast<int>(r.observed.size());
  r.observed_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.observed.size(); ++i)
    if (r.observed[i] > r.observed_max) {
      r.observed_max = r.observed[i];
      r.argmax = static_cast<int>(i);
    }
  r.margin = r.bound - r.observed_max;
  r.pass = true;
  for (double v : r.observed)
    if (!(v <= r.bound * (1.0 + kEstimateSlack))) r.pass = false;
  return r;
}

inline void require_kappa(const HypothesisProbe& hp) {
  if (!(hp.kappa > 0.0))
    fail(ErrorKind::HypothesisFail, "probed kappa = " + fmt(hp.kappa) + " (from " + hp.kappa_source +
                                        ") is not positive; the estimate's hypotheses do not hold on this scene");
}

}  // namespace detail

/// W_m <= (K / (m kappa))^m with S >= -K on the domain and Ric^(1)_m <= -kappa on the target.
inline EstimateReport check_estimate_a(const MapScene& s, const GridSpec& grid, const FdConfig& cfg, const ProbeOptions& opt = {}) {
  s.validate();
  const int m = s.g.dim;
  if (m > s.h.dim) fail(ErrorKind::InvalidArgument, "estimate (a) needs dim M <= dim N");
  const auto pts = grid.points();
  const auto samples = detail::sample_points(s, pts, cfg);
  const auto dom = detail::sites(s.g, pts, cfg);
  const auto tgt = detail::target_sites(s, samples, cfg);

  EstimateReport r;
  r.part = "a";
  r.ell = m;
  double min_s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const double S = scalar_curvature(dom[i].R, dom[i].G);
    if (S < min_s) {
      min_s = S;
      r.probe.K_witness.point_index = static_cast<int>(i);
      r.probe.K_witness.value = S;
    }
  }
  r.probe.K = std::max(0.0, -min_s);
  r.probe.K_source = "chern scalar curvature of the domain";
  const auto ric = curvature_sign_probe(tgt, CurvatureKind::RicciFirst, m, opt);
  r.probe.kappa = -ric.max;
  r.probe.kappa_source = "Ric^(1)_m of the target";
  r.probe.kappa_witness = ric.max_witness;
  detail::require_kappa(r.probe);
  r.bound = std::pow(r.probe.K / (m * r.probe.kappa), m);
  for (const auto& smp : samples) r.observed.push_back(smp.scalars.W[m - 1]);
  return detail::finish_estimate(std::move(r));
}

/// Kaehler domain: prod_{a <= l} lambda_a^2 <= (K / (l kappa))^l with S_l >= -K and Ric^(1)_l <= -kappa.
inline EstimateReport check_estimate_b(const MapScene& s, const GridSpec& grid, int ell, const FdConfig& cfg,
                                       const ProbeOptions& opt = {}) {
  s.validate();
  const int m = s.g.dim;
  if (ell < 1 || ell >= m) fail(ErrorKind::InvalidArgument, "estimate (b) needs 1 <= l < m");
  if (m > s.h.dim) fail(ErrorKind::InvalidArgument, "estimate (b) needs dim M <= dim N");
  const auto pts = grid.points();
  const auto kc = kahler_check(s.g, pts, cfg);
  if (!kc.passed)
    fail(ErrorKind::KahlerRequired, "domain metric is not Kaehler (residual " + detail::fmt(kc.residual) + ")");
  const auto samples = detail::sample_points(s, pts, cfg);
  const auto dom = detail::sites(s.g, pts, cfg);
  const auto tgt = detail::target_sites(s, samples, cfg);

  EstimateReport r;
  r.part = "b";
  r.ell = ell;
  const auto sl = curvature_sign_probe(dom, CurvatureKind::ScalarL, ell, opt);
  r.probe.K = std::max(0.0, -sl.min);
  r.probe.K_source = "S_l of the domain";
  r.probe.K_witness = sl.min_witness;
  const auto ric = curvature_sign_probe(tgt, CurvatureKind::RicciFirst, ell, opt);
  r.probe.kappa = -ric.max;
  r.probe.kappa_source = "Ric^(1)_l of the target";
  r.probe.kappa_witness = ric.max_witness;
  detail::require_kappa(r.probe);
  r.bound = std::pow(r.probe.K / (ell * r.probe.kappa), ell);
  for (const auto& smp : samples) r.observed.push_back(smp.scalars.wedge0[ell - 1] * smp.scalars.wedge0[ell - 1]);
  return detail::finish_estimate(std::move(r));
}

/// sigma_l <= l K / kappa with Ric^(2)_l >= -K on the domain and real bisectional <= -kappa on the target.
inline EstimateReport check_estimate_c(const MapScene& s, const GridSpec& grid, int ell, const FdConfig& cfg,
                                       const ProbeOptions& opt = {}) {
  s.validate();
  const int m = s.g.dim;
  if (ell < 1 || ell > m) fail(ErrorKind::InvalidArgument, "estimate (c) needs 1 <= l <= m");
  const auto pts = grid.points();
  const auto samples = detail::sample_points(s, pts, cfg);
  const auto dom = detail::sites(s.g, pts, cfg);
  const auto tgt = detail::target_sites(s, samples, cfg);

  EstimateReport r;
  r.part = "c";
  r.ell = ell;
  const auto ric = curvature_sign_probe(dom, CurvatureKind::RicciSecond, ell, opt);
  r.probe.K = std::max(0.0, -ric.min);
  r.probe.K_source = "Ric^(2)_l of the domain";
  r.probe.K_witness = ric.min_witness;
  const auto bis = curvature_sign_probe(tgt, CurvatureKind::RealBisectional, 1, opt);
  r.probe.kappa = -bis.max;
  r.probe.kappa_source = "real bisectional curvature of the target";
  r.probe.kappa_witness = bis.max_witness;
  detail::require_kappa(r.probe);
  r.bound = ell * r.probe.K / r.probe.kappa;
  for (const auto& smp : samples) r.observed.push_back(smp.scalars.sigma[ell - 1]);
  return detail::finish_estimate(std::move(r));
}

// ---------------------------------------------------------------------------
// Maximum-point witness
// ---------------------------------------------------------------------------

/// Quantities at the grid maximum of W_m (part a) or U_l (part c).
///
/// At an interior maximum the mixed Hessian of log W_m (resp. U_l) is negative
/// semidefinite, so psi_lhs <= 0 there. psi_rhs is the same quantity assembled
/// from curvature and jets; under the estimate's hypotheses with the bound
/// violated it is bounded below by a positive number, which is the
/// contradiction used in the rigidity argument.
struct RigidityReport {
  std::string part;
  int ell = 0;
  int argmax = -1;
  ChartPoint point;
  double observed_max = 0.0;
  bool degenerate = false;  // no witness: the map has rank below l at the maximum
  RVector lambdas;
  double psi_lhs = 0.0;
  double psi_rhs = 0.0;
  double trace_lhs = 0.0;
  double trace_rhs = 0.0;
  double curvature_M_trace = 0.0;  // psi of the domain-curvature part
  double curvature_N_trace = 0.0;  // psi of the target-curvature part
  double residual = 0.0;
  std::optional<double> K_probe;      // signed hypothesis probes, when they could be evaluated
  std::optional<double> kappa_probe;
  std::string note;
  std::vector<double> observed;  // W_m or U_l per grid point
};

inline RigidityReport rigidity_witness(const MapScene& s, const GridSpec& grid, const std::string& part, int ell,
                                       const FdConfig& cfg, const ProbeOptions& opt = {}) {
  s.validate();
  const int m = s.g.dim;
  if (part != "a" && part != "c") fail(ErrorKind::InvalidArgument, "rigidity witness part must be 'a' or 'c'");
  if (part == "a") ell = m;
  if (ell < 1 || ell > m) fail(ErrorKind::InvalidArgument, "l must lie in [1, m]");
  const auto pts = grid.points();
  const auto samples = detail::sample_points(s, pts, cfg);

  RigidityReport r;
  r.part = part;
  r.ell = ell;
  r.observed_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v = part == "a" ? samples[i].scalars.W[m - 1] : samples[i].scalars.U[ell - 1];
    r.observed.push_back(v);
    if (v > r.observed_max) {
      r.observed_max = v;
      r.argmax = static_cast<int>(i);
    }
  }
  const PointSample& best = samples[static_cast<std::size_t>(r.argmax)];
  r.point = best.p;
  r.lambdas = best.frame.lambdas;

  // Signed hypothesis probes, reported whatever their sign.
  try {
    const auto dom = detail::sites(s.g, pts, cfg);
    const auto tgt = detail::target_sites(s, samples, cfg);
    if (part == "a") {
      double min_s = std::numeric_limits<double>::infinity();
      for (const auto& site : dom) min_s = std::min(min_s, scalar_curvature(site.R, site.G));
      r.K_probe = -min_s;
      if (m <= s.h.dim) r.kappa_probe = -curvature_sign_probe(tgt, CurvatureKind::RicciFirst, m, opt).max;
    } else {
      r.K_probe = -curvature_sign_probe(dom, CurvatureKind::RicciSecond, ell, opt).min;
      r.kappa_probe = -curvature_sign_probe(tgt, CurvatureKind::RealBisectional, 1, opt).max;
    }
  } catch (const Error& e) {
    r.note = std::string("hypothesis probes unavailable: ") + e.what();
  }

  const int needed = part == "a" ? m : 1;
  if (best.frame.rank < needed || best.frame.rank < m) {
    r.degenerate = true;
    if (r.note.empty()) r.note = "map has rank " + std::to_string(best.frame.rank) + " at the maximum; no witness";
    return r;
  }
  const auto& chart = s.f.charts.at(static_cast<std::size_t>(best.chart));
  const NormalizedScene scene = normalize_scene(s.g, s.h, chart, best.p, cfg);
  const BochnerReport b = part == "a" ? verify_eq1(scene, m, cfg) : verify_eq2(scene, ell, cfg);
  r.psi_lhs = psi_trace(scene, b.lhs);
  r.psi_rhs = psi_trace(scene, b.rhs);
  r.trace_lhs = b.lhs.trace().real();
  r.trace_rhs = b.rhs.trace().real();
  r.curvature_M_trace = psi_trace(scene, b.breakdown.curvature_M);
  r.curvature_N_trace = psi_trace(scene, b.breakdown.curvature_N);
  r.residual = b.residual;
  return r;
}

// ---------------------------------------------------------------------------
// Integral inequality on a torus
// ---------------------------------------------------------------------------

struct IntegralReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double quadrature_error_estimate = 0.0;
  double lhs_coarse = 0.0;
  double rhs_coarse = 0.0;
  double periodicity_residual = 0.0;
  bool nondegenerate = false;
  bool pass = false;
  int points = 0;
  std::vector<double> lhs_integrand;  // per grid point, without the weight
  std::vector<double> rhs_integrand;
};

using ScalarField = std::function<double(const ChartPoint&)>;

inline ScalarField zero_field() {
  return [](const ChartPoint&) { return 0.0; };
}

namespace detail {

struct IntegrandValues {
  double lhs = 0.0;
  double rhs = 0.0;
  int rank = 0;
};

// S_g e^{(m-1) psi} det g and tr_g f*(Ric^(1)_m(h)) e^{(m-1) psi} det g at one point.
inline IntegrandValues integrands(const MapScene& s, const ScalarField& psi, const ChartPoint& p, const FdConfig& cfg) {
  const int m = s.g.dim;
  const MetricJet gj = metric_jet(s.g, p, cfg);
  const double S = scalar_curvature(curvature_from_jet(gj), gj.g);
  const double weight = std::exp((m - 1) * psi(p)) * gj.g.determinant().real();
  const PointSample smp = sample_point(s, p, cfg);
  const MetricJet hj = transform_jet(metric_jet(s.h, ChartPoint(smp.jets.value), cfg), smp.frame.Q);
  const CurvatureTensor RN = curvature_from_jet(hj);
  double tr = 0.0;
  for (int d = 0; d < m; ++d) {
    const double l2 = smp.frame.lambdas[d] * smp.frame.lambdas[d];
    if (l2 == 0.0) continue;
    for (int i = 0; i < m; ++i) tr += l2 * RN(d, d, i, i).real();
  }
  return IntegrandValues{S * weight, tr * weight, smp.frame.rank};
}

inline std::vector<IntegrandValues> integrand_grid(const MapScene& s, const ScalarField& psi, const GridSpec& grid,
                                                   const FdConfig& cfg) {
  const auto pts = grid.points();
  std::vector<IntegrandValues> out(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { out[i] = integrands(s, psi, pts[i], cfg); });
  return out;
}

inline std::pair<double, double> quadrature(const std::vector<IntegrandValues>& vals, double weight) {
  CompensatedSum a, b;
  for (const auto& v : vals) {
    a.add(v.lhs);
    b.add(v.rhs);
  }
  return {a.value() * weight, b.value() * weight};
}

inline double relative_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

// Compares the integrand ingredients at points identified by the lattice.
inline double periodicity_residual(const MapScene& s, const ScalarField& psi, const GridSpec& grid, const FdConfig& cfg) {
  const int n = std::max(grid.resolution[0], grid.resolution[1]);
  double worst = 0.0;
  auto compare = [&](const ChartPoint& a, const ChartPoint& b) {
    const CMatrix Ga = s.g(a), Gb = s.g(b);
    worst = std::max(worst, (Ga - Gb).cwiseAbs().maxCoeff() / std::max(1.0, Ga.cwiseAbs().maxCoeff()));
    worst = std::max(worst, relative_gap(psi(a), psi(b)));
    const auto& fa = s.f.at(a);
    const auto& fb = s.f.at(b);
    const MapJets ja = holomorphic_jets(fa, a, cfg, false), jb = holomorphic_jets(fb, b, cfg, false);
    if (!s.h.contains(ChartPoint(ja.value)) || !s.h.contains(ChartPoint(jb.value)))
      fail(ErrorKind::DomainViolation, "map leaves the target domain on the torus boundary");
    const CMatrix Aa = pullback(s.h(ChartPoint(ja.value)), ja.jacobian);
    const CMatrix Ab = pullback(s.h(ChartPoint(jb.value)), jb.jacobian);
    worst = std::max(worst, (Aa - Ab).cwiseAbs().maxCoeff() / std::max(1.0, Aa.cwiseAbs().maxCoeff()));
  };
  for (int k = 0; k < n; ++k) {
    const double t = (k + 0.5) / n;
    compare(ChartPoint{t * grid.w2}, ChartPoint{t * grid.w2 + grid.w1});
    compare(ChartPoint{t * grid.w1}, ChartPoint{t * grid.w1 + grid.w2});
  }
  return worst;
}

}  // namespace detail

inline constexpr double kPeriodicityTolerance = 1e-9;

/// Integral inequality on a torus fundamental domain:
///   lhs = int S_g e^{(m-1) psi} det g,  rhs = int tr_g f*(Ric^(1)_m(h)) e^{(m-1) psi} det g,
/// by the periodic midpoint rule, with |I_n - I_{n/2}| as the error estimate.
inline IntegralReport integral_inequality_check(const MapScene& s, const GridSpec& grid, const ScalarField& psi,
                                                const FdConfig& cfg) {
  s.validate();
  if (grid.kind != GridKind::Torus) fail(ErrorKind::InvalidArgument, "the integral check needs a torus grid");
  if (s.g.dim != 1) fail(ErrorKind::InvalidArgument, "torus domains are one-dimensional");
  const ScalarField phi = psi ? psi : zero_field();

  IntegralReport r;
  r.periodicity_residual = detail::periodicity_residual(s, phi, grid, cfg);
  if (r.periodicity_residual > kPeriodicityTolerance)
    fail(ErrorKind::NotPeriodic, "fields disagree at identified boundary points (relative gap " +
                                     detail::fmt(r.periodicity_residual) + ")");

  const auto fine = detail::integrand_grid(s, phi, grid, cfg);
  const auto [lhs, rhs] = detail::quadrature(fine, grid.cell_weight());
  GridSpec coarse_grid = grid;
  coarse_grid.resolution = {std::max(4, grid.resolution[0] / 2), std::max(4, grid.resolution[1] / 2)};
  const auto coarse = detail::integrand_grid(s, phi, coarse_grid, cfg);
  const auto [lhs_c, rhs_c] = detail::quadrature(coarse, coarse_grid.cell_weight());

  r.lhs = lhs;
  r.rhs = rhs;
  r.lhs_coarse = lhs_c;
  r.rhs_coarse = rhs_c;
  r.quadrature_error_estimate = std::abs(lhs - lhs_c) + std::abs(rhs - rhs_c);
  r.points = static_cast<int>(fine.size());
  for (const auto& v : fine) {
    r.lhs_integrand.push_back(v.lhs);
    r.rhs_integrand.push_back(v.rhs);
    if (v.rank == s.g.dim) r.nondegenerate = true;
  }
  const double budget = r.quadrature_error_estimate + 1e-9 * (1.0 + std::abs(lhs) + std::abs(rhs));
  r.pass = r.lhs <= r.rhs + budget;
  return r;
}

}  // namespace chernlab
