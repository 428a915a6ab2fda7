#pragma once

// Built-in metrics and holomorphic maps, constructed from JSON parameters.
//
// Complex parameters accept a number, a pair [re, im] or {"re": .., "im": ..}.
// Matrices are arrays of rows.

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chernlab/elliptic.hpp"
#include "chernlab/errors.hpp"
#include "chernlab/fields.hpp"
#include "chernlab/geometry.hpp"
#include "chernlab/types.hpp"

namespace chernlab {

using json = nlohmann::json;

/// A holomorphic map given on several charts of the target. select(p) picks the
/// chart used at p; every chart shares the target metric formula.
struct ChartedMap {
  std::vector<HolomorphicMapField> charts;
  std::function<int(const ChartPoint&)> select = [](const ChartPoint&) { return 0; };

  const HolomorphicMapField& at(const ChartPoint& p) const { return charts.at(static_cast<std::size_t>(select(p))); }
  int dim_in() const { return charts.front().dim_in; }
  int dim_out() const { return charts.front().dim_out; }
};

struct ParamSpec {
  std::string name;
  std::string type;  // "int", "real", "complex", "complex_list", "matrix", "matrix_list"
  json default_value;
  std::string note;
};

/// Dimensions of the scene a map is being built for.
struct MapContext {
  int dim_in = 0;
  int dim_out = 0;
  std::string target_id;
};

struct RegistryEntry {
  std::string id;
  std::string kind;  // "metric" or "map"
  std::string description;
  std::vector<ParamSpec> params;
  std::function<MetricField(const json&)> make_metric;
  std::function<ChartedMap(const json&, const MapContext&)> make_map;
  std::function<std::vector<ChartPoint>(const json&)> self_test_points;
};

// ---------------------------------------------------------------------------
// Parameter parsing
// ---------------------------------------------------------------------------

namespace params {

inline cplx to_complex(const json& v, const std::string& name) {
  if (v.is_number()) return cplx(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return cplx(v[0].get<double>(), v[1].get<double>());
  if (v.is_object() && v.contains("re")) return cplx(v["re"].get<double>(), v.value("im", 0.0));
  fail(ErrorKind::InvalidArgument, "parameter '" + name + "' is not a complex number");
}

inline json get(const json& p, const std::string& name, const json& fallback) {
  if (p.is_object() && p.contains(name)) return p.at(name);
  return fallback;
}

inline int integer(const json& p, const std::string& name, int fallback) {
  const json v = get(p, name, json(fallback));
  if (!v.is_number_integer()) fail(ErrorKind::InvalidArgument, "parameter '" + name + "' must be an integer");
  return v.get<int>();
}

inline double real(const json& p, const std::string& name, double fallback) {
  const json v = get(p, name, json(fallback));
  if (!v.is_number()) fail(ErrorKind::InvalidArgument, "parameter '" + name + "' must be a number");
  return v.get<double>();
}

inline cplx complex(const json& p, const std::string& name, cplx fallback) {
  if (!(p.is_object() && p.contains(name))) return fallback;
  return to_complex(p.at(name), name);
}

inline std::vector<cplx> complex_list(const json& p, const std::string& name) {
  if (!(p.is_object() && p.contains(name)) || !p.at(name).is_array())
    fail(ErrorKind::InvalidArgument, "parameter '" + name + "' must be a list");
  std::vector<cplx> out;
  for (const auto& v : p.at(name)) out.push_back(to_complex(v, name));
  return out;
}

inline CMatrix matrix_from(const json& v, const std::string& name) {
  if (!v.is_array() || v.empty() || !v[0].is_array() || v[0].empty())
    fail(ErrorKind::InvalidArgument, "parameter '" + name + "' must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(v.size());
  const auto cols = static_cast<Eigen::Index>(v[0].size());
  CMatrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!v[i].is_array() || static_cast<Eigen::Index>(v[i].size()) != cols)
      fail(ErrorKind::InvalidArgument, "parameter '" + name + "' has ragged rows");
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = to_complex(v[i][j], name);
  }
  return M;
}

inline CMatrix matrix(const json& p, const std::string& name) {
  if (!(p.is_object() && p.contains(name))) fail(ErrorKind::InvalidArgument, "missing parameter '" + name + "'");
  return matrix_from(p.at(name), name);
}

inline void require_dim(int m, const std::string& id) {
  if (m < 1 || m > 16) fail(ErrorKind::InvalidArgument, id + ": dimension must lie in [1, 16]");
}

inline json complex_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

}  // namespace params

// ---------------------------------------------------------------------------
// Metric formulas
// ---------------------------------------------------------------------------

namespace metrics {

inline MetricField flat(int m) {
  MetricField g;
  g.dim = m;
  g.label = "flat_" + std::to_string(m);
  g.components = [m](const ChartPoint&) -> CMatrix { return CMatrix::Identity(m, m); };
  return g;
}

inline DomainPredicate unit_ball() {
  return [](const ChartPoint& z) { return z.coords().squaredNorm() < 1.0; };
}

/// g = dz dzbar / (1 - |z|^2)^2, holomorphic sectional curvature -2.
inline MetricField poincare_disk() {
  MetricField g;
  g.dim = 1;
  g.label = "poincare_disk";
  g.domain = unit_ball();
  g.components = [](const ChartPoint& z) -> CMatrix {
    const double s = 1.0 - std::norm(z[0]);
    return CMatrix::Constant(1, 1, cplx(1.0 / (s * s), 0.0));
  };
  return g;
}

/// Bergman-type ball metric g = I/(1-r^2) + conj(z) z^T/(1-r^2)^2.
inline MetricField poincare_ball(int m) {
  MetricField g;
  g.dim = m;
  g.label = "poincare_ball_" + std::to_string(m);
  g.domain = unit_ball();
  g.components = [m](const ChartPoint& z) -> CMatrix {
    const CVector& v = z.coords();
    const double s = 1.0 - v.squaredNorm();
    return CMatrix(CMatrix::Identity(m, m) / s + v.conjugate() * v.transpose() / (s * s));
  };
  return g;
}

/// Product of Poincare disks.
inline MetricField poincare_polydisk(int m) {
  MetricField g;
  g.dim = m;
  g.label = "poincare_polydisk_" + std::to_string(m);
  g.domain = [](const ChartPoint& z) { return z.coords().cwiseAbs().maxCoeff() < 1.0; };
  g.components = [m](const ChartPoint& z) -> CMatrix {
    CMatrix G = CMatrix::Zero(m, m);
    for (int a = 0; a < m; ++a) {
      const double s = 1.0 - std::norm(z[a]);
      G(a, a) = 1.0 / (s * s);
    }
    return G;
  };
  return g;
}

/// Fubini-Study in an affine chart: g = I/(1+r^2) - conj(z) z^T/(1+r^2)^2.
inline MetricField fubini_study(int m) {
  MetricField g;
  g.dim = m;
  g.label = "fubini_study_" + std::to_string(m);
  g.components = [m](const ChartPoint& z) -> CMatrix {
    const CVector& v = z.coords();
    const double s = 1.0 + v.squaredNorm();
    return CMatrix(CMatrix::Identity(m, m) / s - v.conjugate() * v.transpose() / (s * s));
  };
  return g;
}

/// Hopf metric I/|z|^2 on C^m minus a ball around the origin. Not Kaehler for m >= 2.
inline MetricField hopf(int m, double exclusion_radius) {
  MetricField g;
  g.dim = m;
  g.label = "hopf_" + std::to_string(m);
  g.domain = [exclusion_radius](const ChartPoint& z) { return z.coords().norm() > exclusion_radius; };
  g.components = [m](const ChartPoint& z) -> CMatrix { return CMatrix::Identity(m, m) / z.coords().squaredNorm(); };
  return g;
}

/// e^{u} times the flat metric with u = Re(z^1)^2.
inline MetricField conformal_flat(int m) {
  MetricField g;
  g.dim = m;
  g.label = "conformal_flat_" + std::to_string(m);
  g.components = [m](const ChartPoint& z) -> CMatrix {
    const double x = z[0].real();
    return CMatrix(CMatrix::Identity(m, m) * std::exp(x * x));
  };
  return g;
}

}  // namespace metrics

// ---------------------------------------------------------------------------
// Map formulas
// ---------------------------------------------------------------------------

namespace maps {

inline HolomorphicMapField polynomial(const CMatrix& L, const std::vector<CMatrix>& Qs, const CVector& shift, std::string label) {
  HolomorphicMapField f;
  f.dim_in = static_cast<int>(L.cols());
  f.dim_out = static_cast<int>(L.rows());
  f.label = std::move(label);
  f.eval = [L, Qs, shift](const ChartPoint& z) -> CVector {
    CVector w = L * z.coords() + shift;
    for (std::size_t i = 0; i < Qs.size(); ++i) w[static_cast<Eigen::Index>(i)] += (z.coords().transpose() * Qs[i] * z.coords())(0, 0);
    return w;
  };
  f.jacobian = [L, Qs](const ChartPoint& z) -> CMatrix {
    CMatrix J = L;
    for (std::size_t i = 0; i < Qs.size(); ++i)
      J.row(static_cast<Eigen::Index>(i)) += ((Qs[i] + Qs[i].transpose()) * z.coords()).transpose();
    return J;
  };
  f.hessian = [L, Qs](const ChartPoint&) -> std::vector<CMatrix> {
    std::vector<CMatrix> out(static_cast<std::size_t>(L.rows()), CMatrix::Zero(L.cols(), L.cols()));
    for (std::size_t i = 0; i < Qs.size(); ++i) out[i] = Qs[i] + Qs[i].transpose();
    return out;
  };
  return f;
}

/// z -> scale * (z^k componentwise).
inline HolomorphicMapField power(int k, cplx scale, int m) {
  HolomorphicMapField f;
  f.dim_in = f.dim_out = m;
  f.label = "power_" + std::to_string(k);
  f.eval = [k, scale](const ChartPoint& z) -> CVector {
    CVector w(z.dim());
    for (int a = 0; a < z.dim(); ++a) w[a] = scale * std::pow(z[a], k);
    return w;
  };
  f.jacobian = [k, scale](const ChartPoint& z) -> CMatrix {
    CMatrix J = CMatrix::Zero(z.dim(), z.dim());
    for (int a = 0; a < z.dim(); ++a) J(a, a) = k == 0 ? cplx{} : scale * static_cast<double>(k) * std::pow(z[a], k - 1);
    return J;
  };
  f.hessian = [k, scale](const ChartPoint& z) -> std::vector<CMatrix> {
    std::vector<CMatrix> out(static_cast<std::size_t>(z.dim()), CMatrix::Zero(z.dim(), z.dim()));
    for (int a = 0; a < z.dim(); ++a)
      out[a](a, a) = k < 2 ? cplx{} : scale * static_cast<double>(k * (k - 1)) * std::pow(z[a], k - 2);
    return out;
  };
  return f;
}

/// Value, first and second derivative of a one-variable function.
struct Jet3 {
  cplx v, d1, d2;
};

inline HolomorphicMapField from_scalar(std::function<Jet3(cplx)> fn, DomainPredicate domain, std::string label) {
  HolomorphicMapField f;
  f.dim_in = f.dim_out = 1;
  f.label = std::move(label);
  f.domain = std::move(domain);
  f.eval = [fn](const ChartPoint& z) -> CVector { return CVector::Constant(1, fn(z[0]).v); };
  f.jacobian = [fn](const ChartPoint& z) -> CMatrix { return CMatrix::Constant(1, 1, fn(z[0]).d1); };
  f.hessian = [fn](const ChartPoint& z) -> std::vector<CMatrix> { return {CMatrix::Constant(1, 1, fn(z[0]).d2)}; };
  return f;
}

/// Finite Blaschke product with the given zeros.
inline HolomorphicMapField blaschke(const std::vector<cplx>& zeros) {
  for (cplx a : zeros)
    if (!(std::abs(a) < 1.0)) fail(ErrorKind::InvalidArgument, "blaschke zeros must lie in the unit disk");
  auto fn = [zeros](cplx z) -> Jet3 {
    Jet3 acc{1.0, 0.0, 0.0};
    for (cplx a : zeros) {
      const cplx den = 1.0 - std::conj(a) * z;
      const double c = 1.0 - std::norm(a);
      const Jet3 phi{(z - a) / den, c / (den * den), 2.0 * std::conj(a) * c / (den * den * den)};
      acc = Jet3{acc.v * phi.v, acc.d1 * phi.v + acc.v * phi.d1, acc.d2 * phi.v + 2.0 * acc.d1 * phi.d1 + acc.v * phi.d2};
    }
    return acc;
  };
  return from_scalar(fn, metrics::unit_ball(), "blaschke");
}

/// Disk automorphism e^{i theta} (z - a) / (1 - conj(a) z).
inline HolomorphicMapField mobius(cplx a, double theta) {
  if (!(std::abs(a) < 1.0)) fail(ErrorKind::InvalidArgument, "mobius parameter a must lie in the unit disk");
  const cplx rot = std::polar(1.0, theta);
  auto fn = [a, rot](cplx z) -> Jet3 {
    const cplx den = 1.0 - std::conj(a) * z;
    const double c = 1.0 - std::norm(a);
    return Jet3{rot * (z - a) / den, rot * c / (den * den), rot * 2.0 * std::conj(a) * c / (den * den * den)};
  };
  return from_scalar(fn, metrics::unit_ball(), "mobius");
}

/// Weierstrass P into CP^1: chart 0 is w = P, chart 1 is w = 1/P; chart 1 is used where |P| > 1.
inline ChartedMap weierstrass(cplx w1, cplx w2) {
  const WeierstrassP wp(w1, w2);
  auto off_lattice = [wp](const ChartPoint& z) {
    try {
      (void)wp.jet(z[0]);
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  ChartedMap out;
  out.charts.push_back(from_scalar([wp](cplx z) -> Jet3 {
    const auto j = wp.jet(z);
    return Jet3{j.value, j.d1, j.d2};
  }, off_lattice, "weierstrass_p"));
  out.charts.push_back(from_scalar([wp](cplx z) -> Jet3 {
    const auto j = wp.jet(z);
    const cplx inv = 1.0 / j.value;
    return Jet3{inv, -j.d1 * inv * inv, -j.d2 * inv * inv + 2.0 * j.d1 * j.d1 * inv * inv * inv};
  }, off_lattice, "weierstrass_p (chart at infinity)"));
  out.select = [wp](const ChartPoint& z) {
    try {
      return std::abs(wp.jet(z[0]).value) > 1.0 ? 1 : 0;
    } catch (const Error&) {
      return 1;
    }
  };
  return out;
}

/// True when c * w lies in the lattice Z w1 + Z w2.
inline bool in_lattice(cplx c, cplx w1, cplx w2, double tol = 1e-9) {
  // Solve c = x w1 + y w2 over the reals.
  const double det = w1.real() * w2.imag() - w1.imag() * w2.real();
  const double x = (c.real() * w2.imag() - c.imag() * w2.real()) / det;
  const double y = (w1.real() * c.imag() - w1.imag() * c.real()) / det;
  return std::abs(x - std::round(x)) < tol && std::abs(y - std::round(y)) < tol;
}

}  // namespace maps

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

class Registry {
 public:
  static const Registry& instance() {
    static const Registry r;
    return r;
  }

  const RegistryEntry& get(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) fail(ErrorKind::InvalidArgument, "unknown registry id '" + id + "'");
    return entries_[it->second];
  }

  bool contains(const std::string& id) const { return index_.count(id) > 0; }
  const std::vector<RegistryEntry>& entries() const { return entries_; }

  MetricField metric(const std::string& id, const json& p = json::object()) const {
    const auto& e = get(id);
    if (e.kind != "metric") fail(ErrorKind::InvalidArgument, "'" + id + "' is not a metric");
    return e.make_metric(p);
  }

  ChartedMap map(const std::string& id, const json& p, const MapContext& ctx) const {
    const auto& e = get(id);
    if (e.kind != "map") fail(ErrorKind::InvalidArgument, "'" + id + "' is not a map");
    ChartedMap f = e.make_map(p, ctx);
    if (f.dim_in() != ctx.dim_in || f.dim_out() != ctx.dim_out)
      fail(ErrorKind::InvalidArgument, "map '" + id + "' has dimensions " + std::to_string(f.dim_in()) + " -> " +
                                           std::to_string(f.dim_out()) + ", scene expects " + std::to_string(ctx.dim_in) +
                                           " -> " + std::to_string(ctx.dim_out));
    return f;
  }

  json document() const {
    json metrics = json::array(), maps = json::array();
    for (const auto& e : entries_) {
      json params = json::array();
      for (const auto& p : e.params)
        params.push_back({{"name", p.name}, {"type", p.type}, {"default", p.default_value}, {"note", p.note}});
      json item = {{"id", e.id}, {"description", e.description}, {"params", params}};
      (e.kind == "metric" ? metrics : maps).push_back(item);
    }
    return {{"metrics", metrics}, {"maps", maps}};
  }

 private:
  Registry() {
    using namespace params;
    const json no_default = nullptr;

    auto dim_points = [](int m, double r) {
      std::vector<ChartPoint> pts;
      CVector a = CVector::Zero(m), b(m);
      for (int i = 0; i < m; ++i) b[i] = std::polar(r / std::sqrt(double(m)), 0.7 * (i + 1));
      pts.emplace_back(a);
      pts.emplace_back(b);
      return pts;
    };

    add_metric("flat_m", "Euclidean metric on C^m.", {{"m", "int", 1, "complex dimension"}},
               [](const json& p) {
                 const int m = integer(p, "m", 1);
                 require_dim(m, "flat_m");
                 return metrics::flat(m);
               },
               [dim_points](const json& p) { return dim_points(integer(p, "m", 1), 0.5); });

    add_metric("poincare_disk", "Poincare metric 1/(1-|z|^2)^2 on the unit disk.", {},
               [](const json&) { return metrics::poincare_disk(); },
               [dim_points](const json&) { return dim_points(1, 0.5); });

    add_metric("poincare_ball_m", "Complete Kaehler metric of constant holomorphic sectional curvature -2 on the unit ball.",
               {{"m", "int", 2, "complex dimension"}},
               [](const json& p) {
                 const int m = integer(p, "m", 2);
                 require_dim(m, "poincare_ball_m");
                 return metrics::poincare_ball(m);
               },
               [dim_points](const json& p) { return dim_points(integer(p, "m", 2), 0.5); });

    add_metric("poincare_polydisk_m", "Product of Poincare disks.", {{"m", "int", 2, "complex dimension"}},
               [](const json& p) {
                 const int m = integer(p, "m", 2);
                 require_dim(m, "poincare_polydisk_m");
                 return metrics::poincare_polydisk(m);
               },
               [dim_points](const json& p) { return dim_points(integer(p, "m", 2), 0.5); });

    add_metric("fubini_study_m", "Fubini-Study metric in the affine chart of CP^m.", {{"m", "int", 1, "complex dimension"}},
               [](const json& p) {
                 const int m = integer(p, "m", 1);
                 require_dim(m, "fubini_study_m");
                 return metrics::fubini_study(m);
               },
               [dim_points](const json& p) { return dim_points(integer(p, "m", 1), 1.5); });

    add_metric("hopf_m", "Hopf metric I/|z|^2 on C^m minus a ball around 0 (non-Kaehler for m >= 2).",
               {{"m", "int", 2, "complex dimension"}, {"exclusion_radius", "real", 0.05, "radius of the excluded ball"}},
               [](const json& p) {
                 const int m = integer(p, "m", 2);
                 require_dim(m, "hopf_m");
                 const double r = real(p, "exclusion_radius", 0.05);
                 if (!(r > 0.0)) fail(ErrorKind::InvalidArgument, "hopf_m: exclusion_radius must be positive");
                 return metrics::hopf(m, r);
               },
               [](const json& p) {
                 const int m = integer(p, "m", 2);
                 CVector a = CVector::Zero(m);
                 a[0] = 1.0;
                 CVector b = CVector::Constant(m, cplx(0.4, -0.3));
                 return std::vector<ChartPoint>{ChartPoint(a), ChartPoint(b)};
               });

    add_metric("flat_torus", "Flat metric on C / (Z w1 + Z w2), in fundamental-domain coordinates.",
               {{"lattice", "complex_list", json::array({1.0, json::array({0.0, 1.0})}), "periods [w1, w2]"}},
               [](const json& p) {
                 if (p.is_object() && p.contains("lattice")) {
                   const auto l = complex_list(p, "lattice");
                   if (l.size() != 2) fail(ErrorKind::InvalidArgument, "flat_torus: lattice needs two periods");
                   WeierstrassP check(l[0], l[1]);
                 }
                 MetricField g = metrics::flat(1);
                 g.label = "flat_torus";
                 return g;
               },
               [dim_points](const json&) { return dim_points(1, 0.5); });

    add_metric("conformal_flat_m", "exp(Re(z^1)^2) times the Euclidean metric (not Gauduchon for m >= 2).",
               {{"m", "int", 2, "complex dimension"}},
               [](const json& p) {
                 const int m = integer(p, "m", 2);
                 require_dim(m, "conformal_flat_m");
                 return metrics::conformal_flat(m);
               },
               [dim_points](const json& p) { return dim_points(integer(p, "m", 2), 0.5); });

    // Maps ------------------------------------------------------------------

    add_map("identity", "Identity map (dim_in = dim_out).", {},
            [](const json&, const MapContext& ctx) {
              if (ctx.dim_in != ctx.dim_out) fail(ErrorKind::InvalidArgument, "identity needs equal dimensions");
              const int m = ctx.dim_in;
              return single(maps::polynomial(CMatrix::Identity(m, m), {}, CVector::Zero(m), "identity"));
            });

    add_map("linear", "z -> A z + b with an n x m matrix A.",
            {{"matrix", "matrix", no_default, "n x m matrix"}, {"shift", "complex_list", no_default, "optional translation"}},
            [](const json& p, const MapContext&) {
              const CMatrix A = matrix(p, "matrix");
              CVector b = CVector::Zero(A.rows());
              if (p.contains("shift")) {
                const auto s = complex_list(p, "shift");
                if (static_cast<Eigen::Index>(s.size()) != A.rows()) fail(ErrorKind::InvalidArgument, "linear: shift has wrong length");
                for (std::size_t i = 0; i < s.size(); ++i) b[static_cast<Eigen::Index>(i)] = s[i];
              }
              return single(maps::polynomial(A, {}, b, "linear"));
            });

    add_map("quadratic", "f^i(z) = sum_a L_ia z^a + z^T Q_i z.",
            {{"linear", "matrix", no_default, "n x m matrix L"}, {"quadratic", "matrix_list", no_default, "list of n m x m matrices Q_i"}},
            [](const json& p, const MapContext&) {
              const CMatrix L = matrix(p, "linear");
              std::vector<CMatrix> Qs;
              if (p.contains("quadratic")) {
                if (!p["quadratic"].is_array()) fail(ErrorKind::InvalidArgument, "quadratic: 'quadratic' must be a list");
                for (const auto& q : p["quadratic"]) Qs.push_back(matrix_from(q, "quadratic"));
              }
              if (static_cast<Eigen::Index>(Qs.size()) > L.rows()) fail(ErrorKind::InvalidArgument, "quadratic: too many Q_i");
              for (const auto& Q : Qs)
                if (Q.rows() != L.cols() || Q.cols() != L.cols()) fail(ErrorKind::InvalidArgument, "quadratic: Q_i must be m x m");
              return single(maps::polynomial(L, Qs, CVector::Zero(L.rows()), "quadratic"));
            });

    add_map("power", "z -> scale * z^k in every coordinate.",
            {{"k", "int", 2, "exponent"}, {"scale", "complex", 1.0, "prefactor"}},
            [](const json& p, const MapContext& ctx) {
              const int k = integer(p, "k", 2);
              if (k < 0) fail(ErrorKind::InvalidArgument, "power: k must be nonnegative");
              if (ctx.dim_in != ctx.dim_out) fail(ErrorKind::InvalidArgument, "power needs equal dimensions");
              return single(maps::power(k, complex(p, "scale", 1.0), ctx.dim_in));
            });

    add_map("blaschke", "Finite Blaschke product with zeros a_j in the unit disk.",
            {{"a", "complex_list", no_default, "zeros"}},
            [](const json& p, const MapContext&) { return single(maps::blaschke(complex_list(p, "a"))); });

    add_map("mobius", "Disk automorphism e^{i theta}(z - a)/(1 - conj(a) z).",
            {{"a", "complex", 0.0, "point sent to 0"}, {"theta", "real", 0.0, "rotation angle"}},
            [](const json& p, const MapContext&) { return single(maps::mobius(complex(p, "a", 0.0), real(p, "theta", 0.0))); });

    add_map("weierstrass_p", "Weierstrass P of the lattice Z w1 + Z w2, as a map from the torus to CP^1.",
            {{"lattice", "complex_list", json::array({1.0, json::array({0.0, 1.0})}), "periods [w1, w2]"}},
            [](const json& p, const MapContext& ctx) {
              if (ctx.dim_in != 1 || ctx.dim_out != 1) fail(ErrorKind::InvalidArgument, "weierstrass_p is a map between curves");
              if (!ctx.target_id.empty() && ctx.target_id != "fubini_study_m")
                fail(ErrorKind::InvalidArgument, "weierstrass_p needs the fubini_study_m target (it uses both charts of CP^1)");
              std::vector<cplx> l{1.0, I_unit};
              if (p.is_object() && p.contains("lattice")) l = complex_list(p, "lattice");
              if (l.size() != 2) fail(ErrorKind::InvalidArgument, "weierstrass_p: lattice needs two periods");
              return maps::weierstrass(l[0], l[1]);
            });

    add_map("affine_torus", "z -> a z + b between flat tori; a must map the lattice into itself.",
            {{"a", "complex", 2.0, "multiplier"}, {"b", "complex", 0.0, "translation"},
             {"lattice", "complex_list", json::array({1.0, json::array({0.0, 1.0})}), "periods [w1, w2]"}},
            [](const json& p, const MapContext&) {
              std::vector<cplx> l{1.0, I_unit};
              if (p.is_object() && p.contains("lattice")) l = complex_list(p, "lattice");
              if (l.size() != 2) fail(ErrorKind::InvalidArgument, "affine_torus: lattice needs two periods");
              const cplx a = complex(p, "a", 2.0);
              if (!maps::in_lattice(a * l[0], l[0], l[1]) || !maps::in_lattice(a * l[1], l[0], l[1]))
                fail(ErrorKind::InvalidArgument, "affine_torus: a does not preserve the lattice");
              return single(maps::polynomial(CMatrix::Constant(1, 1, a), {}, CVector::Constant(1, complex(p, "b", 0.0)), "affine_torus"));
            });
  }

  static ChartedMap single(HolomorphicMapField f) {
    ChartedMap out;
    out.charts.push_back(std::move(f));
    return out;
  }

  void add_metric(std::string id, std::string description, std::vector<ParamSpec> params,
                  std::function<MetricField(const json&)> make, std::function<std::vector<ChartPoint>(const json&)> points) {
    RegistryEntry e;
    e.id = std::move(id);
    e.kind = "metric";
    e.description = std::move(description);
    e.params = std::move(params);
    e.make_metric = std::move(make);
    e.self_test_points = std::move(points);
    push(std::move(e));
  }

  void add_map(std::string id, std::string description, std::vector<ParamSpec> params,
               std::function<ChartedMap(const json&, const MapContext&)> make) {
    RegistryEntry e;
    e.id = std::move(id);
    e.kind = "map";
    e.description = std::move(description);
    e.params = std::move(params);
    e.make_map = std::move(make);
    push(std::move(e));
  }

  void push(RegistryEntry e) {
    if (index_.count(e.id)) fail(ErrorKind::InvalidArgument, "duplicate registry id '" + e.id + "'");
    index_[e.id] = entries_.size();
    entries_.push_back(std::move(e));
  }

  std::vector<RegistryEntry> entries_;
  std::map<std::string, std::size_t> index_;
};

/// Residual report of a metric self-test: Hermitian and positive definite at its self-test points.
inline double metric_self_test(const RegistryEntry& e, const json& p = json::object()) {
  const MetricField g = e.make_metric(p);
  double worst = 0.0;
  for (const auto& z : e.self_test_points(p)) {
    if (!g.contains(z)) fail(ErrorKind::DomainViolation, e.id + ": self-test point outside the domain");
    const CMatrix G = g(z);
    require_positive_definite(G, e.id);
    worst = std::max(worst, hermitian_residual(G));
  }
  return worst;
}

/// Largest gap between closed-form map jets and stencil jets at a point.
inline double map_jet_consistency(const HolomorphicMapField& f, const ChartPoint& p, const FdConfig& cfg) {
  const MapJets exact = holomorphic_jets(f, p, cfg);
  HolomorphicMapField bare = f;
  bare.jacobian = nullptr;
  bare.hessian = nullptr;
  const MapJets fd = holomorphic_jets(bare, p, cfg);
  double gap = (exact.value - fd.value).cwiseAbs().maxCoeff();
  gap = std::max(gap, (exact.jacobian - fd.jacobian).cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < exact.hessian.size(); ++i)
    gap = std::max(gap, (exact.hessian[i] - fd.hessian[i]).cwiseAbs().maxCoeff());
  return gap;
}

}  // namespace chernlab
