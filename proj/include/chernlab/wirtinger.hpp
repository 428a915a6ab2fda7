#pragma once

// Wirtinger jets by central differences on the underlying real coordinates.
//
// A chart point z in C^m is viewed as (x^1, y^1, ..., x^m, y^m) in R^{2m}.
// Real partials are taken with the 3-point (diagonal) and 4-point cross
// (mixed) stencils and recombined as
//
//   d/dz      = (d/dx - i d/dy) / 2
//   d/dzbar   = (d/dx + i d/dy) / 2
//
// With FdConfig::richardson the stencil is evaluated at h and h/2 and
// combined as (4 D(h/2) - D(h)) / 3, which removes the O(h^2) term.

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "chernlab/errors.hpp"
#include "chernlab/types.hpp"

namespace chernlab {

namespace detail {

inline bool all_finite(const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

template <class Derived>
bool all_finite(const Eigen::DenseBase<Derived>& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j)
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      if (!all_finite(cplx(v(i, j)))) return false;
  return true;
}

inline double max_abs(const cplx& v) { return std::abs(v); }

template <class Derived>
double max_abs(const Eigen::DenseBase<Derived>& v) {
  return v.size() ? v.derived().cwiseAbs().maxCoeff() : 0.0;
}

inline cplx zero_like(const cplx&) { return cplx{}; }

template <class T>
T zero_like(const T& v) {
  return T::Zero(v.rows(), v.cols());
}

// Real partials of a field at one step size.
template <class V>
struct RealPartials {
  V value;
  std::vector<V> first;   // 2m entries
  std::vector<V> second;  // 2m x 2m, row-major, symmetric
};

}  // namespace detail

/// First and mixed-second Wirtinger jet of a field with values in V.
template <class V>
struct Jet2 {
  int m = 0;
  V value{};
  std::vector<V> d;      // d/dz^g
  std::vector<V> dbar;   // d/dzbar^g
  std::vector<V> dd;     // d^2/dz^g dz^a, row-major (g, a)
  std::vector<V> ddbar;  // d^2/dz^g dzbar^d, row-major (g, d)
  double error_estimate = 0.0;  // max |D(h/2) - D(h)| / 3 with Richardson, else 0

  const V& holo2(int g, int a) const { return dd[static_cast<std::size_t>(g * m + a)]; }
  const V& mixed(int g, int dl) const { return ddbar[static_cast<std::size_t>(g * m + dl)]; }
};

/// Jet of a complex scalar field in matrix form.
struct ScalarJet2 {
  cplx value;
  CVector d;
  CVector dbar;
  CMatrix ddbar;  // (g, d) -> d^2 u / dz^g dzbar^d
  double error_estimate = 0.0;
};

namespace detail {

template <class V, class F>
class Stencil {
 public:
  Stencil(F& field, const ChartPoint& p, const DomainPredicate& domain)
      : field_(field), p_(p), domain_(domain) {}

  V at(const CVector& z) const {
    ChartPoint q(z);
    if (domain_ && !domain_(q)) fail(ErrorKind::DomainViolation, "finite-difference stencil leaves the chart domain");
    V v = field_(q);
    if (!all_finite(v)) fail(ErrorKind::NonFinite, "field evaluation is not finite");
    return v;
  }

  // Unit real direction k: k = 2g is x^g, k = 2g + 1 is y^g.
  static cplx direction(int k) { return (k % 2 == 0) ? cplx(1.0, 0.0) : I_unit; }

  RealPartials<V> partials(const std::vector<double>& h, bool need_second) const {
    const int n = static_cast<int>(h.size());
    const CVector& z0 = p_.coords();
    RealPartials<V> out;
    out.value = at(z0);
    std::vector<V> plus(n), minus(n);
    out.first.resize(n);
    for (int k = 0; k < n; ++k) {
      CVector zp = z0, zm = z0;
      zp[k / 2] += h[k] * direction(k);
      zm[k / 2] -= h[k] * direction(k);
      plus[k] = at(zp);
      minus[k] = at(zm);
      out.first[k] = V((plus[k] - minus[k]) * (0.5 / h[k]));
    }
    if (!need_second) return out;
    out.second.assign(static_cast<std::size_t>(n * n), zero_like(out.value));
    for (int k = 0; k < n; ++k) {
      out.second[k * n + k] = V((plus[k] - 2.0 * out.value + minus[k]) * (1.0 / (h[k] * h[k])));
      for (int l = k + 1; l < n; ++l) {
        const cplx dk = h[k] * direction(k);
        const cplx dl = h[l] * direction(l);
        CVector zpp = z0, zpm = z0, zmp = z0, zmm = z0;
        zpp[k / 2] += dk; zpp[l / 2] += dl;
        zpm[k / 2] += dk; zpm[l / 2] -= dl;
        zmp[k / 2] -= dk; zmp[l / 2] += dl;
        zmm[k / 2] -= dk; zmm[l / 2] -= dl;
        V mixed = V((at(zpp) - at(zpm) - at(zmp) + at(zmm)) * (0.25 / (h[k] * h[l])));
        out.second[k * n + l] = mixed;
        out.second[l * n + k] = mixed;
      }
    }
    return out;
  }

 private:
  F& field_;
  const ChartPoint& p_;
  const DomainPredicate& domain_;
};

inline std::vector<double> real_steps(const ChartPoint& p, double step) {
  std::vector<double> h(static_cast<std::size_t>(2 * p.dim()));
  for (int g = 0; g < p.dim(); ++g) {
    const double s = step * std::max(1.0, std::abs(p[g]));
    h[2 * g] = s;
    h[2 * g + 1] = s;
  }
  return h;
}

inline void check_margin(const ChartPoint& p, const FdConfig& cfg, const DomainPredicate& domain) {
  if (!domain) return;
  if (!domain(p)) fail(ErrorKind::DomainViolation, "point lies outside the chart domain");
  for (int g = 0; g < p.dim(); ++g) {
    const double s = cfg.min_domain_margin * std::max(1.0, std::abs(p[g]));
    for (cplx dir : {cplx(s, 0), cplx(-s, 0), cplx(0, s), cplx(0, -s)}) {
      CVector z = p.coords();
      z[g] += dir;
      if (!domain(ChartPoint(z)))
        fail(ErrorKind::DomainViolation, "point is closer to the chart boundary than min_domain_margin");
    }
  }
}

template <class V>
RealPartials<V> richardson(const RealPartials<V>& coarse, const RealPartials<V>& fine, double& err) {
  RealPartials<V> out;
  out.value = fine.value;
  auto combine = [&](const std::vector<V>& c, const std::vector<V>& f) {
    std::vector<V> r(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      V diff = V(f[i] - c[i]);
      err = std::max(err, max_abs(diff) / 3.0);
      r[i] = V(f[i] + diff * (1.0 / 3.0));
    }
    return r;
  };
  out.first = combine(coarse.first, fine.first);
  out.second = combine(coarse.second, fine.second);
  return out;
}

template <class V, class F>
RealPartials<V> real_partials(F& field, const ChartPoint& p, const FdConfig& cfg, const DomainPredicate& domain,
                              bool need_second, double& err) {
  cfg.validate();
  check_margin(p, cfg, domain);
  Stencil<V, F> stencil(field, p, domain);
  err = 0.0;
  auto coarse = stencil.partials(real_steps(p, cfg.step), need_second);
  if (!cfg.richardson) return coarse;
  auto fine = stencil.partials(real_steps(p, 0.5 * cfg.step), need_second);
  return richardson(coarse, fine, err);
}

}  // namespace detail

/// Value, first and second Wirtinger derivatives of `field` at p.
///
/// `field` is any callable ChartPoint -> V with V one of cplx, CVector, CMatrix.
/// Throws DomainViolation when the stencil leaves `domain`, NonFinite when an
/// evaluation is not finite.
template <class V, class F>
Jet2<V> wirtinger_jet2(F&& field, const ChartPoint& p, const FdConfig& cfg, const DomainPredicate& domain = {}) {
  double err = 0.0;
  auto rp = detail::real_partials<V>(field, p, cfg, domain, true, err);
  const int m = p.dim();
  const int n = 2 * m;
  auto D1 = [&](int k) -> const V& { return rp.first[static_cast<std::size_t>(k)]; };
  auto D2 = [&](int k, int l) -> const V& { return rp.second[static_cast<std::size_t>(k * n + l)]; };

  Jet2<V> jet;
  jet.m = m;
  jet.value = rp.value;
  jet.error_estimate = err;
  jet.d.resize(m);
  jet.dbar.resize(m);
  for (int g = 0; g < m; ++g) {
    jet.d[g] = V((D1(2 * g) - I_unit * D1(2 * g + 1)) * 0.5);
    jet.dbar[g] = V((D1(2 * g) + I_unit * D1(2 * g + 1)) * 0.5);
  }
  jet.dd.resize(static_cast<std::size_t>(m * m));
  jet.ddbar.resize(static_cast<std::size_t>(m * m));
  for (int g = 0; g < m; ++g) {
    const int xg = 2 * g, yg = 2 * g + 1;
    for (int a = 0; a < m; ++a) {
      const int xa = 2 * a, ya = 2 * a + 1;
      jet.ddbar[g * m + a] = V((D2(xg, xa) + D2(yg, ya) + I_unit * (D2(xg, ya) - D2(yg, xa))) * 0.25);
      jet.dd[g * m + a] = V((D2(xg, xa) - D2(yg, ya) - I_unit * (D2(xg, ya) + D2(yg, xa))) * 0.25);
    }
  }
  return jet;
}

/// First Wirtinger derivatives only (cheaper stencil).
template <class V>
struct Jet1 {
  V value{};
  std::vector<V> d;
  std::vector<V> dbar;
  double error_estimate = 0.0;
};

template <class V, class F>
Jet1<V> wirtinger_jet1(F&& field, const ChartPoint& p, const FdConfig& cfg, const DomainPredicate& domain = {}) {
  double err = 0.0;
  auto rp = detail::real_partials<V>(field, p, cfg, domain, false, err);
  const int m = p.dim();
  Jet1<V> jet;
  jet.value = rp.value;
  jet.error_estimate = err;
  jet.d.resize(m);
  jet.dbar.resize(m);
  for (int g = 0; g < m; ++g) {
    jet.d[g] = V((rp.first[2 * g] - I_unit * rp.first[2 * g + 1]) * 0.5);
    jet.dbar[g] = V((rp.first[2 * g] + I_unit * rp.first[2 * g + 1]) * 0.5);
  }
  return jet;
}

/// Scalar convenience wrapper returning the jet in vector/matrix form.
template <class F>
ScalarJet2 scalar_jet2(F&& field, const ChartPoint& p, const FdConfig& cfg, const DomainPredicate& domain = {}) {
  auto jet = wirtinger_jet2<cplx>(std::forward<F>(field), p, cfg, domain);
  const int m = jet.m;
  ScalarJet2 out;
  out.value = jet.value;
  out.error_estimate = jet.error_estimate;
  out.d.resize(m);
  out.dbar.resize(m);
  out.ddbar.resize(m, m);
  for (int g = 0; g < m; ++g) {
    out.d[g] = jet.d[g];
    out.dbar[g] = jet.dbar[g];
    for (int dl = 0; dl < m; ++dl) out.ddbar(g, dl) = jet.mixed(g, dl);
  }
  return out;
}

}  // namespace chernlab
