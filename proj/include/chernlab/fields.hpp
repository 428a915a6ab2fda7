#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chernlab/errors.hpp"
#include "chernlab/types.hpp"
#include "chernlab/wirtinger.hpp"

namespace chernlab {

/// Hermitian metric g_{a b-bar}(z) on a chart. components(z)(a, b) = g_{a b-bar}.
struct MetricField {
  int dim = 0;
  std::function<CMatrix(const ChartPoint&)> components;
  DomainPredicate domain = whole_chart();
  std::string label;

  CMatrix operator()(const ChartPoint& z) const { return components(z); }
  bool contains(const ChartPoint& z) const { return !domain || domain(z); }
};

/// Holomorphic map f : C^m -> C^n given by an evaluator and optional closed-form jets.
struct HolomorphicMapField {
  int dim_in = 0;
  int dim_out = 0;
  std::function<CVector(const ChartPoint&)> eval;
  std::function<CMatrix(const ChartPoint&)> jacobian;                 // n x m, (i, a) = df^i/dz^a
  std::function<std::vector<CMatrix>(const ChartPoint&)> hessian;     // n entries, (a, g) = d^2 f^i/dz^a dz^g
  DomainPredicate domain = whole_chart();
  std::string label;

  CVector operator()(const ChartPoint& z) const { return eval(z); }
  bool has_closed_form_jets() const { return static_cast<bool>(jacobian) && static_cast<bool>(hessian); }
};

/// Values f^i, first derivatives f^i_a and second derivatives f^i_{a g} at a point.
struct MapJets {
  CVector value;
  CMatrix jacobian;              // n x m
  std::vector<CMatrix> hessian;  // n entries of m x m
  double cr_residual = 0.0;      // max |df/dzbar| seen by the stencil (0 if not checked)
  bool closed_form = false;
  double error_estimate = 0.0;
};

inline double holomorphy_tolerance(const CMatrix& jacobian) {
  const double scale = jacobian.size() ? std::max(1.0, jacobian.cwiseAbs().maxCoeff()) : 1.0;
  return 1e-6 * scale;
}

/// Jets of a holomorphic map. Closed-form jets are returned verbatim when the
/// map supplies them; otherwise the Wirtinger stencil is used. With
/// `check_holomorphy` the Cauchy-Riemann residual is measured by the stencil
/// and HolomorphyViolation is thrown when it exceeds tolerance.
inline MapJets holomorphic_jets(const HolomorphicMapField& f, const ChartPoint& p, const FdConfig& cfg,
                                bool check_holomorphy = true) {
  if (p.dim() != f.dim_in) fail(ErrorKind::InvalidArgument, "map '" + f.label + "' expects a point of dimension " + std::to_string(f.dim_in));
  const int m = f.dim_in;
  const int n = f.dim_out;
  MapJets out;
  auto evaluator = [&f](const ChartPoint& z) -> CVector { return f.eval(z); };

  if (f.has_closed_form_jets()) {
    if (!f.domain(p)) fail(ErrorKind::DomainViolation, "point lies outside the domain of map '" + f.label + "'");
    out.value = f.eval(p);
    out.jacobian = f.jacobian(p);
    out.hessian = f.hessian(p);
    out.closed_form = true;
    if (!detail::all_finite(out.value) || !detail::all_finite(out.jacobian))
      fail(ErrorKind::NonFinite, "map '" + f.label + "' returned a non-finite jet");
    if (check_holomorphy) {
      auto j1 = wirtinger_jet1<CVector>(evaluator, p, cfg, f.domain);
      for (int a = 0; a < m; ++a) out.cr_residual = std::max(out.cr_residual, detail::max_abs(j1.dbar[a]));
    }
  } else {
    auto jet = wirtinger_jet2<CVector>(evaluator, p, cfg, f.domain);
    out.value = jet.value;
    out.error_estimate = jet.error_estimate;
    out.jacobian.resize(n, m);
    for (int a = 0; a < m; ++a) {
      out.jacobian.col(a) = jet.d[a];
      out.cr_residual = std::max(out.cr_residual, detail::max_abs(jet.dbar[a]));
    }
    out.hessian.assign(n, CMatrix::Zero(m, m));
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < m; ++a)
        for (int g = 0; g < m; ++g) out.hessian[i](a, g) = jet.holo2(a, g)[i];
  }
  if (check_holomorphy && out.cr_residual > holomorphy_tolerance(out.jacobian))
    fail(ErrorKind::HolomorphyViolation,
         "map '" + f.label + "' has Cauchy-Riemann residual " + std::to_string(out.cr_residual));
  return out;
}

}  // namespace chernlab
