#pragma once

// Pointwise verification of the two ddbar-Bochner identities for a
// holomorphic map f : (M, g) -> (N, h).
//
// Both identities are stated at a point p in coordinates with g(p) = I,
// h(f(p)) = I and df(p) = [diag(lambda); 0]. The left-hand sides are computed
// here by finite differences of the scalar functions log W_l and |V_l|^2 in
// those coordinates; the right-hand sides come from curvature tensors, first
// metric jets and second jets of f. The two routes share no code beyond the
// field evaluators.
//
// Sign convention: (ddbar u)_{g d} = d^2 u / dz^g dzbar^d (no sqrt(-1)).

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "chernlab/errors.hpp"
#include "chernlab/fields.hpp"
#include "chernlab/geometry.hpp"
#include "chernlab/maps.hpp"
#include "chernlab/types.hpp"
#include "chernlab/wirtinger.hpp"

namespace chernlab {

/// Metrics and map in normalized coordinates z = p + P z', w = f(p) + Q w'.
struct NormalizedScene {
  MetricField g;           // g'(z') = P^T g(p + P z') conj(P)
  MetricField h;           // h'(w') = Q^T h(f(p) + Q w') conj(Q)
  HolomorphicMapField f;   // f'(z') = Q^{-1} (f(p + P z') - f(p))
  NormalizedFrame frame;
  ChartPoint base;         // origin of the z' chart
  ChartPoint p;            // original point
  ChartPoint fp;           // f(p) in the original target chart

  // Data at the base point, expressed in the normalized charts.
  MetricJet g_jet;
  MetricJet h_jet;
  CurvatureTensor RM;
  CurvatureTensor RN;
  MapJets f_jets;

  double chart_scale = 1.0;  // |P|_2; used to keep the physical FD step fixed

  int m() const { return g.dim; }
  int n() const { return h.dim; }
  double lambda(int a) const { return frame.lambdas[a]; }
};

struct BochnerBreakdown {
  CMatrix curvature_M;        // sum_{a<=l} R^M(g, d-bar, a, a-bar)            log-det form; |lambda|^2 weights in the trace form
  CMatrix curvature_N;        // -sum_{a<=l} R^N(g, d-bar, a, a-bar) lambda_g lambda_d  log-det form; trace analogue
  CMatrix metric_derivative;  // -sum_{a<=l} sum_{t>l} g_{a t-bar, g} g_{t a-bar, d-bar}  log-det form only
  CMatrix gram;               // residue Gram term; <nabla V, nabla V> for the trace form
};

struct BochnerReport {
  int ell = 0;
  CMatrix lhs;
  CMatrix rhs;
  double residual = 0.0;
  BochnerBreakdown breakdown;
  double lhs_error_estimate = 0.0;
};

inline constexpr double kBochnerTolerance = 1e-5;

/// Chern connection coefficients Gamma^d_{g a} = g^{d e-bar} g_{a e-bar, g}.
/// gammaM[g](a, d) for g at p; gammaN[k](i, j) for h at f(p).
struct ConnectionCoeffs {
  std::vector<CMatrix> gammaM;
  std::vector<CMatrix> gammaN;
};

/// (nabla_g V_l) components: entries[g](a, i) in the normalized frame.
struct NablaV {
  std::vector<CMatrix> entries;
};

namespace detail {

inline std::vector<CMatrix> connection_from_jet(const MetricJet& jet) {
  std::vector<CMatrix> out(static_cast<std::size_t>(jet.m));
  for (int c = 0; c < jet.m; ++c) out[c] = jet.d[c] * jet.inverse;
  return out;
}

inline FdConfig scene_config(const NormalizedScene& scene, const FdConfig& cfg) {
  // Match the physical step that the original chart would use at p.
  FdConfig out = cfg;
  const double factor = std::max(1.0, scene.p.max_abs()) / std::max(scene.chart_scale, 1e-300);
  out.step = std::min(cfg.step * factor, 0.2);
  out.min_domain_margin = out.step * (cfg.min_domain_margin / cfg.step);
  return out;
}

inline void require_rank(const NormalizedScene& scene, int ell) {
  if (ell < 1 || ell > scene.m()) fail(ErrorKind::InvalidArgument, "l must lie in [1, m]");
  if (scene.frame.rank < ell)
    fail(ErrorKind::RankDeficient, "lambda_" + std::to_string(ell) + " is below the rank tolerance");
}

// A'(z') and G'(z') from the normalized fields.
inline void scene_forms(const NormalizedScene& scene, const ChartPoint& z, const FdConfig& cfg, CMatrix& G, CMatrix& A) {
  G = scene.g.components(z);
  const MapJets jets = holomorphic_jets(scene.f, z, cfg, false);
  const ChartPoint w(jets.value);
  if (!scene.h.contains(w)) fail(ErrorKind::DomainViolation, "map leaves the target domain near the base point");
  A = pullback(scene.h.components(w), jets.jacobian);
}

}  // namespace detail

/// Builds the normalized scene at p.
inline NormalizedScene normalize_scene(const MetricField& g, const MetricField& h, const HolomorphicMapField& f,
                                       const ChartPoint& p, const FdConfig& cfg) {
  const auto data = detail::map_point_data(g, h, f, p, cfg);
  NormalizedScene scene;
  scene.frame = normalize_frames(data.G, data.H, data.jets.jacobian);
  scene.p = p;
  scene.fp = ChartPoint(data.jets.value);
  scene.base = ChartPoint::origin(g.dim);

  const CMatrix P = scene.frame.P;
  const CMatrix Q = scene.frame.Q;
  const CMatrix Qinv = Q.inverse();
  scene.chart_scale = Eigen::JacobiSVD<CMatrix>(P).singularValues()[0];

  const CVector p0 = p.coords();
  const CVector w0 = scene.fp.coords();
  const MetricField g0 = g, h0 = h;
  const HolomorphicMapField f0 = f;

  scene.g.dim = g.dim;
  scene.g.label = g.label + " (normalized)";
  scene.g.components = [g0, P, p0](const ChartPoint& z) -> CMatrix {
    return P.transpose() * g0.components(ChartPoint(CVector(p0 + P * z.coords()))) * P.conjugate();
  };
  scene.g.domain = [g0, P, p0](const ChartPoint& z) { return g0.contains(ChartPoint(CVector(p0 + P * z.coords()))); };

  scene.h.dim = h.dim;
  scene.h.label = h.label + " (normalized)";
  scene.h.components = [h0, Q, w0](const ChartPoint& w) -> CMatrix {
    return Q.transpose() * h0.components(ChartPoint(CVector(w0 + Q * w.coords()))) * Q.conjugate();
  };
  scene.h.domain = [h0, Q, w0](const ChartPoint& w) { return h0.contains(ChartPoint(CVector(w0 + Q * w.coords()))); };

  scene.f.dim_in = f.dim_in;
  scene.f.dim_out = f.dim_out;
  scene.f.label = f.label + " (normalized)";
  scene.f.eval = [f0, P, Qinv, p0, w0](const ChartPoint& z) -> CVector {
    return Qinv * (f0.eval(ChartPoint(CVector(p0 + P * z.coords()))) - w0);
  };
  scene.f.domain = [f0, P, p0](const ChartPoint& z) { return f0.domain(ChartPoint(CVector(p0 + P * z.coords()))); };
  if (f.has_closed_form_jets()) {
    scene.f.jacobian = [f0, P, Qinv, p0](const ChartPoint& z) -> CMatrix {
      return Qinv * f0.jacobian(ChartPoint(CVector(p0 + P * z.coords()))) * P;
    };
    scene.f.hessian = [f0, P, Qinv, p0](const ChartPoint& z) -> std::vector<CMatrix> {
      const auto hs = f0.hessian(ChartPoint(CVector(p0 + P * z.coords())));
      std::vector<CMatrix> out(hs.size(), CMatrix::Zero(P.cols(), P.cols()));
      for (std::size_t j = 0; j < hs.size(); ++j) {
        const CMatrix t = P.transpose() * hs[j] * P;
        for (std::size_t i = 0; i < hs.size(); ++i) out[i] += Qinv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * t;
      }
      return out;
    };
  }

  // Jets at the base point: computed in the original charts, then transformed.
  scene.g_jet = transform_jet(metric_jet(g, p, cfg), P);
  scene.h_jet = transform_jet(metric_jet(h, scene.fp, cfg), Q);
  scene.RM = curvature_from_jet(scene.g_jet);
  scene.RN = curvature_from_jet(scene.h_jet);

  MapJets fj;
  fj.value = CVector::Zero(f.dim_out);
  fj.jacobian = Qinv * data.jets.jacobian * P;
  fj.hessian.assign(static_cast<std::size_t>(f.dim_out), CMatrix::Zero(f.dim_in, f.dim_in));
  for (int j = 0; j < f.dim_out; ++j) {
    const CMatrix t = P.transpose() * data.jets.hessian[j] * P;
    for (int i = 0; i < f.dim_out; ++i) fj.hessian[i] += Qinv(i, j) * t;
  }
  fj.closed_form = data.jets.closed_form;
  fj.cr_residual = data.jets.cr_residual;
  fj.error_estimate = data.jets.error_estimate;
  scene.f_jets = std::move(fj);
  return scene;
}

// ---------------------------------------------------------------------------
// Identity for log W_l
// ---------------------------------------------------------------------------

/// d^2 log W_l / dz^g dzbar^d at the base point, by finite differences.
inline ScalarJet2 lhs_eq1_jet(const NormalizedScene& scene, int ell, const FdConfig& cfg) {
  detail::require_rank(scene, ell);
  const FdConfig scfg = detail::scene_config(scene, cfg);
  auto logW = [&](const ChartPoint& z) -> cplx {
    CMatrix G, A;
    detail::scene_forms(scene, z, cfg, G, A);
    const double det_a = A.topLeftCorner(ell, ell).determinant().real();
    const double det_g = G.topLeftCorner(ell, ell).determinant().real();
    if (!(det_a > 0.0) || !(det_g > 0.0)) return cplx(std::nan(""), 0.0);
    return cplx(std::log(det_a) - std::log(det_g), 0.0);
  };
  return scalar_jet2(logW, scene.base, scfg, scene.g.domain);
}

inline CMatrix lhs_eq1(const NormalizedScene& scene, int ell, const FdConfig& cfg) {
  return lhs_eq1_jet(scene, ell, cfg).ddbar;
}

/// Right-hand side of the log W_l identity assembled from curvature and jets.
inline CMatrix rhs_eq1(const NormalizedScene& scene, int ell, BochnerBreakdown* breakdown = nullptr) {
  detail::require_rank(scene, ell);
  const int m = scene.m(), n = scene.n();
  const auto& RM = scene.RM;
  const auto& RN = scene.RN;
  const auto& gj = scene.g_jet;
  const auto& hj = scene.h_jet;
  const auto& fh = scene.f_jets.hessian;
  BochnerBreakdown parts{CMatrix::Zero(m, m), CMatrix::Zero(m, m), CMatrix::Zero(m, m), CMatrix::Zero(m, m)};
  for (int g = 0; g < m; ++g)
    for (int d = 0; d < m; ++d) {
      const double lg = scene.lambda(g), ld = scene.lambda(d);
      for (int a = 0; a < ell; ++a) {
        parts.curvature_M(g, d) += RM(g, d, a, a);
        parts.curvature_N(g, d) -= RN(g, d, a, a) * lg * ld;
        for (int t = ell; t < m; ++t) parts.metric_derivative(g, d) -= gj.d[g](a, t) * gj.dbar[d](t, a);
        const double la = scene.lambda(a);
        for (int i = ell; i < n; ++i) {
          const cplx left = fh[i](a, g) + hj.d[g](a, i) * la * lg;
          const cplx right = std::conj(fh[i](a, d)) + hj.dbar[d](i, a) * la * ld;
          parts.gram(g, d) += left * right / (la * la);
        }
      }
    }
  if (breakdown) *breakdown = parts;
  return parts.curvature_M + parts.curvature_N + parts.metric_derivative + parts.gram;
}

inline double max_abs_difference(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline BochnerReport verify_eq1(const NormalizedScene& scene, int ell, const FdConfig& cfg) {
  BochnerReport r;
  r.ell = ell;
  const ScalarJet2 jet = lhs_eq1_jet(scene, ell, cfg);
  r.lhs = jet.ddbar;
  r.lhs_error_estimate = jet.error_estimate;
  r.rhs = rhs_eq1(scene, ell, &r.breakdown);
  r.residual = max_abs_difference(r.lhs, r.rhs);
  return r;
}

inline BochnerReport verify_eq1(const MetricField& g, const MetricField& h, const HolomorphicMapField& f,
                                const ChartPoint& p, int ell, const FdConfig& cfg) {
  return verify_eq1(normalize_scene(g, h, f, p, cfg), ell, cfg);
}

// ---------------------------------------------------------------------------
// Identity for U_l = |V_l|^2
// ---------------------------------------------------------------------------

inline ConnectionCoeffs connection_coeffs(const MetricField& g, const MetricField& h, const HolomorphicMapField& f,
                                          const ChartPoint& p, const FdConfig& cfg) {
  const MapJets jets = holomorphic_jets(f, p, cfg);
  ConnectionCoeffs out;
  out.gammaM = detail::connection_from_jet(metric_jet(g, p, cfg));
  out.gammaN = detail::connection_from_jet(metric_jet(h, ChartPoint(jets.value), cfg));
  return out;
}

/// Covariant derivative of V_l = sum_{a<=l} f^i_a dz^a (x) e_i at the base point:
///   (nabla_g V)_{a i} = [a<=l] f^i_{a g} - [i<=l] lambda_i Gamma^i_{g a}(g) + [a<=l] lambda_a Gamma^i_{g a}(h) lambda_g
/// where the metric Christoffel symbols reduce to first jets because g'(0) = I and h'(0) = I.
inline NablaV nabla_V(const NormalizedScene& scene, int ell) {
  if (ell < 1 || ell > scene.m()) fail(ErrorKind::InvalidArgument, "l must lie in [1, m]");
  const int m = scene.m(), n = scene.n();
  const auto& gj = scene.g_jet;
  const auto& hj = scene.h_jet;
  const auto& fh = scene.f_jets.hessian;
  NablaV out;
  out.entries.assign(static_cast<std::size_t>(m), CMatrix::Zero(m, n));
  for (int g = 0; g < m; ++g)
    for (int a = 0; a < m; ++a)
      for (int i = 0; i < n; ++i) {
        cplx v{};
        if (a < ell) v += fh[i](a, g) + scene.lambda(a) * hj.d[g](a, i) * scene.lambda(g);
        if (i < ell) v -= scene.lambda(i) * gj.d[g](a, i);
        out.entries[g](a, i) = v;
      }
  return out;
}

/// <nabla_a V, nabla_b V> as an m x m matrix.
inline CMatrix nabla_V_gram(const NablaV& nv) {
  const int m = static_cast<int>(nv.entries.size());
  CMatrix out(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) out(a, b) = (nv.entries[a].cwiseProduct(nv.entries[b].conjugate())).sum();
  return out;
}

inline ScalarJet2 lhs_eq2_jet(const NormalizedScene& scene, int ell, const FdConfig& cfg) {
  if (ell < 1 || ell > scene.m()) fail(ErrorKind::InvalidArgument, "l must lie in [1, m]");
  if (!(scene.lambda(0) > 0.0)) fail(ErrorKind::RankDeficient, "U_l vanishes at the base point");
  const FdConfig scfg = detail::scene_config(scene, cfg);
  auto U = [&](const ChartPoint& z) -> cplx {
    CMatrix G, A;
    detail::scene_forms(scene, z, cfg, G, A);
    return cplx(section_norm2(G, A, ell), 0.0);
  };
  return scalar_jet2(U, scene.base, scfg, scene.g.domain);
}

/// Curvature part of the U_l identity:
///   sum_{d<=l} R^M(a, b-bar, d, d-bar) lambda_d^2 - sum_{c<=l} R^N(a, b-bar, c, c-bar) lambda_c^2 lambda_a lambda_b.
inline void curvature_part_eq2(const NormalizedScene& scene, int ell, CMatrix& partM, CMatrix& partN) {
  const int m = scene.m();
  partM = CMatrix::Zero(m, m);
  partN = CMatrix::Zero(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < ell; ++c) {
        const double l2 = scene.lambda(c) * scene.lambda(c);
        partM(a, b) += scene.RM(a, b, c, c) * l2;
        partN(a, b) -= scene.RN(a, b, c, c) * l2 * scene.lambda(a) * scene.lambda(b);
      }
}

inline BochnerReport verify_eq2(const NormalizedScene& scene, int ell, const FdConfig& cfg) {
  BochnerReport r;
  r.ell = ell;
  const ScalarJet2 jet = lhs_eq2_jet(scene, ell, cfg);
  r.lhs = jet.ddbar;
  r.lhs_error_estimate = jet.error_estimate;
  const int m = scene.m();
  r.breakdown.metric_derivative = CMatrix::Zero(m, m);
  curvature_part_eq2(scene, ell, r.breakdown.curvature_M, r.breakdown.curvature_N);
  r.breakdown.gram = nabla_V_gram(nabla_V(scene, ell));
  r.rhs = r.breakdown.curvature_M + r.breakdown.curvature_N + r.breakdown.gram;
  r.residual = max_abs_difference(r.lhs, r.rhs);
  return r;
}

inline BochnerReport verify_eq2(const MetricField& g, const MetricField& h, const HolomorphicMapField& f,
                                const ChartPoint& p, int ell, const FdConfig& cfg) {
  return verify_eq2(normalize_scene(g, h, f, p, cfg), ell, cfg);
}

/// Smallest eigenvalue of the Hermitian part of a matrix.
inline double min_eigenvalue(const CMatrix& X) {
  const CMatrix herm = 0.5 * (X + X.adjoint());
  return Eigen::SelfAdjointEigenSolver<CMatrix>(herm, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

/// lhs minus the curvature part; a Gram matrix, hence positive semidefinite.
inline CMatrix eq2_gram_residue(const BochnerReport& r) {
  return r.lhs - r.breakdown.curvature_M - r.breakdown.curvature_N;
}

// ---------------------------------------------------------------------------
// Psi operator
// ---------------------------------------------------------------------------

/// Psi(u) = sum_g Re(u_{g g-bar}) / lambda_g^2 for the mixed Hessian `hess` of u at the base point.
inline double psi_trace(const NormalizedScene& scene, const CMatrix& hess) {
  const int m = scene.m();
  if (scene.frame.rank < m) fail(ErrorKind::RankDeficient, "Psi needs all singular values nonzero");
  if (hess.rows() != m || hess.cols() != m) fail(ErrorKind::InvalidArgument, "Hessian has the wrong shape");
  double s = 0.0;
  for (int g = 0; g < m; ++g) s += hess(g, g).real() / (scene.lambda(g) * scene.lambda(g));
  return s;
}

}  // namespace chernlab
