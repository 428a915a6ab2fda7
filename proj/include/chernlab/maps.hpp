#pragma once

#include <Eigen/SVD>

#include <string>
#include <vector>

#include "chernlab/errors.hpp"
#include "chernlab/fields.hpp"
#include "chernlab/geometry.hpp"
#include "chernlab/types.hpp"

namespace chernlab {

inline constexpr double kRankTolerance = 1e-8;

/// Coordinate changes realizing g(p) = I, h(f(p)) = I and a diagonal differential.
///
/// With z = p + P z' and w = f(p) + Q w':  P^T G P-bar = I,  Q^T H Q-bar = I and
/// Q^{-1} J P = [diag(lambdas); 0] with lambdas real, nonnegative, descending.
struct NormalizedFrame {
  CMatrix P;
  CMatrix Q;
  RVector lambdas;
  int rank = 0;
};

/// W_l, U_l, sigma_l and ||wedge^l df||_0 for l = 1..m (index l - 1).
struct MapScalars {
  RVector W;
  RVector U;
  RVector sigma;
  RVector wedge0;
};

inline int rank_of(const RVector& lambdas, double rel_tol = kRankTolerance) {
  if (lambdas.size() == 0 || !(lambdas[0] > 0.0)) return 0;
  int r = 0;
  for (Eigen::Index a = 0; a < lambdas.size(); ++a)
    if (lambdas[a] > rel_tol * lambdas[0]) ++r;
  return r;
}

/// A = J^T H conj(J), i.e. A_{a b-bar} = f^i_a conj(f^j_b) h_{i j-bar}.
inline CMatrix pullback(const CMatrix& H, const CMatrix& J) { return J.transpose() * H * J.conjugate(); }

/// Normalization from the metric values and the Jacobian at one point.
inline NormalizedFrame normalize_frames(const CMatrix& G, const CMatrix& H, const CMatrix& J) {
  const Eigen::Index m = G.rows(), n = H.rows();
  if (J.rows() != n || J.cols() != m) fail(ErrorKind::InvalidArgument, "Jacobian shape does not match the metrics");
  if (m > n) fail(ErrorKind::InvalidArgument, "normalized frames need dim_in <= dim_out");
  require_positive_definite(G, "domain metric");
  require_positive_definite(H, "target metric");
  const CMatrix P0 = unitary_frame(G);
  const CMatrix Q0 = unitary_frame(H);
  const CMatrix J0 = Q0.partialPivLu().solve(CMatrix(J * P0));
  Eigen::JacobiSVD<CMatrix> svd(J0, Eigen::ComputeFullU | Eigen::ComputeFullV);
  NormalizedFrame out;
  out.P = P0 * svd.matrixV();
  out.Q = Q0 * svd.matrixU();
  out.lambdas = svd.singularValues();
  out.rank = rank_of(out.lambdas);
  return out;
}

inline MapScalars map_scalars(const CMatrix& G, const CMatrix& H, const CMatrix& J) {
  const NormalizedFrame frame = normalize_frames(G, H, J);
  const CMatrix A = pullback(H, J);
  const Eigen::Index m = G.rows();
  MapScalars out;
  out.W.resize(m);
  out.U.resize(m);
  out.sigma.resize(m);
  out.wedge0.resize(m);
  double sigma = 0.0, wedge = 1.0;
  for (Eigen::Index l = 1; l <= m; ++l) {
    const CMatrix Al = A.topLeftCorner(l, l);
    const CMatrix Gl = G.topLeftCorner(l, l);
    out.W[l - 1] = (Al.determinant() / Gl.determinant()).real();
    // Trace against the block metric G_l, so that sigma_l >= U_l holds in any coordinates.
    out.U[l - 1] = Gl.llt().solve(Al).trace().real();
    const double lam = frame.lambdas[l - 1];
    sigma += lam * lam;
    wedge *= lam;
    out.sigma[l - 1] = sigma;
    out.wedge0[l - 1] = wedge;
  }
  return out;
}

/// |V_l|^2 = sum_{a, b <= l} g^{a b-bar} A_{a b-bar} with the full inverse metric.
inline double section_norm2(const CMatrix& G, const CMatrix& A, int ell) {
  const CMatrix Ginv = G.inverse();
  cplx s{};
  for (int a = 0; a < ell; ++a)
    for (int b = 0; b < ell; ++b) s += Ginv(b, a) * A(a, b);
  return s.real();
}

// ---------------------------------------------------------------------------
// Field-level operations
// ---------------------------------------------------------------------------

namespace detail {

struct MapPointData {
  MapJets jets;
  CMatrix G;
  CMatrix H;
};

inline MapPointData map_point_data(const MetricField& g, const MetricField& h, const HolomorphicMapField& f,
                                   const ChartPoint& p, const FdConfig& cfg) {
  if (g.dim != f.dim_in || h.dim != f.dim_out)
    fail(ErrorKind::InvalidArgument, "map '" + f.label + "' does not match the metric dimensions");
  if (!g.contains(p)) fail(ErrorKind::DomainViolation, "point lies outside the domain of '" + g.label + "'");
  MapPointData d;
  d.jets = holomorphic_jets(f, p, cfg);
  const ChartPoint fp(d.jets.value);
  if (!h.contains(fp)) fail(ErrorKind::DomainViolation, "f(p) lies outside the domain of '" + h.label + "'");
  d.G = g.components(p);
  d.H = h.components(fp);
  return d;
}

}  // namespace detail

inline CMatrix pullback_metric(const HolomorphicMapField& f, const MetricField& h, const ChartPoint& p, const FdConfig& cfg) {
  if (h.dim != f.dim_out) fail(ErrorKind::InvalidArgument, "target metric does not match the map");
  const MapJets jets = holomorphic_jets(f, p, cfg);
  const ChartPoint fp(jets.value);
  if (!h.contains(fp)) fail(ErrorKind::DomainViolation, "f(p) lies outside the domain of '" + h.label + "'");
  return pullback(h.components(fp), jets.jacobian);
}

inline NormalizedFrame normalize_frames(const MetricField& g, const MetricField& h, const HolomorphicMapField& f,
                                        const ChartPoint& p, const FdConfig& cfg) {
  const auto d = detail::map_point_data(g, h, f, p, cfg);
  return normalize_frames(d.G, d.H, d.jets.jacobian);
}

inline MapScalars map_scalars(const MetricField& g, const MetricField& h, const HolomorphicMapField& f,
                              const ChartPoint& p, const FdConfig& cfg) {
  const auto d = detail::map_point_data(g, h, f, p, cfg);
  return map_scalars(d.G, d.H, d.jets.jacobian);
}

inline int map_rank(const MetricField& g, const MetricField& h, const HolomorphicMapField& f, const ChartPoint& p,
                    const FdConfig& cfg) {
  return normalize_frames(g, h, f, p, cfg).rank;
}

}  // namespace chernlab
