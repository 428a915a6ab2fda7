#pragma once

// Chern connection curvature of a Hermitian metric and the curvature
// functionals built from it.
//
// Index conventions (used throughout the library):
//   * G(a, b) = g_{a b-bar};  g(X, Y) = sum g_{a b-bar} X^a conj(Y^b) = X^T G conj(Y).
//   * The inverse metric entry g^{a b-bar} is (G^{-1})(b, a), so that
//     sum g^{a b-bar} A_{a b-bar} = tr(G^{-1} A).
//   * R(i, j, k, l) = R_{i j-bar k l-bar}
//       = -d_i dbar_j g_{k l-bar} + g^{p q-bar} d_i g_{k q-bar} dbar_j g_{p l-bar}
//     and R(X, Ybar, Z, Wbar) = sum R_{i j-bar k l-bar} X^i conj(Y^j) Z^k conj(W^l).
//   * A frame E (m x l) is g-orthonormal when E^T G conj(E) = I.

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "chernlab/errors.hpp"
#include "chernlab/fields.hpp"
#include "chernlab/types.hpp"
#include "chernlab/wirtinger.hpp"

namespace chernlab {

// ---------------------------------------------------------------------------
// Metric algebra
// ---------------------------------------------------------------------------

inline double hermitian_residual(const CMatrix& G) {
  return G.size() ? (G - G.adjoint()).cwiseAbs().maxCoeff() : 0.0;
}

/// Throws SingularMetric unless G is Hermitian and (scale-aware) positive definite.
inline void require_positive_definite(const CMatrix& G, const std::string& what = "metric") {
  if (!detail::all_finite(G)) fail(ErrorKind::NonFinite, what + " is not finite");
  const double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
  if (hermitian_residual(G) > 1e-12 * scale) fail(ErrorKind::SingularMetric, what + " is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(G, Eigen::EigenvaluesOnly);
  const RVector ev = es.eigenvalues();
  if (!(ev.minCoeff() > 1e-12 * ev.cwiseAbs().maxCoeff()) || !(ev.maxCoeff() > 0.0))
    fail(ErrorKind::SingularMetric, what + " is not positive definite");
}

/// g(X, Y) = X^T G conj(Y).
inline cplx metric_pairing(const CMatrix& G, const CVector& X, const CVector& Y) {
  return (X.transpose() * G * Y.conjugate())(0, 0);
}

inline double metric_norm2(const CMatrix& G, const CVector& X) { return metric_pairing(G, X, X).real(); }

/// Gram matrix E^T G conj(E) of the columns of E.
inline CMatrix frame_gram(const CMatrix& G, const CMatrix& E) { return E.transpose() * G * E.conjugate(); }

/// Orthonormalizes the columns of X with respect to g (Gram-Schmidt order preserved).
inline CMatrix orthonormalize_frame(const CMatrix& G, const CMatrix& X) {
  Eigen::LLT<CMatrix> llt(G.conjugate());
  if (llt.info() != Eigen::Success) fail(ErrorKind::SingularMetric, "metric has no Cholesky factor");
  const CMatrix L = llt.matrixL();
  const CMatrix Y = L.adjoint() * X;
  Eigen::HouseholderQR<CMatrix> qr(Y);
  CMatrix Q = qr.householderQ() * CMatrix::Identity(Y.rows(), Y.cols());
  // Fix phases so that the triangular factor has a positive diagonal.
  const CMatrix R = qr.matrixQR().topRows(Y.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < Y.cols(); ++c) {
    const cplx r = R(c, c);
    if (std::abs(r) < 1e-14 * std::max(1.0, Y.col(c).norm()))
      fail(ErrorKind::InvalidArgument, "frame columns are linearly dependent");
    Q.col(c) *= r / std::abs(r);
  }
  return L.adjoint().triangularView<Eigen::Upper>().solve(Q);
}

/// Frame P with P^T G conj(P) = I (upper-triangular Cholesky normalization).
inline CMatrix unitary_frame(const CMatrix& G) {
  return orthonormalize_frame(G, CMatrix::Identity(G.rows(), G.cols()));
}

// ---------------------------------------------------------------------------
// Metric jets
// ---------------------------------------------------------------------------

/// g, dg/dz^c, dg/dzbar^d, d^2 g/dz^c dzbar^d and g^{-1} at a point.
struct MetricJet {
  int m = 0;
  CMatrix g;
  std::vector<CMatrix> d;      // d[c](a, b) = g_{a b-bar, c}
  std::vector<CMatrix> dbar;   // dbar[d](a, b) = g_{a b-bar, d-bar}
  std::vector<CMatrix> ddbar;  // ddbar[c * m + d](a, b) = g_{a b-bar, c d-bar}
  CMatrix inverse;             // matrix inverse of g
  double error_estimate = 0.0;

  const CMatrix& mixed(int c, int dl) const { return ddbar[static_cast<std::size_t>(c * m + dl)]; }
};

inline MetricJet metric_jet(const MetricField& metric, const ChartPoint& p, const FdConfig& cfg) {
  if (p.dim() != metric.dim)
    fail(ErrorKind::InvalidArgument, "metric '" + metric.label + "' expects a point of dimension " + std::to_string(metric.dim));
  auto field = [&metric](const ChartPoint& z) -> CMatrix { return metric.components(z); };
  auto jet = wirtinger_jet2<CMatrix>(field, p, cfg, metric.domain);
  require_positive_definite(jet.value, "metric '" + metric.label + "'");
  MetricJet out;
  out.m = metric.dim;
  out.g = jet.value;
  out.d = std::move(jet.d);
  out.dbar = std::move(jet.dbar);
  out.ddbar = std::move(jet.ddbar);
  out.inverse = out.g.inverse();
  out.error_estimate = jet.error_estimate;
  return out;
}

/// Transforms a metric jet under the linear change z = p + P z'.
inline MetricJet transform_jet(const MetricJet& jet, const CMatrix& P) {
  const int m = jet.m;
  const CMatrix Pc = P.conjugate();
  auto congruence = [&](const CMatrix& X) -> CMatrix { return P.transpose() * X * Pc; };
  MetricJet out;
  out.m = m;
  out.error_estimate = jet.error_estimate;
  out.g = congruence(jet.g);
  out.inverse = out.g.inverse();
  out.d.assign(m, CMatrix::Zero(m, m));
  out.dbar.assign(m, CMatrix::Zero(m, m));
  out.ddbar.assign(static_cast<std::size_t>(m * m), CMatrix::Zero(m, m));
  std::vector<CMatrix> d(m), dbar(m), dd(static_cast<std::size_t>(m * m));
  for (int c = 0; c < m; ++c) {
    d[c] = congruence(jet.d[c]);
    dbar[c] = congruence(jet.dbar[c]);
  }
  for (int c = 0; c < m; ++c)
    for (int e = 0; e < m; ++e) dd[c * m + e] = congruence(jet.mixed(c, e));
  for (int cp = 0; cp < m; ++cp) {
    for (int c = 0; c < m; ++c) {
      out.d[cp] += P(c, cp) * d[c];
      out.dbar[cp] += Pc(c, cp) * dbar[c];
    }
  }
  for (int cp = 0; cp < m; ++cp)
    for (int dp = 0; dp < m; ++dp)
      for (int c = 0; c < m; ++c)
        for (int e = 0; e < m; ++e) out.ddbar[cp * m + dp] += P(c, cp) * Pc(e, dp) * dd[c * m + e];
  return out;
}

// ---------------------------------------------------------------------------
// Curvature tensor
// ---------------------------------------------------------------------------

/// R_{i j-bar k l-bar} at a point.
class CurvatureTensor {
 public:
  CurvatureTensor() = default;
  explicit CurvatureTensor(int m) : m_(m), data_(static_cast<std::size_t>(m * m * m * m), cplx{}) {}

  int dim() const { return m_; }

  cplx& operator()(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }
  cplx operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }

  /// R(X, Ybar, Z, Wbar).
  cplx contract(const CVector& X, const CVector& Y, const CVector& Z, const CVector& W) const {
    const CVector Yc = Y.conjugate(), Wc = W.conjugate();
    cplx s{};
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) {
        const cplx xy = X[i] * Yc[j];
        if (xy == cplx{}) continue;
        for (int k = 0; k < m_; ++k)
          for (int l = 0; l < m_; ++l) s += (*this)(i, j, k, l) * xy * Z[k] * Wc[l];
      }
    return s;
  }

  /// max |R_{i j-bar k l-bar} - conj(R_{j i-bar l k-bar})|.
  double conjugate_symmetry_residual() const {
    double r = 0.0;
    for_each_index([&](int i, int j, int k, int l) {
      r = std::max(r, std::abs((*this)(i, j, k, l) - std::conj((*this)(j, i, l, k))));
    });
    return r;
  }

  /// max over indices of the two Kaehler symmetries R_{i j k l} = R_{k j i l} = R_{i l k j}.
  double kahler_symmetry_residual() const {
    double r = 0.0;
    for_each_index([&](int i, int j, int k, int l) {
      r = std::max(r, std::abs((*this)(i, j, k, l) - (*this)(k, j, i, l)));
      r = std::max(r, std::abs((*this)(i, j, k, l) - (*this)(i, l, k, j)));
    });
    return r;
  }

  double max_abs() const {
    double r = 0.0;
    for (const cplx& v : data_) r = std::max(r, std::abs(v));
    return r;
  }

  template <class Fn>
  void for_each_index(Fn&& fn) const {
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j)
        for (int k = 0; k < m_; ++k)
          for (int l = 0; l < m_; ++l) fn(i, j, k, l);
  }

 private:
  std::size_t index(int i, int j, int k, int l) const {
    return static_cast<std::size_t>(((i * m_ + j) * m_ + k) * m_ + l);
  }

  int m_ = 0;
  std::vector<cplx> data_;
};

inline CurvatureTensor curvature_from_jet(const MetricJet& jet) {
  const int m = jet.m;
  CurvatureTensor R(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const CMatrix block = -jet.mixed(i, j) + jet.d[i] * jet.inverse * jet.dbar[j];
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) R(i, j, k, l) = block(k, l);
    }
  return R;
}

/// Chern curvature tensor of g at p.
inline CurvatureTensor chern_curvature(const MetricField& g, const ChartPoint& p, const FdConfig& cfg) {
  return curvature_from_jet(metric_jet(g, p, cfg));
}

/// R'_{a b-bar c d-bar} = sum R_{i j-bar k l-bar} E(i,a) conj(E(j,b)) E(k,c) conj(E(l,d)).
inline CurvatureTensor curvature_in_frame(const CurvatureTensor& R, const CMatrix& E) {
  const int m = R.dim();
  if (E.rows() != m) fail(ErrorKind::InvalidArgument, "frame has the wrong number of rows");
  const int q = static_cast<int>(E.cols());
  const CMatrix Ec = E.conjugate();
  // Transform one slot at a time; slot sizes shrink from m to q.
  std::vector<cplx> cur(R.dim() > 0 ? static_cast<std::size_t>(m * m * m * m) : 0);
  R.for_each_index([&](int i, int j, int k, int l) { cur[static_cast<std::size_t>(((i * m + j) * m + k) * m + l)] = R(i, j, k, l); });
  int dims[4] = {m, m, m, m};
  for (int slot = 0; slot < 4; ++slot) {
    const CMatrix& T = (slot % 2 == 0) ? E : Ec;
    int nd[4] = {dims[0], dims[1], dims[2], dims[3]};
    nd[slot] = q;
    std::vector<cplx> next(static_cast<std::size_t>(nd[0] * nd[1] * nd[2] * nd[3]), cplx{});
    for (int a = 0; a < nd[0]; ++a)
      for (int b = 0; b < nd[1]; ++b)
        for (int c = 0; c < nd[2]; ++c)
          for (int d = 0; d < nd[3]; ++d) {
            int idx[4] = {a, b, c, d};
            const int target = idx[slot];
            cplx s{};
            for (int t = 0; t < dims[slot]; ++t) {
              idx[slot] = t;
              s += cur[static_cast<std::size_t>(((idx[0] * dims[1] + idx[1]) * dims[2] + idx[2]) * dims[3] + idx[3])] * T(t, target);
            }
            next[static_cast<std::size_t>(((a * nd[1] + b) * nd[2] + c) * nd[3] + d)] = s;
          }
    cur = std::move(next);
    dims[slot] = q;
  }
  CurvatureTensor out(q);
  out.for_each_index([&](int a, int b, int c, int d) { out(a, b, c, d) = cur[static_cast<std::size_t>(((a * q + b) * q + c) * q + d)]; });
  return out;
}

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

/// First Chern Ricci: R_{i j-bar} = g^{k l-bar} R_{i j-bar k l-bar}.
inline CMatrix ricci_first(const CurvatureTensor& R, const CMatrix& G) {
  const int m = R.dim();
  const CMatrix Ginv = G.inverse();
  CMatrix out = CMatrix::Zero(m, m);
  R.for_each_index([&](int i, int j, int k, int l) { out(i, j) += Ginv(l, k) * R(i, j, k, l); });
  return out;
}

/// Second Chern Ricci: Ric2_{k l-bar} = g^{i j-bar} R_{i j-bar k l-bar}.
inline CMatrix ricci_second(const CurvatureTensor& R, const CMatrix& G) {
  const int m = R.dim();
  const CMatrix Ginv = G.inverse();
  CMatrix out = CMatrix::Zero(m, m);
  R.for_each_index([&](int i, int j, int k, int l) { out(k, l) += Ginv(j, i) * R(i, j, k, l); });
  return out;
}

/// Chern scalar curvature; the imaginary part is discarded (it is roundoff).
inline double scalar_curvature(const CurvatureTensor& R, const CMatrix& G) {
  return (G.inverse().transpose().cwiseProduct(ricci_first(R, G))).sum().real();
}

inline CMatrix chern_ricci_first(const MetricField& g, const ChartPoint& p, const FdConfig& cfg) {
  auto jet = metric_jet(g, p, cfg);
  return ricci_first(curvature_from_jet(jet), jet.g);
}

/// -d_i dbar_j log det g, the second route to the first Chern Ricci form.
inline CMatrix ricci_from_log_det(const MetricField& g, const ChartPoint& p, const FdConfig& cfg) {
  auto logdet = [&g](const ChartPoint& z) -> cplx {
    const CMatrix G = g.components(z);
    // Hermitian positive definite: log det is real.
    Eigen::LLT<CMatrix> llt(G);
    if (llt.info() != Eigen::Success) return cplx(std::nan(""), 0.0);
    double s = 0.0;
    const CMatrix L = llt.matrixL();
    for (Eigen::Index i = 0; i < L.rows(); ++i) s += 2.0 * std::log(L(i, i).real());
    return cplx(s, 0.0);
  };
  return -scalar_jet2(logdet, p, cfg, g.domain).ddbar;
}

inline CMatrix chern_ricci_second(const MetricField& g, const ChartPoint& p, const FdConfig& cfg) {
  auto jet = metric_jet(g, p, cfg);
  return ricci_second(curvature_from_jet(jet), jet.g);
}

inline double chern_scalar(const MetricField& g, const ChartPoint& p, const FdConfig& cfg) {
  auto jet = metric_jet(g, p, cfg);
  return scalar_curvature(curvature_from_jet(jet), jet.g);
}

// ---------------------------------------------------------------------------
// Sectional-type functionals (tensor level)
// ---------------------------------------------------------------------------

inline void require_nonzero(const CMatrix& G, const CVector& X, const char* name) {
  if (X.size() != G.rows()) fail(ErrorKind::InvalidArgument, std::string(name) + " has the wrong dimension");
  if (!(metric_norm2(G, X) > 0.0)) fail(ErrorKind::InvalidArgument, std::string(name) + " must be nonzero");
}

/// H(X) = R(X, Xbar, X, Xbar) / g(X, X)^2.
inline double holomorphic_sectional(const CurvatureTensor& R, const CMatrix& G, const CVector& X) {
  require_nonzero(G, X, "X");
  const double n2 = metric_norm2(G, X);
  return R.contract(X, X, X, X).real() / (n2 * n2);
}

/// B(X, Y) = R(X, Xbar, Y, Ybar) / (g(X, X) g(Y, Y)).
inline double bisectional(const CurvatureTensor& R, const CMatrix& G, const CVector& X, const CVector& Y) {
  require_nonzero(G, X, "X");
  require_nonzero(G, Y, "Y");
  return R.contract(X, X, Y, Y).real() / (metric_norm2(G, X) * metric_norm2(G, Y));
}

inline void require_orthonormal(const CMatrix& G, const CMatrix& E, double tol = 1e-9) {
  if (E.rows() != G.rows() || E.cols() < 1 || E.cols() > G.rows())
    fail(ErrorKind::InvalidArgument, "frame has an invalid shape");
  const CMatrix gram = frame_gram(G, E);
  if ((gram - CMatrix::Identity(E.cols(), E.cols())).cwiseAbs().maxCoeff() > tol)
    fail(ErrorKind::InvalidArgument, "frame is not g-orthonormal");
}

/// Unit vector of v (in g) after checking that v lies in span(Sigma).
inline CVector unit_in_span(const CMatrix& G, const CMatrix& Sigma, const CVector& v) {
  require_nonzero(G, v, "v");
  // Coordinates of v in the orthonormal basis: c_a = g(v, E_a).
  const CVector coeff = (v.transpose() * G * Sigma.conjugate()).transpose();
  const CVector proj = Sigma * coeff;
  const double scale = std::sqrt(metric_norm2(G, v));
  if (std::sqrt(std::max(0.0, metric_norm2(G, v - proj))) > 1e-8 * scale)
    fail(ErrorKind::InvalidArgument, "v does not lie in the subspace");
  return v / scale;
}

/// Ric^(1)_l(p, Sigma)(v, vbar) = sum_{i <= l} R(v, vbar, E_i, E_i-bar), v normalized to unit length.
inline double ricci_l_first(const CurvatureTensor& R, const CMatrix& G, const CMatrix& Sigma, const CVector& v) {
  require_orthonormal(G, Sigma);
  const CVector u = unit_in_span(G, Sigma, v);
  double s = 0.0;
  for (Eigen::Index i = 0; i < Sigma.cols(); ++i) s += R.contract(u, u, Sigma.col(i), Sigma.col(i)).real();
  return s;
}

/// Ric^(2)_l(p, Sigma)(v, vbar) = sum_{i <= l} R(E_i, E_i-bar, v, vbar), v normalized to unit length.
inline double ricci_l_second(const CurvatureTensor& R, const CMatrix& G, const CMatrix& Sigma, const CVector& v) {
  require_orthonormal(G, Sigma);
  const CVector u = unit_in_span(G, Sigma, v);
  double s = 0.0;
  for (Eigen::Index i = 0; i < Sigma.cols(); ++i) s += R.contract(Sigma.col(i), Sigma.col(i), u, u).real();
  return s;
}

/// S_l(p, Sigma) = sum_{i, j <= l} R(E_i, E_i-bar, E_j, E_j-bar).
inline double scalar_l(const CurvatureTensor& R, const CMatrix& G, const CMatrix& Sigma) {
  require_orthonormal(G, Sigma);
  const CurvatureTensor Rs = curvature_in_frame(R, Sigma);
  double s = 0.0;
  for (int i = 0; i < Rs.dim(); ++i)
    for (int j = 0; j < Rs.dim(); ++j) s += Rs(i, i, j, j).real();
  return s;
}

/// The l x l Hermitian forms of Ric^(1)_l and Ric^(2)_l on span(Sigma) in the basis Sigma.
inline CMatrix ricci_l_first_form(const CurvatureTensor& R, const CMatrix& Sigma) {
  const CurvatureTensor Rs = curvature_in_frame(R, Sigma);
  const int l = Rs.dim();
  CMatrix out = CMatrix::Zero(l, l);
  Rs.for_each_index([&](int a, int b, int c, int d) {
    if (c == d) out(a, b) += Rs(a, b, c, d);
  });
  return out;
}

inline CMatrix ricci_l_second_form(const CurvatureTensor& R, const CMatrix& Sigma) {
  const CurvatureTensor Rs = curvature_in_frame(R, Sigma);
  const int l = Rs.dim();
  CMatrix out = CMatrix::Zero(l, l);
  Rs.for_each_index([&](int a, int b, int c, int d) {
    if (a == b) out(c, d) += Rs(a, b, c, d);
  });
  return out;
}

/// Unitary frame (w.r.t. g) and nonnegative weights for the real bisectional curvature.
struct FrameSample {
  CMatrix frame;   // m x m, columns e_1..e_m
  RVector weights; // a_1..a_m >= 0, not all zero
};

/// B~(e, a) = (1 / |a|^2) sum_{i, j} R_{i i-bar j j-bar} a_i a_j in the frame e.
inline double real_bisectional(const CurvatureTensor& R, const CMatrix& G, const FrameSample& sample) {
  require_orthonormal(G, sample.frame);
  if (sample.frame.cols() != G.rows()) fail(ErrorKind::InvalidArgument, "real bisectional curvature needs a full frame");
  const RVector& a = sample.weights;
  if (a.size() != G.rows() || a.minCoeff() < 0.0 || !(a.squaredNorm() > 0.0))
    fail(ErrorKind::InvalidArgument, "weights must be nonnegative and not all zero");
  const CurvatureTensor Re = curvature_in_frame(R, sample.frame);
  double s = 0.0;
  for (int i = 0; i < Re.dim(); ++i)
    for (int j = 0; j < Re.dim(); ++j) s += Re(i, i, j, j).real() * a[i] * a[j];
  return s / a.squaredNorm();
}

// ---------------------------------------------------------------------------
// Field-level wrappers
// ---------------------------------------------------------------------------

inline double holomorphic_sectional(const MetricField& g, const ChartPoint& p, const CVector& X, const FdConfig& cfg) {
  auto jet = metric_jet(g, p, cfg);
  return holomorphic_sectional(curvature_from_jet(jet), jet.g, X);
}

inline double bisectional(const MetricField& g, const ChartPoint& p, const CVector& X, const CVector& Y,
                          const FdConfig& cfg) {
  auto jet = metric_jet(g, p, cfg);
  return bisectional(curvature_from_jet(jet), jet.g, X, Y);
}

inline double ricci_l_first(const MetricField& g, const ChartPoint& p, const CMatrix& Sigma, const CVector& v,
                            const FdConfig& cfg) {
  auto jet = metric_jet(g, p, cfg);
  return ricci_l_first(curvature_from_jet(jet), jet.g, Sigma, v);
}

inline double ricci_l_second(const MetricField& g, const ChartPoint& p, const CMatrix& Sigma, const CVector& v,
                             const FdConfig& cfg) {
  auto jet = metric_jet(g, p, cfg);
  return ricci_l_second(curvature_from_jet(jet), jet.g, Sigma, v);
}

inline double scalar_l(const MetricField& g, const ChartPoint& p, const CMatrix& Sigma, const FdConfig& cfg) {
  auto jet = metric_jet(g, p, cfg);
  return scalar_l(curvature_from_jet(jet), jet.g, Sigma);
}

inline double real_bisectional(const MetricField& g, const ChartPoint& p, const FrameSample& sample, const FdConfig& cfg) {
  auto jet = metric_jet(g, p, cfg);
  return real_bisectional(curvature_from_jet(jet), jet.g, sample);
}

}  // namespace chernlab
