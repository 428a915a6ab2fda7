#include <gtest/gtest.h>

#include "chernlab/bochner.hpp"
#include "chernlab/registry.hpp"

using namespace chernlab;

namespace {

const FdConfig kPrecise = FdConfig::precise();

struct Scene {
  std::string name;
  MetricField g, h;
  HolomorphicMapField f;
  ChartPoint p;
  std::vector<int> ells;
  double tol;
};

// Non-Kaehler test metric with off-diagonal first jets.
MetricField twisted(double c) {
  MetricField g;
  g.dim = 2;
  g.label = "twisted";
  g.components = [c](const ChartPoint& z) -> CMatrix {
    CMatrix G(2, 2);
    G << 1.0 + std::norm(z[1]), c * z[0], c * std::conj(z[0]), 1.0 + std::norm(z[0]);
    return G;
  };
  return g;
}

CMatrix mat(std::initializer_list<std::initializer_list<cplx>> rows) {
  CMatrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (cplx v : r) M(i, j++) = v;
    ++i;
  }
  return M;
}

std::vector<Scene> scenes() {
  std::vector<Scene> out;
  out.push_back({"flat linear", metrics::flat(2), metrics::flat(3),
                 maps::polynomial(mat({{2.0, cplx(0, 1)}, {0.5, 1.0}, {cplx(0.3, 0.2), -1.0}}), {}, CVector::Zero(3), "lin"),
                 ChartPoint{cplx(0.2, 0.1), cplx(-0.3, 0.4)}, {1, 2}, 1e-12});
  out.push_back({"poincare square", metrics::poincare_disk(), metrics::poincare_disk(), maps::power(2, 1.0, 1), ChartPoint{0.5}, {1}, 1e-5});
  out.push_back({"fubini-study into disk", metrics::fubini_study(1), metrics::poincare_disk(), maps::power(2, 0.4, 1),
                 ChartPoint{cplx(0.7, 0.3)}, {1}, 1e-5});
  out.push_back({"polydisk product", metrics::poincare_polydisk(2), metrics::poincare_polydisk(2),
                 maps::polynomial(mat({{0.0, 0.0}, {0.0, 1.0}}), {mat({{1.0, 0.0}, {0.0, 0.0}})}, CVector::Zero(2), "prod"),
                 ChartPoint{cplx(0.3, 0.2), cplx(-0.4, 0.1)}, {1, 2}, 1e-5});
  out.push_back({"fubini-study plane into ball", metrics::fubini_study(2), metrics::poincare_ball(3),
                 maps::polynomial(mat({{0.3, 0.1}, {cplx(0, 0.2), 0.25}, {0.1, -0.1}}),
                                  {mat({{0.1, 0.05}, {0.0, 0.0}}), mat({{0.0, 0.0}, {cplx(0.1, 0.1), 0.0}}), mat({{0.0, 0.0}, {0.0, 0.15}})},
                                  CVector::Zero(3), "quad"),
                 ChartPoint{cplx(0.4, -0.2), cplx(0.1, 0.5)}, {1, 2}, 1e-5});
  out.push_back({"hopf into ball", metrics::hopf(2, 0.05), metrics::poincare_ball(3),
                 maps::polynomial(mat({{0.3, 0.1}, {0.0, 0.25}, {0.1, 0.0}}),
                                  {mat({{0.1, 0.05}, {0.0, 0.0}}), mat({{0.0, 0.0}, {0.1, 0.0}})}, CVector::Zero(3), "quad"),
                 ChartPoint{cplx(0.8, 0.1), cplx(0.3, -0.2)}, {1, 2}, 1e-5});
  out.push_back({"twisted into twisted", twisted(0.6), twisted(-0.4),
                 maps::polynomial(mat({{0.7, 0.2}, {cplx(0, 0.3), 0.5}}), {mat({{0.2, 0.0}, {0.1, 0.0}})}, CVector::Zero(2), "quad"),
                 ChartPoint{cplx(0.3, 0.2), cplx(-0.2, 0.25)}, {1, 2}, 1e-5});
  return out;
}

}  // namespace

TEST(Scene, NormalizationInvariants) {
  for (const auto& s : scenes()) {
    const auto scene = normalize_scene(s.g, s.h, s.f, s.p, kPrecise);
    const int m = scene.m(), n = scene.n();
    EXPECT_LT((scene.g(scene.base) - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff(), 1e-9) << s.name;
    EXPECT_LT((scene.h(ChartPoint::origin(n)) - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-9) << s.name;
    const MapJets j = holomorphic_jets(scene.f, scene.base, kPrecise);
    CMatrix D = CMatrix::Zero(n, m);
    for (int a = 0; a < m; ++a) D(a, a) = scene.lambda(a);
    EXPECT_LT((j.jacobian - D).cwiseAbs().maxCoeff(), 1e-9) << s.name;
    EXPECT_LT(j.value.cwiseAbs().maxCoeff(), 1e-12) << s.name;
  }
}

TEST(LogDetIdentity, CrossOracleOnScenes) {
  for (const auto& s : scenes()) {
    const auto scene = normalize_scene(s.g, s.h, s.f, s.p, kPrecise);
    for (int ell : s.ells) {
      const auto r = verify_eq1(scene, ell, kPrecise);
      EXPECT_LE(r.residual, s.tol) << s.name << " l=" << ell << "\nlhs\n" << r.lhs << "\nrhs\n" << r.rhs;
      EXPECT_LT(hermitian_residual(r.lhs), 1e-8) << s.name;
      EXPECT_LT(hermitian_residual(r.rhs), 1e-8) << s.name;
    }
  }
}

TEST(TraceIdentity, CrossOracleOnScenes) {
  for (const auto& s : scenes()) {
    const auto scene = normalize_scene(s.g, s.h, s.f, s.p, kPrecise);
    for (int ell : s.ells) {
      const auto r = verify_eq2(scene, ell, kPrecise);
      EXPECT_LE(r.residual, s.tol) << s.name << " l=" << ell << "\nlhs\n" << r.lhs << "\nrhs\n" << r.rhs;
      EXPECT_GE(min_eigenvalue(eq2_gram_residue(r)), -1e-7) << s.name;
    }
  }
}

TEST(LogDetIdentity, PoincareSquareValue) {
  // In normalized coordinates at 0.5: d dbar log W_1 = -0.72.
  const auto r = verify_eq1(metrics::poincare_disk(), metrics::poincare_disk(), maps::power(2, 1.0, 1), ChartPoint{0.5}, 1, kPrecise);
  EXPECT_NEAR(r.lhs(0, 0).real(), -0.72, 1e-7);
  EXPECT_NEAR(r.rhs(0, 0).real(), -0.72, 1e-9);
}

TEST(LogDetIdentity, FlatLinearIsZero) {
  const auto s = scenes().front();
  const auto r = verify_eq1(s.g, s.h, s.f, s.p, 2, FdConfig{});
  EXPECT_LE(r.lhs.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(r.rhs.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TraceIdentity, FlatSquareMap) {
  // |2z|^2 has d dbar = 4 in the original chart; normalized coordinates keep |f''| = 2.
  const auto scene = normalize_scene(metrics::flat(1), metrics::flat(1), maps::power(2, 1.0, 1), ChartPoint{cplx(0.3, 0.4)}, kPrecise);
  const auto r = verify_eq2(scene, 1, kPrecise);
  EXPECT_NEAR(r.lhs(0, 0).real(), 4.0, 1e-7);
  EXPECT_NEAR(r.breakdown.gram(0, 0).real(), 4.0, 1e-12);
  EXPECT_NEAR(r.breakdown.curvature_M(0, 0).real() + r.breakdown.curvature_N(0, 0).real(), 0.0, 1e-12);
  const auto nv = nabla_V(scene, 1);
  EXPECT_NEAR(std::abs(nv.entries[0](0, 0)), 2.0, 1e-12);
}

TEST(TraceIdentity, LinearMapWithFlatJetsHasZeroNablaV) {
  const auto s = scenes().front();
  const auto scene = normalize_scene(s.g, s.h, s.f, s.p, kPrecise);
  for (const auto& e : nabla_V(scene, 2).entries) EXPECT_LE(e.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Connection, FlatPoincareAndHopf) {
  const auto flat = connection_coeffs(metrics::flat(2), metrics::flat(2), maps::power(1, 1.0, 2), ChartPoint{0.1, 0.2}, FdConfig{});
  for (const auto& G : flat.gammaM) EXPECT_LE(G.cwiseAbs().maxCoeff(), 1e-12);
  const auto disk = connection_coeffs(metrics::poincare_disk(), metrics::poincare_disk(), maps::power(1, 1.0, 1), ChartPoint{0.0}, kPrecise);
  EXPECT_LE(std::abs(disk.gammaM[0](0, 0)), 1e-10);
  // Hopf at (1, 0): Gamma^d_{1 a} = -delta_{a d}, Gamma^d_{2 a} = 0.
  const auto hopf = connection_coeffs(metrics::hopf(2, 0.05), metrics::hopf(2, 0.05), maps::power(1, 1.0, 2), ChartPoint{1.0, 0.0}, kPrecise);
  EXPECT_LT((hopf.gammaM[0] + CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(hopf.gammaM[1].cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Connection, ContractionReproducesMetricDerivative) {
  const auto g = twisted(0.6);
  const ChartPoint p{cplx(0.3, 0.2), cplx(-0.2, 0.25)};
  const auto cc = connection_coeffs(g, g, maps::power(1, 1.0, 2), p, kPrecise);
  const auto jet = metric_jet(g, p, kPrecise);
  for (int c = 0; c < 2; ++c) EXPECT_LT((cc.gammaM[c] * jet.g - jet.d[c]).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Psi, Examples) {
  auto scene = normalize_scene(metrics::flat(2), metrics::flat(2), maps::power(1, 1.0, 2), ChartPoint::origin(2), kPrecise);
  EXPECT_NEAR(psi_trace(scene, CMatrix::Zero(2, 2)), 0.0, 0.0);
  CMatrix hess(2, 2);
  hess << 3.0, 1.0, 1.0, cplx(2.0, 5.0);
  EXPECT_NEAR(psi_trace(scene, hess), 5.0, 1e-14);
  scene.frame.lambdas = (RVector(2) << 2.0, 1.0).finished();
  EXPECT_NEAR(psi_trace(scene, (CMatrix(2, 2) << 4.0, 0.0, 0.0, 1.0).finished()), 2.0, 1e-14);
}

TEST(Errors, RankDeficientAndOutOfRange) {
  CMatrix D = CMatrix::Zero(2, 2);
  D(0, 0) = 1.0;
  const auto f = maps::polynomial(D, {}, CVector::Zero(2), "rank one");
  const auto scene = normalize_scene(metrics::flat(2), metrics::flat(2), f, ChartPoint::origin(2), kPrecise);
  try {
    verify_eq1(scene, 2, kPrecise);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RankDeficient);
  }
  EXPECT_THROW(verify_eq1(scene, 3, kPrecise), Error);
  EXPECT_THROW(psi_trace(scene, CMatrix::Zero(2, 2)), Error);
}

TEST(LogDetIdentity, DiskAutomorphismIsNull) {
  // W_1 is identically 1 for an isometry, so both sides vanish.
  for (cplx z : {cplx(0.0), cplx(0.4, -0.3), cplx(-0.7, 0.2)}) {
    const auto r = verify_eq1(metrics::poincare_disk(), metrics::poincare_disk(), maps::mobius(cplx(0.3, 0.2), 0.8), ChartPoint{z}, 1,
                              kPrecise);
    EXPECT_LT(r.lhs.cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_LT(r.rhs.cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(LogDetIdentity, ExponentialBetweenFlatLines) {
  const auto exp_map = maps::from_scalar(
      [](cplx z) {
        const cplx e = std::exp(z);
        return maps::Jet3{e, e, e};
      },
      whole_chart(), "exp");
  const ChartPoint p{cplx(0.3, 1.1)};
  const auto r1 = verify_eq1(metrics::flat(1), metrics::flat(1), exp_map, p, 1, kPrecise);
  EXPECT_LT(r1.lhs.cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_LT(r1.rhs.cwiseAbs().maxCoeff(), 1e-12);
  // |e^z|^2 is subharmonic with d dbar = |e^z|^2; in normalized coordinates this is |f''|^2.
  const auto r2 = verify_eq2(metrics::flat(1), metrics::flat(1), exp_map, p, 1, kPrecise);
  EXPECT_NEAR(r2.lhs(0, 0).real(), std::norm(std::exp(cplx(0.3, 1.1))), 1e-6);
  EXPECT_LE(r2.residual, 1e-6);
}
