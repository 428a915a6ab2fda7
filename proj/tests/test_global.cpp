#include <gtest/gtest.h>

#include <cmath>

#include "chernlab/global.hpp"

using namespace chernlab;

namespace {

const double kPi = std::acos(-1.0);

MapScene scene(const std::string& g, const json& gp, const std::string& h, const json& hp, const std::string& f,
               const json& fp) {
  const auto& reg = Registry::instance();
  MapScene s{reg.metric(g, gp), reg.metric(h, hp), {}};
  s.f = reg.map(f, fp, MapContext{s.g.dim, s.h.dim, h});
  return s;
}

MapScene disk_scene(const std::string& f, const json& fp) {
  return scene("poincare_disk", json::object(), "poincare_disk", json::object(), f, fp);
}

GridSpec disk_grid() { return GridSpec::disk_polar(1, 0.9, 9, 8); }

double square_w1(double t) { return 4.0 * t / ((1.0 + t) * (1.0 + t)); }

}  // namespace

TEST(Grid, Counts) {
  EXPECT_EQ(GridSpec::rectangular(1, {{-1, 1}, {0, 1}}, {4, 5}).points().size(), 20u);
  EXPECT_EQ(GridSpec::torus(1.0, I_unit, 6, 4).points().size(), 24u);
  EXPECT_EQ(GridSpec::disk_polar(1, 0.5, 4, 6).points().size(), 25u);
  EXPECT_EQ(GridSpec::disk_polar(2, 0.5, 4, 4).points().size(), 17u * 17u);
}

TEST(Grid, TorusWeightsSumToArea) {
  const auto g = GridSpec::torus(cplx(2.0, 0.0), cplx(0.5, 1.5), 8, 6);
  EXPECT_NEAR(g.cell_weight() * g.points().size(), 3.0, 1e-14);
}

TEST(Grid, DiskIncludesCenterAndRim) {
  const auto pts = GridSpec::disk_polar(1, 0.9, 9, 8).points();
  double rmin = 1.0, rmax = 0.0;
  for (const auto& p : pts) {
    rmin = std::min(rmin, std::abs(p[0]));
    rmax = std::max(rmax, std::abs(p[0]));
  }
  EXPECT_EQ(rmin, 0.0);
  EXPECT_NEAR(rmax, 0.9, 1e-15);
}

TEST(Grid, RejectsBadSpecs) {
  EXPECT_THROW(GridSpec::torus(1.0, I_unit, 3, 8), Error);
  EXPECT_THROW(GridSpec::torus(1.0, 2.0, 8, 8), Error);
  EXPECT_THROW(GridSpec::rectangular(1, {{0, 1}}, {4, 4}), Error);
  EXPECT_THROW(GridSpec::rectangular(1, {{1, 0}, {0, 1}}, {4, 4}), Error);
  EXPECT_THROW(GridSpec::disk_polar(1, -1.0, 4, 4), Error);
  try {
    GridSpec::disk_polar(1, 0.5, 2, 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(Kahler, FlatAndFubiniStudyPass) {
  const auto pts = GridSpec::disk_polar(2, 0.6, 4, 4).points();
  const auto flat = kahler_check(metrics::flat(2), pts, FdConfig::precise());
  EXPECT_TRUE(flat.passed);
  EXPECT_EQ(flat.residual, 0.0);
  const auto fs = kahler_check(metrics::fubini_study(2), pts, FdConfig::precise());
  EXPECT_TRUE(fs.passed);
  EXPECT_LT(fs.residual, 1e-8);
}

TEST(Kahler, HopfFails) {
  const auto pts = GridSpec::rectangular(2, {{0.8, 1.2}, {0.0, 0.2}, {-0.2, 0.2}, {0.0, 0.2}}, {4, 4, 4, 4}).points();
  const auto r = kahler_check(metrics::hopf(2, 0.05), pts, FdConfig::precise());
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.residual, 0.1);
  EXPECT_GE(r.worst_point, 0);
}

TEST(Kahler, FlatTorusPassesAtEveryResolution) {
  const MetricField g = Registry::instance().metric("flat_torus");
  for (int n : {4, 8, 16}) {
    const auto pts = GridSpec::torus(1.0, I_unit, n, n).points();
    EXPECT_TRUE(kahler_check(g, pts, FdConfig{}).passed);
    EXPECT_TRUE(gauduchon_check(g, pts, FdConfig{}).passed);
  }
}

TEST(Gauduchon, CurvesAlwaysPass) {
  const auto pts = disk_grid().points();
  const auto r = gauduchon_check(metrics::poincare_disk(), pts, FdConfig::precise());
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.residual, 0.0);
}

TEST(Gauduchon, ConformalFlatFails) {
  const ChartPoint origin = ChartPoint::origin(2);
  // cofactor = e^u I, so the coefficient is (1/4) Laplacian of e^{x^2} = 1/2 at x = 0
  EXPECT_NEAR(std::abs(gauduchon_coefficient(metrics::conformal_flat(2), origin, FdConfig::precise())), 0.5, 1e-7);
  const auto r = gauduchon_check(metrics::conformal_flat(2), GridSpec::disk_polar(2, 0.4, 4, 4).points(), FdConfig::precise());
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.residual, 0.4);
}

TEST(Gauduchon, FlatAndKahlerPass) {
  const auto pts = GridSpec::disk_polar(2, 0.4, 4, 4).points();
  EXPECT_TRUE(gauduchon_check(metrics::flat(2), pts, FdConfig::precise()).passed);
  EXPECT_TRUE(gauduchon_check(metrics::fubini_study(2), pts, FdConfig::precise()).passed);
  EXPECT_TRUE(gauduchon_check(metrics::poincare_ball(2), pts, FdConfig::precise()).passed);
}

TEST(EstimateA, PoincareSquare) {
  const auto r = check_estimate_a(disk_scene("power", {{"k", 2}}), disk_grid(), FdConfig::precise());
  EXPECT_NEAR(r.probe.K, 2.0, 1e-6);
  EXPECT_NEAR(r.probe.kappa, 2.0, 1e-6);
  EXPECT_NEAR(r.bound, 1.0, 1e-5);
  EXPECT_NEAR(r.observed_max, square_w1(0.81), 1e-9);
  EXPECT_NEAR(r.observed_max, 0.988981, 1e-6);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.margin, 0.0);
  EXPECT_EQ(r.points_checked, 73);
  EXPECT_GE(r.probe.K_witness.point_index, 0);
  EXPECT_GE(r.probe.kappa_witness.point_index, 0);
}

TEST(EstimateA, PassImpliesEveryPoint) {
  const auto r = check_estimate_a(disk_scene("blaschke", {{"a", json::array({0.3, json::array({0.1, 0.4})})}}), disk_grid(),
                                  FdConfig::precise());
  ASSERT_TRUE(r.pass);
  for (double v : r.observed) EXPECT_LE(v, r.bound * (1.0 + kEstimateSlack));
}

TEST(EstimateA, MobiusIsEqualityCase) {
  const auto r = check_estimate_a(disk_scene("mobius", {{"a", json::array({0.3, -0.2})}, {"theta", 0.7}}), disk_grid(),
                                  FdConfig::precise());
  EXPECT_NEAR(r.observed_max, 1.0, 1e-9);
  for (double v : r.observed) EXPECT_NEAR(v, 1.0, 1e-9);
  EXPECT_NEAR(r.margin, 0.0, 1e-5);
}

TEST(EstimateA, SchwarzPickForRegistrySelfMaps) {
  const std::vector<std::pair<std::string, json>> maps{
      {"identity", json::object()},
      {"power", {{"k", 3}, {"scale", 0.8}}},
      {"blaschke", {{"a", json::array({0.5, json::array({-0.2, 0.6})})}}},
      {"mobius", {{"a", json::array({0.0, 0.5})}, {"theta", 2.0}}},
  };
  for (const auto& [id, p] : maps) {
    const auto r = check_estimate_a(disk_scene(id, p), disk_grid(), FdConfig::precise());
    EXPECT_LE(r.observed_max, 1.0 + 1e-9) << id;
  }
}

TEST(EstimateA, FlatTargetIsHypothesisFailure) {
  const auto s = scene("flat_m", {{"m", 1}}, "flat_m", {{"m", 1}}, "linear", {{"matrix", json::array({json::array({2.0})})}});
  try {
    check_estimate_a(s, GridSpec::disk_polar(1, 1.0, 4, 4), FdConfig::precise());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HypothesisFail);
  }
}

TEST(EstimateB, PolydiskProduct) {
  const json L = json::array({json::array({0.0, 0.0}), json::array({0.0, 1.0})});
  const json Q = json::array({json::array({json::array({1.0, 0.0}), json::array({0.0, 0.0})})});
  const auto s = scene("poincare_polydisk_m", {{"m", 2}}, "poincare_polydisk_m", {{"m", 2}}, "quadratic",
                       {{"linear", L}, {"quadratic", Q}});
  const auto r = check_estimate_b(s, GridSpec::disk_polar(2, 0.8, 4, 4), 1, FdConfig::precise());
  // min over lines of S_1 is -2; the largest holomorphic sectional curvature of the product is -1
  EXPECT_NEAR(r.probe.K, 2.0, 1e-4);
  EXPECT_NEAR(r.probe.kappa, 1.0, 1e-4);
  EXPECT_NEAR(r.bound, 2.0, 1e-3);
  EXPECT_NEAR(r.observed_max, 1.0, 1e-9);
  EXPECT_TRUE(r.pass);
}

TEST(EstimateB, IdentityOnPolydisk) {
  const auto s = scene("poincare_polydisk_m", {{"m", 2}}, "poincare_polydisk_m", {{"m", 2}}, "identity", json::object());
  const auto r = check_estimate_b(s, GridSpec::disk_polar(2, 0.8, 4, 4), 1, FdConfig::precise());
  EXPECT_TRUE(r.pass);
  for (double v : r.observed) EXPECT_NEAR(v, 1.0, 1e-9);
}

TEST(EstimateB, HopfDomainNeedsKahler) {
  const auto s = scene("hopf_m", {{"m", 2}}, "poincare_ball_m", {{"m", 2}}, "linear",
                       {{"matrix", json::array({json::array({0.1, 0.0}), json::array({0.0, 0.1})})}});
  const auto grid = GridSpec::rectangular(2, {{0.8, 1.2}, {0.0, 0.2}, {-0.2, 0.2}, {0.0, 0.2}}, {4, 4, 4, 4});
  try {
    check_estimate_b(s, grid, 1, FdConfig::precise());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::KahlerRequired);
  }
}

TEST(EstimateB, RejectsFullRank) {
  const auto s = scene("poincare_polydisk_m", {{"m", 2}}, "poincare_polydisk_m", {{"m", 2}}, "identity", json::object());
  EXPECT_THROW(check_estimate_b(s, GridSpec::disk_polar(2, 0.5, 4, 4), 2, FdConfig::precise()), Error);
}

TEST(EstimateC, PoincareSquare) {
  const auto r = check_estimate_c(disk_scene("power", {{"k", 2}}), disk_grid(), 1, FdConfig::precise());
  EXPECT_NEAR(r.probe.K, 2.0, 1e-6);
  EXPECT_NEAR(r.probe.kappa, 2.0, 1e-6);
  EXPECT_NEAR(r.bound, 1.0, 1e-5);
  EXPECT_NEAR(r.observed_max, square_w1(0.81), 1e-9);
  EXPECT_TRUE(r.pass);
}

TEST(EstimateC, IdentityIsEqualityCase) {
  const auto r = check_estimate_c(disk_scene("identity", json::object()), disk_grid(), 1, FdConfig::precise());
  EXPECT_NEAR(r.observed_max, 1.0, 1e-9);
  EXPECT_NEAR(r.margin, 0.0, 1e-5);
}

TEST(EstimateC, FlatTargetIsHypothesisFailure) {
  const auto s = scene("poincare_disk", json::object(), "flat_m", {{"m", 1}}, "identity", json::object());
  try {
    check_estimate_c(s, disk_grid(), 1, FdConfig::precise());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HypothesisFail);
  }
}

TEST(Rigidity, FlatToFlatIsZero) {
  const auto s = scene("flat_m", {{"m", 1}}, "flat_m", {{"m", 1}}, "linear", {{"matrix", json::array({json::array({0.5})})}});
  const auto r = rigidity_witness(s, GridSpec::disk_polar(1, 1.0, 4, 4), "a", 1, FdConfig::precise());
  EXPECT_FALSE(r.degenerate);
  EXPECT_EQ(r.psi_lhs, 0.0);
  EXPECT_EQ(r.psi_rhs, 0.0);
  EXPECT_EQ(r.trace_rhs, 0.0);
}

TEST(Rigidity, ConstantMapHasNoWitness) {
  const auto s = scene("fubini_study_m", {{"m", 1}}, "flat_torus", json::object(), "linear",
                       {{"matrix", json::array({json::array({0.0})})}, {"shift", json::array({0.25})}});
  const auto r = rigidity_witness(s, GridSpec::disk_polar(1, 0.9, 4, 4), "a", 1, FdConfig::precise());
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.observed_max, 0.0);
}

TEST(Rigidity, PositiveCurvatureIntoNegative) {
  const auto s = scene("fubini_study_m", {{"m", 1}}, "poincare_disk", json::object(), "power", {{"k", 1}, {"scale", 0.4}});
  for (const std::string part : {"a", "c"}) {
    const auto r = rigidity_witness(s, disk_grid(), part, 1, FdConfig::precise());
    ASSERT_FALSE(r.degenerate);
    EXPECT_GT(r.psi_rhs, 0.0);
    EXPECT_GT(r.curvature_M_trace, 0.0);
    EXPECT_GT(r.curvature_N_trace, 0.0);
    EXPECT_NEAR(r.psi_lhs, r.psi_rhs, 1e-5);
    ASSERT_TRUE(r.K_probe && r.kappa_probe);
    EXPECT_LT(*r.K_probe, 0.0);    // the domain is positively curved
    EXPECT_GT(*r.kappa_probe, 0.0);
  }
}

TEST(Integral, FlatTorusAffineIsEquality) {
  const auto s = scene("flat_torus", json::object(), "flat_torus", json::object(), "affine_torus", {{"a", 2.0}});
  const auto r = integral_inequality_check(s, GridSpec::torus(1.0, I_unit, 8, 8), zero_field(), FdConfig{});
  EXPECT_LE(std::abs(r.lhs), 1e-9);
  EXPECT_LE(std::abs(r.rhs), 1e-9);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.nondegenerate);
  EXPECT_GE(r.quadrature_error_estimate, 0.0);
}

TEST(Integral, WeierstrassToSphere) {
  const auto s = scene("flat_torus", json::object(), "fubini_study_m", {{"m", 1}}, "weierstrass_p", json::object());
  const auto r = integral_inequality_check(s, GridSpec::torus(1.0, I_unit, 32, 32), zero_field(), FdConfig::precise());
  EXPECT_LE(std::abs(r.lhs), 1e-9);
  EXPECT_NEAR(r.rhs, 4.0 * kPi, 0.01 * 4.0 * kPi);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.rhs - r.lhs, r.quadrature_error_estimate);
  EXPECT_LE(std::abs(r.rhs - r.rhs_coarse), r.quadrature_error_estimate);
}

TEST(Integral, ConstantMapIntoSphere) {
  const auto s = scene("flat_torus", json::object(), "fubini_study_m", {{"m", 1}}, "linear",
                       {{"matrix", json::array({json::array({0.0})})}, {"shift", json::array({0.3})}});
  const auto r = integral_inequality_check(s, GridSpec::torus(1.0, I_unit, 8, 8), zero_field(), FdConfig{});
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_LE(std::abs(r.lhs), 1e-12);
  EXPECT_FALSE(r.nondegenerate);
  EXPECT_TRUE(r.pass);
}

TEST(Integral, NonPeriodicMapIsRejected) {
  const auto s = scene("flat_torus", json::object(), "flat_m", {{"m", 1}}, "power", {{"k", 2}});
  try {
    integral_inequality_check(s, GridSpec::torus(1.0, I_unit, 8, 8), zero_field(), FdConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPeriodic);
  }
}

TEST(Integral, NeedsTorusGrid) {
  const auto s = scene("flat_torus", json::object(), "flat_torus", json::object(), "affine_torus", {{"a", 2.0}});
  EXPECT_THROW(integral_inequality_check(s, GridSpec::disk_polar(1, 0.5, 4, 4), zero_field(), FdConfig{}), Error);
}
