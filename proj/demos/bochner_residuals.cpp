// Both Bochner identities at one point per scene, all admissible l.

#include <cstdio>

#include "chernlab/bochner.hpp"
#include "chernlab/registry.hpp"

using namespace chernlab;

int main() {
  const auto& reg = Registry::instance();
  struct Case {
    const char* domain;
    json dp;
    const char* target;
    json tp;
    const char* map;
    json mp;
    ChartPoint p;
  };
  const std::vector<Case> cases{
      {"poincare_disk", {}, "poincare_disk", {}, "power", {{"k", 2}}, ChartPoint{0.5}},
      {"fubini_study_m", {{"m", 1}}, "poincare_disk", {}, "blaschke", {{"a", json::array({0.2, json::array({0.0, -0.4})})}},
       ChartPoint{cplx(0.3, 0.2)}},
      {"poincare_polydisk_m", {{"m", 2}}, "poincare_ball_m", {{"m", 2}}, "linear",
       {{"matrix", json::array({json::array({0.3, 0.1}), json::array({0.0, 0.4})})}}, ChartPoint{cplx(0.2, 0.1), cplx(-0.3, 0.2)}},
      {"hopf_m", {{"m", 2}}, "fubini_study_m", {{"m", 3}}, "quadratic",
       {{"linear", json::array({json::array({1.0, 0.0}), json::array({0.0, 1.0}), json::array({0.5, 0.5})})},
        {"quadratic", json::array({json::array({json::array({0.0, 0.3}), json::array({0.0, 0.0})})})}},
       ChartPoint{cplx(0.9, 0.1), cplx(0.2, -0.3)}},
  };
  const FdConfig cfg = FdConfig::precise();
  std::printf("%-22s %-18s %-14s %2s  %11s  %11s  %11s\n", "domain", "target", "map", "l", "res (1)", "res (2)", "gram min");
  for (const auto& c : cases) {
    const MetricField g = reg.metric(c.domain, c.dp), h = reg.metric(c.target, c.tp);
    const ChartedMap f = reg.map(c.map, c.mp, MapContext{g.dim, h.dim, c.target});
    const NormalizedScene scene = normalize_scene(g, h, f.at(c.p), c.p, cfg);
    for (int l = 1; l <= g.dim; ++l) {
      const auto r1 = verify_eq1(scene, l, cfg);
      const auto r2 = verify_eq2(scene, l, cfg);
      std::printf("%-22s %-18s %-14s %2d  %11.3e  %11.3e  %11.3e\n", c.domain, c.target, c.map, l, r1.residual, r2.residual,
                  min_eigenvalue(eq2_gram_residue(r2)));
    }
  }
}
