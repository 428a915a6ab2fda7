// W_1 = f*h / g along a ray for f(z) = z^2 on the Poincare disk, against the
// probed bound K / kappa.

#include <cstdio>

#include "chernlab/global.hpp"

using namespace chernlab;

int main() {
  const auto& reg = Registry::instance();
  MapScene scene{reg.metric("poincare_disk"), reg.metric("poincare_disk"), {}};
  scene.f = reg.map("power", {{"k", 2}}, MapContext{1, 1, "poincare_disk"});

  const FdConfig cfg = FdConfig::precise();
  const auto report = check_estimate_a(scene, GridSpec::disk_polar(1, 0.95, 19, 4), cfg);
  std::printf("K = %.6f  kappa = %.6f  bound = %.6f\n", report.probe.K, report.probe.kappa, report.bound);
  std::printf("%6s  %12s  %12s\n", "|z|", "W_1", "4t/(1+t)^2");
  for (int k = 0; k <= 19; ++k) {
    const double r = 0.05 * k;
    const ChartPoint p{cplx(r, 0.0)};
    const double w = map_scalars(scene.g, scene.h, scene.f.at(p), p, cfg).W[0];
    const double t = r * r;
    std::printf("%6.2f  %12.9f  %12.9f\n", r, w, 4.0 * t / ((1.0 + t) * (1.0 + t)));
  }
  std::printf("max over grid %.9f, %s\n", report.observed_max, report.pass ? "within bound" : "bound violated");
}
