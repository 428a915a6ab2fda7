// Integral of the pulled-back Fubini-Study Ricci form under Weierstrass P on
// the square torus: converges to deg(P) * 2 pi = 4 pi.

#include <cmath>
#include <cstdio>

#include "chernlab/global.hpp"

using namespace chernlab;

int main() {
  const auto& reg = Registry::instance();
  MapScene scene{reg.metric("flat_torus"), reg.metric("fubini_study_m", {{"m", 1}}), {}};
  scene.f = reg.map("weierstrass_p", json::object(), MapContext{1, 1, "fubini_study_m"});

  const double target = 4.0 * std::acos(-1.0);
  std::printf("%5s  %16s  %12s  %12s\n", "n", "rhs", "rhs - 4pi", "error est.");
  for (int n : {8, 16, 32, 64}) {
    const auto r = integral_inequality_check(scene, GridSpec::torus(1.0, I_unit, n, n), zero_field(), FdConfig::precise());
    std::printf("%5d  %16.12f  %12.3e  %12.3e\n", n, r.rhs, r.rhs - target, r.quadrature_error_estimate);
  }
}
