#pragma once

// Weierstrass elliptic function for a lattice Z w1 + Z w2.
//
// Evaluated with the rapidly convergent cosecant series
//   P(z; 1, t) = sum_n pi^2 csc^2(pi (z + n t)) - (pi^2 / 3) E2(t),
// after reducing the basis and z into a fundamental cell.

#include <array>
#include <cmath>
#include <complex>

#include "chernlab/errors.hpp"
#include "chernlab/types.hpp"

namespace chernlab {

class WeierstrassP {
 public:
  struct Jet {
    cplx value;
    cplx d1;
    cplx d2;
  };

  WeierstrassP(cplx w1, cplx w2) : w1_(w1), w2_(w2) {
    if (!std::isfinite(std::abs(w1)) || !std::isfinite(std::abs(w2)) || std::abs(w1) == 0.0 || std::abs(w2) == 0.0)
      fail(ErrorKind::InvalidArgument, "lattice periods must be finite and nonzero");
    if (std::abs((w2 / w1).imag()) < 1e-12) fail(ErrorKind::InvalidArgument, "lattice periods are linearly dependent");
    reduce_basis();
    tau_ = b2_ / b1_;
    const double pi = std::acos(-1.0);
    const cplx q = std::exp(2.0 * pi * I_unit * tau_);
    // E2 = 1 - 24 sum sigma_1(k) q^k
    cplx s{};
    cplx qk = 1.0;
    for (int k = 1; k <= 200; ++k) {
      qk *= q;
      if (std::abs(qk) < 1e-18) break;
      double sigma = 0.0;
      for (int d = 1; d <= k; ++d)
        if (k % d == 0) sigma += d;
      s += sigma * qk;
    }
    e2_ = 1.0 - 24.0 * s;
    const double decay = 2.0 * pi * tau_.imag();
    terms_ = static_cast<int>(std::ceil(45.0 / decay + 1.0));
  }

  cplx period1() const { return w1_; }
  cplx period2() const { return w2_; }

  /// P, P' and P'' at z. Throws NonFinite at lattice points.
  Jet jet(cplx z) const {
    const cplx u = reduce(z / b1_);
    if (std::abs(u) < 1e-12) fail(ErrorKind::NonFinite, "Weierstrass P evaluated at a lattice point");
    const double pi = std::acos(-1.0);
    const double pi2 = pi * pi;
    cplx p{}, p1{}, p2{};
    for (int n = -terms_; n <= terms_; ++n) {
      const cplx x = pi * (u + static_cast<double>(n) * tau_);
      const cplx s = std::sin(x), c = std::cos(x);
      const cplx inv_s = 1.0 / s;
      const cplx inv_s2 = inv_s * inv_s;
      p += pi2 * inv_s2;
      p1 += -2.0 * pi2 * pi * c * inv_s2 * inv_s;
      p2 += 2.0 * pi2 * pi2 * (inv_s2 + 3.0 * c * c * inv_s2 * inv_s2);
    }
    p -= pi2 / 3.0 * e2_;
    const cplx s1 = 1.0 / b1_;
    Jet out{p * s1 * s1, p1 * s1 * s1 * s1, p2 * s1 * s1 * s1 * s1};
    if (!std::isfinite(std::abs(out.value)) || !std::isfinite(std::abs(out.d1)) || !std::isfinite(std::abs(out.d2)))
      fail(ErrorKind::NonFinite, "Weierstrass P overflowed near a lattice point");
    return out;
  }

  cplx operator()(cplx z) const { return jet(z).value; }

  /// Invariants g2, g3 from the Laurent expansion; P'^2 = 4P^3 - g2 P - g3.
  std::array<cplx, 2> invariants(cplx z) const {
    const Jet j = jet(z);
    // Two equations in (g2, g3) at z and at a shifted point.
    const Jet k = jet(z + 0.1234 * w1_ + 0.0567 * w2_);
    const cplx r1 = 4.0 * j.value * j.value * j.value - j.d1 * j.d1;
    const cplx r2 = 4.0 * k.value * k.value * k.value - k.d1 * k.d1;
    const cplx g2 = (r1 - r2) / (j.value - k.value);
    const cplx g3 = r1 - g2 * j.value;
    return {g2, g3};
  }

 private:
  void reduce_basis() {
    b1_ = w1_;
    b2_ = w2_;
    for (int it = 0; it < 100; ++it) {
      if (std::abs(b2_) < std::abs(b1_)) std::swap(b1_, b2_);
      const double k = std::round((b2_ / b1_).real());
      if (k == 0.0) break;
      b2_ -= k * b1_;
    }
    if ((b2_ / b1_).imag() < 0.0) b2_ = -b2_;
  }

  // u modulo Z + Z tau, centered on the origin.
  cplx reduce(cplx u) const {
    const double b = u.imag() / tau_.imag();
    const double nb = std::round(b);
    u -= nb * tau_;
    u -= std::round(u.real());
    return u;
  }

  cplx w1_, w2_;
  cplx b1_, b2_;
  cplx tau_;
  cplx e2_;
  int terms_ = 8;
};

}  // namespace chernlab
