#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <initializer_list>
#include <string>

#include "chernlab/errors.hpp"

namespace chernlab {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr cplx I_unit{0.0, 1.0};

/// Point z = (z^1, ..., z^m) of a complex coordinate chart.
class ChartPoint {
 public:
  ChartPoint() = default;

  explicit ChartPoint(CVector coords) : coords_(std::move(coords)) {
    if (coords_.size() < 1) fail(ErrorKind::InvalidArgument, "chart point needs at least one coordinate");
    for (Eigen::Index i = 0; i < coords_.size(); ++i) {
      if (!std::isfinite(coords_[i].real()) || !std::isfinite(coords_[i].imag()))
        fail(ErrorKind::NonFinite, "chart point has a non-finite coordinate");
    }
  }

  ChartPoint(std::initializer_list<cplx> coords) : ChartPoint(to_vector(coords)) {}

  static ChartPoint origin(int m) { return ChartPoint(CVector::Zero(m)); }

  int dim() const { return static_cast<int>(coords_.size()); }
  const CVector& coords() const { return coords_; }
  cplx operator[](int i) const { return coords_[i]; }

  double max_abs() const { return coords_.size() ? coords_.cwiseAbs().maxCoeff() : 0.0; }

 private:
  static CVector to_vector(std::initializer_list<cplx> coords) {
    CVector v(static_cast<Eigen::Index>(coords.size()));
    Eigen::Index i = 0;
    for (const cplx& c : coords) v[i++] = c;
    return v;
  }

  CVector coords_;
};

using DomainPredicate = std::function<bool(const ChartPoint&)>;

inline DomainPredicate whole_chart() {
  return [](const ChartPoint&) { return true; };
}

/// Finite-difference settings shared by every jet computation.
struct FdConfig {
  double step = 1e-4;              // relative to max(1, |z^k|)
  bool richardson = false;         // one extrapolation level (step, step/2)
  double min_domain_margin = 4e-4; // stencil clearance, same scaling as step

  void validate() const {
    if (!(step > 0.0 && step < 1.0)) fail(ErrorKind::InvalidArgument, "fd step must lie in (0, 1)");
    if (!(min_domain_margin >= 4.0 * step))
      fail(ErrorKind::InvalidArgument, "min_domain_margin must be at least 4*step");
  }

  /// Settings used for verification runs: a coarser step balanced by Richardson.
  static FdConfig precise() { return FdConfig{2e-3, true, 8e-3}; }
};

}  // namespace chernlab
