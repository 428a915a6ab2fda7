#pragma once

// Empirical extrema of curvature functionals over frames and subspaces.
//
// The estimates are values attained at concrete frames, so the reported
// minimum is an upper bound for the true minimum and the reported maximum is a
// lower bound for the true maximum. Samples use a counter-derived seed per
// (point, sample) pair, so the result does not depend on evaluation order.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "chernlab/errors.hpp"
#include "chernlab/geometry.hpp"
#include "chernlab/parallel.hpp"

namespace chernlab {

enum class CurvatureKind { Holomorphic, RealBisectional, RicciFirst, RicciSecond, ScalarL };

inline const char* to_string(CurvatureKind kind) {
  switch (kind) {
    case CurvatureKind::Holomorphic: return "H";
    case CurvatureKind::RealBisectional: return "real_bisectional";
    case CurvatureKind::RicciFirst: return "ricci_l_first";
    case CurvatureKind::RicciSecond: return "ricci_l_second";
    case CurvatureKind::ScalarL: return "scalar_l";
  }
  return "unknown";
}

struct ProbeWitness {
  int point_index = -1;
  CMatrix frame;    // g-orthonormal columns (a single column for H)
  RVector weights;  // real bisectional weights (empty otherwise)
  CVector vector;   // unit vector realizing the value for the l-Ricci kinds
  double value = 0.0;
};

struct ProbeResult {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  ProbeWitness min_witness;
  ProbeWitness max_witness;
};

struct ProbeOptions {
  int n_samples = 32;
  std::uint64_t seed = 0;
  int refine_steps = 50;
  double initial_step = 0.25;
};

/// Curvature data at one probed point.
struct CurvatureSite {
  CurvatureTensor R;
  CMatrix G;
};

namespace detail {

struct Candidate {
  CMatrix raw;      // unnormalized frame parameters
  RVector weights;  // real bisectional only
};

class KindEvaluator {
 public:
  KindEvaluator(CurvatureKind kind, int ell) : kind_(kind), ell_(ell) {}

  int columns(int m) const {
    switch (kind_) {
      case CurvatureKind::Holomorphic: return 1;
      case CurvatureKind::RealBisectional: return m;
      default: return ell_;
    }
  }

  // Value of the functional for the objective (lower == true: minimize).
  double evaluate(const CurvatureSite& site, const Candidate& c, bool lower, ProbeWitness* witness) const {
    const CMatrix E = orthonormalize_frame(site.G, c.raw);
    double value = 0.0;
    CVector vec;
    switch (kind_) {
      case CurvatureKind::Holomorphic:
        value = holomorphic_sectional(site.R, site.G, E.col(0));
        vec = E.col(0);
        break;
      case CurvatureKind::RealBisectional:
        value = real_bisectional(site.R, site.G, FrameSample{E, c.weights});
        break;
      case CurvatureKind::RicciFirst:
      case CurvatureKind::RicciSecond: {
        const CMatrix form = kind_ == CurvatureKind::RicciFirst ? ricci_l_first_form(site.R, E)
                                                                 : ricci_l_second_form(site.R, E);
        const CMatrix herm = 0.5 * (form + form.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
        const Eigen::Index idx = lower ? 0 : herm.rows() - 1;
        value = es.eigenvalues()[idx];
        vec = E * es.eigenvectors().col(idx);
        break;
      }
      case CurvatureKind::ScalarL:
        value = scalar_l(site.R, site.G, E);
        break;
    }
    if (witness) {
      witness->frame = E;
      witness->weights = c.weights;
      witness->vector = vec;
      witness->value = value;
    }
    return value;
  }

  bool uses_weights() const { return kind_ == CurvatureKind::RealBisectional; }

 private:
  CurvatureKind kind_;
  int ell_;
};

inline Candidate random_candidate(int m, int cols, bool weights, std::uint64_t seed, int point, int sample) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(point), static_cast<std::uint32_t>(sample), 0x5eedu};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  Candidate c;
  c.raw.resize(m, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < m; ++i) c.raw(i, j) = cplx(normal(rng), normal(rng));
  if (weights) {
    c.weights.resize(m);
    for (int i = 0; i < m; ++i) c.weights[i] = std::abs(normal(rng));
    if (!(c.weights.squaredNorm() > 0.0)) c.weights.setOnes();
  }
  return c;
}

// Deterministic coordinate search with step halving; never accepts a worse value.
inline double refine(const KindEvaluator& eval, const CurvatureSite& site, Candidate& best, double best_value,
                     bool lower, int steps, double step) {
  auto better = [lower](double a, double b) { return lower ? a < b : a > b; };
  for (int it = 0; it < steps; ++it) {
    bool improved = false;
    for (Eigen::Index j = 0; j < best.raw.cols(); ++j)
      for (Eigen::Index i = 0; i < best.raw.rows(); ++i)
        for (cplx dir : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) {
          Candidate trial = best;
          trial.raw(i, j) += step * dir;
          double v;
          try {
            v = eval.evaluate(site, trial, lower, nullptr);
          } catch (const Error&) {
            continue;  // degenerate frame
          }
          if (better(v, best_value)) {
            best = std::move(trial);
            best_value = v;
            improved = true;
          }
        }
    if (eval.uses_weights()) {
      for (Eigen::Index i = 0; i < best.weights.size(); ++i)
        for (double dir : {1.0, -1.0}) {
          Candidate trial = best;
          trial.weights[i] = std::max(0.0, trial.weights[i] + step * dir);
          if (!(trial.weights.squaredNorm() > 0.0)) continue;
          const double v = eval.evaluate(site, trial, lower, nullptr);
          if (better(v, best_value)) {
            best = std::move(trial);
            best_value = v;
            improved = true;
          }
        }
    }
    if (!improved) step *= 0.5;
  }
  return best_value;
}

}  // namespace detail

/// Probe over precomputed curvature sites. Sites are processed in parallel;
/// the merge runs in site order.
inline ProbeResult curvature_sign_probe(const std::vector<CurvatureSite>& sites, CurvatureKind kind, int ell,
                                        const ProbeOptions& opt) {
  if (opt.n_samples < 1) fail(ErrorKind::InvalidArgument, "n_samples must be at least 1");
  if (sites.empty()) fail(ErrorKind::InvalidArgument, "no points to probe");
  const bool needs_ell = kind == CurvatureKind::RicciFirst || kind == CurvatureKind::RicciSecond || kind == CurvatureKind::ScalarL;
  for (const auto& site : sites) {
    const int m = site.R.dim();
    if (needs_ell && (ell < 1 || ell > m))
      fail(ErrorKind::InvalidArgument, "l must lie in [1, m] (got l = " + std::to_string(ell) + ", m = " + std::to_string(m) + ")");
  }
  const detail::KindEvaluator eval(kind, ell);
  std::vector<ProbeResult> per_site(sites.size());
  parallel_for(sites.size(), [&](std::size_t s) {
    const CurvatureSite& site = sites[s];
    const int m = site.R.dim();
    const int cols = eval.columns(m);
    detail::Candidate best_lo, best_hi;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < opt.n_samples; ++k) {
      auto c = detail::random_candidate(m, cols, eval.uses_weights(), opt.seed, static_cast<int>(s), k);
      const double vlo = eval.evaluate(site, c, true, nullptr);
      const double vhi = eval.evaluate(site, c, false, nullptr);
      if (vlo < lo) { lo = vlo; best_lo = c; }
      if (vhi > hi) { hi = vhi; best_hi = c; }
    }
    lo = detail::refine(eval, site, best_lo, lo, true, opt.refine_steps, opt.initial_step);
    hi = detail::refine(eval, site, best_hi, hi, false, opt.refine_steps, opt.initial_step);
    ProbeResult& r = per_site[s];
    r.min = lo;
    r.max = hi;
    eval.evaluate(site, best_lo, true, &r.min_witness);
    eval.evaluate(site, best_hi, false, &r.max_witness);
    r.min_witness.point_index = r.max_witness.point_index = static_cast<int>(s);
  });
  ProbeResult result;
  for (const auto& r : per_site) {
    if (r.min < result.min) {
      result.min = r.min;
      result.min_witness = r.min_witness;
    }
    if (r.max > result.max) {
      result.max = r.max;
      result.max_witness = r.max_witness;
    }
  }
  return result;
}

inline CurvatureSite curvature_site(const MetricField& g, const ChartPoint& p, const FdConfig& cfg) {
  auto jet = metric_jet(g, p, cfg);
  return CurvatureSite{curvature_from_jet(jet), jet.g};
}

/// Probe of a curvature functional of g over a list of points.
inline ProbeResult curvature_sign_probe(const MetricField& g, const std::vector<ChartPoint>& points, CurvatureKind kind,
                                        int ell, const ProbeOptions& opt, const FdConfig& cfg) {
  std::vector<CurvatureSite> sites(points.size());
  parallel_for(points.size(), [&](std::size_t i) { sites[i] = curvature_site(g, points[i], cfg); });
  return curvature_sign_probe(sites, kind, ell, opt);
}

}  // namespace chernlab
