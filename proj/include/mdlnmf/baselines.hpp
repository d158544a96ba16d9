#ifndef MDLNMF_BASELINES_HPP
#define MDLNMF_BASELINES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "core.hpp"
#include "errors.hpp"
#include "solver.hpp"

namespace mdlnmf {

constexpr double kMuEps = 1e-12;  // zero-division guard in the MU denominators

struct BaselineResult {
  FactorPair factors;
  std::vector<double> error_trace;  // squared Frobenius error, entry 0 = initial
};

inline FactorPair baseline_init(const DataMatrix& v, int rank, std::uint64_t seed) {
  SolverConfig c;
  c.rank = rank;
  c.seed = seed;
  return init_factors(v, c, InitStrategy::random_uniform());
}

// Lee-Seung multiplicative updates for the squared Frobenius objective.
inline BaselineResult mu_nmf(const DataMatrix& v, int rank, long iterations,
                             std::uint64_t seed,
                             std::optional<FactorPair> init = std::nullopt) {
  if (rank < 1) throw DataError("rank must be >= 1");
  BaselineResult res;
  res.factors = init ? std::move(*init) : baseline_init(v, rank, seed);
  Matrix& w = res.factors.w;
  Matrix& h = res.factors.h;
  check_factor_shapes(v, res.factors);
  const Matrix& vals = v.values;
  res.error_trace.push_back((vals - w * h).squaredNorm());
  for (long it = 0; it < iterations; ++it) {
    h = (h.array() * (w.transpose() * vals).array() /
         (((w.transpose() * w) * h).array() + kMuEps)).matrix();
    w = (w.array() * (vals * h.transpose()).array() /
         ((w * (h * h.transpose())).array() + kMuEps)).matrix();
    const double err = (vals - w * h).squaredNorm();
    if (!std::isfinite(err)) throw DivergedError("multiplicative updates diverged");
    res.error_trace.push_back(err);
  }
  return res;
}

// Hoyer's sparseness measure: 1 for a 1-sparse vector, 0 for a constant one.
inline double hoyer_sparseness(const Vector& x) {
  if (x.size() < 2) throw LengthOneError();
  const double l2 = x.norm();
  if (l2 == 0.0) throw ZeroVectorError();
  const double l1 = x.cwiseAbs().sum();
  const double sqrt_n = std::sqrt(static_cast<double>(x.size()));
  return (sqrt_n - l1 / l2) / (sqrt_n - 1.0);
}

// Closest non-negative vector with the given L1 and L2 norms (Hoyer's
// alternating projection). Feasibility needs l2 <= l1 <= l2*sqrt(n).
inline Vector project_sparseness(const Vector& x, double l1, double l2) {
  const Index n = x.size();
  if (n < 2) throw LengthOneError();
  if (!(l1 > 0.0) || !(l2 > 0.0))
    throw InfeasibleTargetError("norm targets must be positive");
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  if (l1 < l2 * (1.0 - 1e-12) || l1 > l2 * sqrt_n * (1.0 + 1e-12))
    throw InfeasibleTargetError("no non-negative vector has this L1/L2 pair");

  Vector s = (x.array() + (l1 - x.sum()) / static_cast<double>(n)).matrix();
  std::vector<bool> zeroed(n, false);
  Index free = n;
  for (Index round = 0; round <= n + 2; ++round) {
    const double mid = l1 / static_cast<double>(free);
    Vector m(n);
    for (Index i = 0; i < n; ++i) m[i] = zeroed[i] ? 0.0 : mid;
    const Vector d = s - m;
    const double a = d.squaredNorm();
    const double b = 2.0 * m.dot(d);
    const double c = m.squaredNorm() - l2 * l2;
    if (a <= 1e-300) {
      if (std::abs(c) <= 1e-9 * l2 * l2) {
        s = m;
        break;
      }
      throw NoConvergenceError("sparseness projection stalled off the L2 sphere");
    }
    double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) disc = 0.0;
    s = m + ((-b + std::sqrt(disc)) / (2.0 * a)) * d;

    bool any_negative = false;
    for (Index i = 0; i < n; ++i)
      if (!zeroed[i] && s[i] < 0.0) any_negative = true;
    if (!any_negative) break;

    for (Index i = 0; i < n; ++i)
      if (!zeroed[i] && s[i] < 0.0) {
        s[i] = 0.0;
        zeroed[i] = true;
        --free;
      }
    if (free < 1) throw NoConvergenceError("sparseness projection zeroed every coordinate");
    const double excess = (s.sum() - l1) / static_cast<double>(free);
    for (Index i = 0; i < n; ++i)
      if (!zeroed[i]) s[i] -= excess;
  }
  return s.cwiseMax(0.0);
}

struct SparsenessTarget {
  std::optional<double> w;  // column sparseness of W
  std::optional<double> h;  // row sparseness of H
};

namespace detail {

// L1 norm that attains sparseness `s` for a vector of length n at L2 norm l2.
inline double l1_for_sparseness(double s, double l2, Index n) {
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  return l2 * (sqrt_n - s * (sqrt_n - 1.0));
}

inline void project_columns(Matrix& w, double sparseness) {
  for (Index j = 0; j < w.cols(); ++j) {
    Vector col = w.col(j);
    double l2 = col.norm();
    if (!(l2 > 1e-12)) {
      // A dead column carries no information; re-seed it flat.
      col.setConstant(1.0);
      l2 = col.norm();
    }
    w.col(j) = project_sparseness(col, l1_for_sparseness(sparseness, l2, col.size()), l2);
  }
}

inline void project_rows(Matrix& h, double sparseness) {
  for (Index i = 0; i < h.rows(); ++i) {
    Vector row = h.row(i).transpose();
    double l2 = row.norm();
    if (!(l2 > 1e-12)) {
      row.setConstant(1.0);
      l2 = row.norm();
    }
    h.row(i) = project_sparseness(row, l1_for_sparseness(sparseness, l2, row.size()), l2)
                   .transpose();
  }
}

}  // namespace detail

// Sparseness-constrained NMF: constrained factors move by a projected
// gradient step (step, then project every column/row back onto the target
// sparseness at its own L2 norm), unconstrained factors by the MU rule. A
// projected step is only kept if it lowers the error; otherwise the step
// size halves and the step is retried, so the error trace never rises.
inline BaselineResult snmf(const DataMatrix& v, int rank, const SparsenessTarget& targets,
                           long iterations, std::uint64_t seed,
                           std::optional<FactorPair> init = std::nullopt) {
  if (rank < 1) throw DataError("rank must be >= 1");
  if (!targets.w && !targets.h)
    throw DataError("snmf needs a sparseness target on at least one factor");
  for (const auto& t : {targets.w, targets.h})
    if (t && !(*t >= 0.0 && *t <= 1.0))
      throw InfeasibleTargetError("sparseness targets live in [0,1]");

  BaselineResult res;
  res.factors = init ? std::move(*init) : baseline_init(v, rank, seed);
  Matrix& w = res.factors.w;
  Matrix& h = res.factors.h;
  check_factor_shapes(v, res.factors);
  const Matrix& vals = v.values;

  if (targets.w) detail::project_columns(w, *targets.w);
  if (targets.h) detail::project_rows(h, *targets.h);

  double step_w = 1e-3 * vals.mean();
  double step_h = step_w;
  double err = (vals - w * h).squaredNorm();
  res.error_trace.push_back(err);

  for (long it = 0; it < iterations; ++it) {
    if (targets.w) {
      const Matrix grad = (w * h - vals) * h.transpose();
      for (int attempt = 0; attempt < 30; ++attempt) {
        Matrix trial = w - step_w * grad;
        detail::project_columns(trial, *targets.w);
        const double trial_err = (vals - trial * h).squaredNorm();
        if (trial_err <= err) {
          w = std::move(trial);
          err = trial_err;
          step_w *= 1.2;  // recover from earlier halvings
          break;
        }
        step_w *= 0.5;
      }
    } else {
      w = (w.array() * (vals * h.transpose()).array() /
           ((w * (h * h.transpose())).array() + kMuEps)).matrix();
      err = (vals - w * h).squaredNorm();
    }

    if (targets.h) {
      const Matrix grad = w.transpose() * (w * h - vals);
      for (int attempt = 0; attempt < 30; ++attempt) {
        Matrix trial = h - step_h * grad;
        detail::project_rows(trial, *targets.h);
        const double trial_err = (vals - w * trial).squaredNorm();
        if (trial_err <= err) {
          h = std::move(trial);
          err = trial_err;
          step_h *= 1.2;
          break;
        }
        step_h *= 0.5;
      }
    } else {
      h = (h.array() * (w.transpose() * vals).array() /
           (((w.transpose() * w) * h).array() + kMuEps)).matrix();
      err = (vals - w * h).squaredNorm();
    }

    if (!std::isfinite(err)) throw DivergedError("snmf diverged");
    res.error_trace.push_back(err);
  }
  return res;
}

}  // namespace mdlnmf

#endif  // MDLNMF_BASELINES_HPP
