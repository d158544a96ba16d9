#ifndef MDLNMF_SOLVER_HPP
#define MDLNMF_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <utility>

#include "core.hpp"
#include "distfit.hpp"
#include "errors.hpp"
#include "objective.hpp"

namespace mdlnmf {

struct SolverConfig {
  int rank = 2;
  double delta = 0.0;            // <= 0: derived from the data range
  double learning_rate_w = 0.0;  // <= 0: scaled from the data at startup
  double learning_rate_h = 0.0;
  long max_iterations = 10000;
  double lr_reduction_factor = 0.5;
  double min_learning_rate = 1e-14;
  int stop_patience = 50;
  double stop_rel_tol = 1e-7;
  std::uint64_t seed = 0;
};

struct InitStrategy {
  enum class Kind { RandomUniform, WarmStart };

  Kind kind = Kind::RandomUniform;
  std::optional<FactorPair> warm_source;
  double warm_noise_sigma = 0.0;

  static InitStrategy random_uniform() { return {}; }
  static InitStrategy warm_start(FactorPair source, double noise_sigma = 0.0) {
    InitStrategy s;
    s.kind = Kind::WarmStart;
    s.warm_source = std::move(source);
    s.warm_noise_sigma = noise_sigma;
    return s;
  }
};

struct SolverResult {
  FactorPair factors;  // lowest-objective accepted state
  CodeModel model;
  DescriptionLength description;
  RunTrace trace;
  long accepted = 0;  // includes the initial state
  long rejected = 0;
  double delta = 0.0;
};

// Called after each iteration settles (accepted or reverted) with the trace
// entry and the current factors.
using IterationObserver = std::function<void(const TraceEntry&, const FactorPair&)>;

// Precision: a thousandth of the data range, with a fallback for constant data.
inline double auto_delta(const DataMatrix& v) {
  const double hi = v.values.maxCoeff();
  const double lo = v.values.minCoeff();
  if (hi > lo) return (hi - lo) / 1000.0;
  return std::max(1e-6, std::abs(hi) * 1e-6);
}

inline FactorPair clamp_factors(FactorPair f, double delta) {
  const double floor = delta / 2.0;
  f.w = f.w.cwiseMax(floor);
  f.h = f.h.cwiseMax(floor);
  return f;
}

inline void validate_config(const DataMatrix& v, const SolverConfig& c) {
  if (c.rank < 1) throw DataError("rank must be >= 1");
  if (c.max_iterations < 1) throw DataError("max_iterations must be >= 1");
  if (!(c.lr_reduction_factor > 0.0 && c.lr_reduction_factor < 1.0))
    throw DataError("lr_reduction_factor must be in (0,1)");
  if (!(c.min_learning_rate > 0.0)) throw DataError("min_learning_rate must be > 0");
  if (c.stop_patience < 1) throw DataError("stop_patience must be >= 1");
  if (!(c.stop_rel_tol > 0.0)) throw DataError("stop_rel_tol must be > 0");
  if (c.rank >= std::min(v.rows(), v.cols()))
    std::cerr << "mdlnmf: warning: rank " << c.rank
              << " is not small against min(" << v.rows() << ", " << v.cols()
              << "); the factorization is over-parameterized\n";
}

inline FactorPair init_factors(const DataMatrix& v, const SolverConfig& config,
                               const InitStrategy& strategy) {
  const double delta = config.delta > 0.0 ? config.delta : auto_delta(v);
  const Index m = v.rows();
  const Index n = v.cols();
  const Index r = config.rank;

  if (strategy.kind == InitStrategy::Kind::WarmStart) {
    if (!strategy.warm_source) throw DataError("warm start requires a source factor pair");
    const FactorPair& src = *strategy.warm_source;
    if (src.w.rows() != m || src.w.cols() != r || src.h.rows() != r || src.h.cols() != n)
      throw ShapeMismatchError("warm-start source does not match data shape and rank");
    FactorPair out = src;
    if (strategy.warm_noise_sigma > 0.0) {
      std::mt19937_64 rng(config.seed);
      std::normal_distribution<double> noise(0.0, strategy.warm_noise_sigma);
      for (Index j = 0; j < out.w.cols(); ++j)
        for (Index i = 0; i < out.w.rows(); ++i) out.w(i, j) += noise(rng);
      for (Index j = 0; j < out.h.cols(); ++j)
        for (Index i = 0; i < out.h.rows(); ++i) out.h(i, j) += noise(rng);
    }
    return clamp_factors(std::move(out), delta);
  }

  // i.i.d. uniform entries with the mean chosen so mean(W*H) ~ mean(V).
  const double target = std::sqrt(std::max(v.values.mean(), 0.0) / static_cast<double>(r));
  const double lo = delta / 2.0;
  const double hi = std::max(2.0 * target - lo, lo + delta / 2.0);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> uniform(lo, hi);
  FactorPair out;
  out.w.resize(m, r);
  out.h.resize(r, n);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < m; ++i) out.w(i, j) = uniform(rng);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < r; ++i) out.h(i, j) = uniform(rng);
  return out;
}

inline CodeModel fit_code_model(const Matrix& w, const Matrix& h, const Matrix& e,
                                double delta) {
  CodeModel model;
  model.gamma_w = fit_gamma(entries(w));
  model.gamma_h = fit_gamma(entries(h));
  model.gauss_e = fit_gaussian(entries(e));
  model.delta = delta;
  return model;
}

// Gradient descent on the description length. Per iteration: clamp the
// factors at delta/2, step W against its gradient under the previous
// iteration's model, refresh the residual, step H, then refit the model by
// maximum likelihood and evaluate. A step that fails to reduce the objective
// is reverted (factors and model together) and both learning rates shrink.
// Returns the lowest-objective accepted state, not necessarily the last one.
inline SolverResult mdl_nmf(const DataMatrix& v, const SolverConfig& config,
                            const InitStrategy& strategy,
                            const IterationObserver& observer = {}) {
  validate_config(v, config);
  const double delta = config.delta > 0.0 ? config.delta : auto_delta(v);

  FactorPair factors = init_factors(v, config, strategy);
  Matrix e = v.values - factors.w * factors.h;
  CodeModel model = fit_code_model(factors.w, factors.h, e, delta);
  DescriptionLength dl = description_length(factors.w, factors.h, e, model);
  double objective = dl.total();
  if (!std::isfinite(objective)) throw DivergedError("initial objective is not finite");

  double lr_w = config.learning_rate_w;
  double lr_h = config.learning_rate_h;
  if (lr_w <= 0.0 || lr_h <= 0.0) {
    const Matrix gw = grad_w(factors, e, model);
    const Matrix gh = grad_h(factors, e, model);
    const double grad_scale = (gw.cwiseAbs().sum() + gh.cwiseAbs().sum()) /
                              static_cast<double>(gw.size() + gh.size());
    double lr = 1e-3 * v.values.mean() / std::max(grad_scale, 1e-300);
    if (!(lr > 0.0) || !std::isfinite(lr)) lr = config.min_learning_rate;
    if (lr_w <= 0.0) lr_w = lr;
    if (lr_h <= 0.0) lr_h = lr;
  }

  SolverResult result;
  result.delta = delta;
  result.trace.push_back({0, objective, dl.l_w, dl.l_h, dl.l_e,
                          e.squaredNorm(), lr_w, true});
  result.accepted = 1;
  result.factors = factors;
  result.model = model;
  result.description = dl;
  double best_objective = objective;
  if (observer) observer(result.trace.back(), factors);

  int flat_steps = 0;
  for (long t = 1; t <= config.max_iterations; ++t) {
    if (lr_w < config.min_learning_rate && lr_h < config.min_learning_rate) break;

    factors = clamp_factors(std::move(factors), delta);
    const FactorPair previous = factors;
    const CodeModel previous_model = model;

    e = v.values - factors.w * factors.h;
    factors.w -= lr_w * grad_w(factors, e, model);
    factors.w = factors.w.cwiseMax(delta / 2.0);

    e = v.values - factors.w * factors.h;
    factors.h -= lr_h * grad_h(factors, e, model);
    factors.h = factors.h.cwiseMax(delta / 2.0);

    e = v.values - factors.w * factors.h;
    const CodeModel trial_model = fit_code_model(factors.w, factors.h, e, delta);
    const DescriptionLength trial_dl = description_length(factors.w, factors.h, e, trial_model);
    const double trial_objective = trial_dl.total();
    if (std::isnan(trial_objective)) throw DivergedError("objective became NaN");
    const double trial_frobenius = e.squaredNorm();

    if (trial_objective >= objective) {
      result.trace.push_back({t, trial_objective, trial_dl.l_w, trial_dl.l_h,
                              trial_dl.l_e, trial_frobenius, lr_w, false});
      ++result.rejected;
      factors = previous;
      model = previous_model;
      lr_w *= config.lr_reduction_factor;
      lr_h *= config.lr_reduction_factor;
      if (observer) observer(result.trace.back(), factors);
      continue;
    }

    const double improvement = (objective - trial_objective) / std::abs(objective);
    model = trial_model;
    objective = trial_objective;
    result.trace.push_back({t, trial_objective, trial_dl.l_w, trial_dl.l_h,
                            trial_dl.l_e, trial_frobenius, lr_w, true});
    ++result.accepted;
    if (trial_objective < best_objective) {
      best_objective = trial_objective;
      result.factors = factors;
      result.model = model;
      result.description = trial_dl;
    }
    if (observer) observer(result.trace.back(), factors);

    flat_steps = improvement < config.stop_rel_tol ? flat_steps + 1 : 0;
    if (flat_steps >= config.stop_patience) break;
  }
  return result;
}

}  // namespace mdlnmf

#endif  // MDLNMF_SOLVER_HPP
