#ifndef MDLNMF_DISTFIT_HPP
#define MDLNMF_DISTFIT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "core.hpp"
#include "errors.hpp"

namespace mdlnmf {

// Shape cap for the gamma fit on near-constant samples.
constexpr double kGammaShapeCap = 1e6;

// psi(x) by recurrence down from the asymptotic region.
inline double digamma(double x) {
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double tail =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
  return acc + std::log(x) - 0.5 * inv - tail;
}

inline double trigamma(double x) {
  double acc = 0.0;
  while (x < 10.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double tail =
      inv * inv2 *
      (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 / 30.0)));
  return acc + inv + 0.5 * inv2 + tail;
}

// Floors sigma so near-constant residuals keep the gradients finite.
inline double sigma_floor(double lo, double hi) {
  const double range = hi - lo;
  if (range > 0.0) return 1e-9 * range;
  return std::max(1e-12, 1e-9 * std::abs(hi));
}

inline GaussianParams fit_gaussian(std::span<const double> samples) {
  if (samples.size() < 2) throw TooFewSamplesError(samples.size());
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const double x : samples) {
    if (!std::isfinite(x)) throw NonFiniteSampleError();
    sum += x;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double n = static_cast<double>(samples.size());
  const double mu = sum / n;
  double ss = 0.0;
  for (const double x : samples) ss += (x - mu) * (x - mu);
  const double sigma = std::max(std::sqrt(ss / n), sigma_floor(lo, hi));
  return {mu, sigma};
}

// Maximum-likelihood gamma fit. The profile likelihood in the shape is
// maximized by Newton iteration on log(a) - psi(a) = log(mean) - mean(log x),
// started from the closed-form approximation; the rate is then shape/mean,
// which pins shape/rate to the sample mean exactly.
inline GammaParams fit_gamma(std::span<const double> samples) {
  if (samples.size() < 2) throw TooFewSamplesError(samples.size());
  double sum = 0.0;
  double sum_log = 0.0;
  for (const double x : samples) {
    if (!std::isfinite(x) || !(x > 0.0)) throw NonPositiveSampleError(x);
    sum += x;
    sum_log += std::log(x);
  }
  const double n = static_cast<double>(samples.size());
  const double mean = sum / n;
  const double s = std::log(mean) - sum_log / n;  // >= 0 by Jensen
  if (!(s > 1e-12)) {
    // Near-zero spread: the likelihood pushes the shape to infinity. Cap it.
    return {kGammaShapeCap, kGammaShapeCap / mean};
  }
  double shape = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  if (shape >= kGammaShapeCap) return {kGammaShapeCap, kGammaShapeCap / mean};
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    const double g = std::log(shape) - digamma(shape) - s;
    // residual stop as well as step stop: near-constant samples put the root
    // where one Newton step spans several ulps of g
    if (std::abs(g) <= 1e-10 * std::max(1.0, s)) {
      converged = true;
      break;
    }
    const double dg = 1.0 / shape - trigamma(shape);
    double next = shape - g / dg;
    if (!(next > 0.0)) next = shape / 2.0;  // keep the iterate positive
    if (next >= kGammaShapeCap) {
      shape = kGammaShapeCap;
      converged = true;
      break;
    }
    const bool done = std::abs(next - shape) <= 1e-10 * std::max(1.0, std::abs(next));
    shape = next;
    if (done) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NoConvergenceError("gamma MLE: Newton iteration budget exhausted");
  return {shape, shape / mean};
}

// Uniform bins of width bin_width spanning [min(samples), max(samples)].
// Bins are right-open; the last bin also takes the maximum.
struct Histogram {
  double bin_width = 0.0;
  std::vector<double> bin_edges;  // size bins+1
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;

  std::int64_t bin_of(double x) const {
    const auto idx = static_cast<std::int64_t>((x - bin_edges.front()) / bin_width);
    return std::clamp<std::int64_t>(idx, 0, static_cast<std::int64_t>(counts.size()) - 1);
  }
};

inline Histogram build_histogram(std::span<const double> samples, double delta) {
  if (samples.empty()) throw EmptySamplesError();
  if (!(delta > 0.0)) throw DataError("histogram bin width must be > 0");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const double x : samples) {
    if (!std::isfinite(x)) throw NonFiniteSampleError();
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  std::int64_t bins = 1;
  if (hi > lo) bins = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil((hi - lo) / delta)));
  Histogram h;
  h.bin_width = delta;
  h.bin_edges.resize(bins + 1);
  for (std::int64_t i = 0; i <= bins; ++i) h.bin_edges[i] = lo + static_cast<double>(i) * delta;
  h.counts.assign(bins, 0);
  for (const double x : samples) ++h.counts[h.bin_of(x)];
  h.total = static_cast<std::int64_t>(samples.size());
  return h;
}

// Non-parametric code length: sum of -log2(b_i/N) over all samples, where
// b_i is the occupancy of the sample's bin.
inline double code_length_histogram(std::span<const double> samples, double delta) {
  const Histogram h = build_histogram(samples, delta);
  const double n = static_cast<double>(h.total);
  double bits = 0.0;
  for (const double x : samples)
    bits += -std::log2(static_cast<double>(h.counts[h.bin_of(x)]) / n);
  return bits;
}

// Parametric code lengths: an element of value x costs
// -log2(min(density(x) * delta, 1)) bits, so contributions never go negative.

inline double code_length_gamma(std::span<const double> samples,
                                const GammaParams& p, double delta) {
  if (!(delta > 0.0)) throw DataError("delta must be > 0");
  const double log2_delta = std::log2(delta);
  const double log_norm = p.shape * std::log(p.rate) - std::lgamma(p.shape);
  double bits = 0.0;
  for (const double x : samples) {
    if (!(x > 0.0)) throw NonPositiveSampleError(x);
    const double log_density = log_norm + (p.shape - 1.0) * std::log(x) - p.rate * x;
    bits += std::max(0.0, -(log_density / std::numbers::ln2 + log2_delta));
  }
  return bits;
}

inline double code_length_gaussian(std::span<const double> samples,
                                   const GaussianParams& p, double delta) {
  if (!(delta > 0.0)) throw DataError("delta must be > 0");
  const double log2_delta = std::log2(delta);
  const double log_norm = -std::log(p.sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
  double bits = 0.0;
  for (const double x : samples) {
    if (!std::isfinite(x)) throw NonFiniteSampleError();
    const double z = (x - p.mu) / p.sigma;
    const double log_density = log_norm - 0.5 * z * z;
    bits += std::max(0.0, -(log_density / std::numbers::ln2 + log2_delta));
  }
  return bits;
}

}  // namespace mdlnmf

#endif  // MDLNMF_DISTFIT_HPP
