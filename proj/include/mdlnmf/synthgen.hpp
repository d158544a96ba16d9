#ifndef MDLNMF_SYNTHGEN_HPP
#define MDLNMF_SYNTHGEN_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "baselines.hpp"
#include "core.hpp"
#include "errors.hpp"

namespace mdlnmf {

enum class Variant { Plain, Smoothed, SparseGenerated };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Plain: return "plain";
    case Variant::Smoothed: return "smoothed";
    case Variant::SparseGenerated: return "sparse";
  }
  return "plain";
}

// Data with known structure: factor a real matrix, rebuild it (v_true), then
// add Gaussian noise scaled to the rebuilt data's spread (v_noise).
struct SemiSyntheticSet {
  DataMatrix v_true;
  DataMatrix v_noise;
  FactorPair generating;  // w_true, h_true
  double noise_sigma = 0.0;
  Variant variant = Variant::Plain;
  int generator_rank = 0;
};

namespace detail {

// Window-3 moving average down each column, truncated at the ends.
inline Matrix smooth_columns(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      const Index lo = std::max<Index>(0, i - 1);
      const Index hi = std::min<Index>(m.rows() - 1, i + 1);
      double acc = 0.0;
      for (Index k = lo; k <= hi; ++k) acc += m(k, j);
      out(i, j) = acc / static_cast<double>(hi - lo + 1);
    }
  }
  return out;
}

inline double population_std(const Matrix& m) {
  const double mu = m.mean();
  return std::sqrt((m.array() - mu).square().sum() / static_cast<double>(m.size()));
}

}  // namespace detail

constexpr double kSparseGeneratedSparseness = 0.7;

inline SemiSyntheticSet make_semisynthetic(const DataMatrix& v, int generator_rank,
                                           double noise_sigma, Variant variant,
                                           std::uint64_t seed,
                                           long nmf_iterations = 400) {
  if (noise_sigma < 0.0) throw DataError("noise sigma must be >= 0");
  SemiSyntheticSet set;
  set.noise_sigma = noise_sigma;
  set.variant = variant;
  set.generator_rank = generator_rank;

  if (variant == Variant::SparseGenerated) {
    SparsenessTarget t;
    t.w = kSparseGeneratedSparseness;
    set.generating = snmf(v, generator_rank, t, nmf_iterations, seed).factors;
  } else {
    set.generating = mu_nmf(v, generator_rank, nmf_iterations, seed).factors;
  }
  if (variant == Variant::Smoothed)
    set.generating.w = detail::smooth_columns(set.generating.w);

  set.v_true = DataMatrix{set.generating.w * set.generating.h, {}, {}};

  if (noise_sigma == 0.0) {
    set.v_noise = set.v_true;
    return set;
  }
  const double scale = noise_sigma * detail::population_std(set.v_true.values);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> noise(0.0, scale);
  Matrix noisy = set.v_true.values;
  for (Index j = 0; j < noisy.cols(); ++j)
    for (Index i = 0; i < noisy.rows(); ++i)
      noisy(i, j) = std::max(0.0, noisy(i, j) + noise(rng));
  set.v_noise = DataMatrix{std::move(noisy), {}, {}};
  return set;
}

// Squared Frobenius distance of the reconstruction to the pre-noise matrix.
inline double true_error(const FactorPair& f, const SemiSyntheticSet& set) {
  return frobenius_sq(set.v_true.values, f.w * f.h);
}

// Same against the noisy matrix the solver actually saw.
inline double noise_error(const FactorPair& f, const SemiSyntheticSet& set) {
  return frobenius_sq(set.v_noise.values, f.w * f.h);
}

// Divide every tracked series by its first value, so plots start at one.
inline RunTrace normalize_trace(const RunTrace& trace) {
  if (trace.empty()) throw DataError("cannot normalize an empty trace");
  const TraceEntry& first = trace.front();
  const auto check = [](double v, const char* name) {
    if (v == 0.0) throw ZeroInitialValueError(name);
    return v;
  };
  const double o0 = check(first.objective, "objective");
  const double w0 = check(first.l_w, "l_w");
  const double h0 = check(first.l_h, "l_h");
  const double e0 = check(first.l_e, "l_e");
  const double f0 = check(first.frobenius_error, "frobenius_error");
  const double r0 = check(first.learning_rate, "learning_rate");
  RunTrace out = trace;
  for (TraceEntry& t : out) {
    t.objective /= o0;
    t.l_w /= w0;
    t.l_h /= h0;
    t.l_e /= e0;
    t.frobenius_error /= f0;
    t.learning_rate /= r0;
  }
  return out;
}

// Desk-scale stand-in datasets with the m/n proportions of the three data
// families the toolkit targets (image stacks, expression panels, price
// histories). Low-rank structure plus positive noise, scaled per kind.
enum class StandinKind { Faces, Transcriptome, Ftse };

struct StandinSpec {
  StandinKind kind = StandinKind::Faces;
  Index m = 0;  // 0: kind default
  Index n = 0;
  int structure_rank = 0;
  std::uint64_t seed = 0;
};

inline DataMatrix make_standin(const StandinSpec& spec) {
  Index m = spec.m;
  Index n = spec.n;
  int rank = spec.structure_rank;
  double scale = 1.0;
  switch (spec.kind) {
    case StandinKind::Faces:
      if (m == 0) m = 60;
      if (n == 0) n = 404;
      if (rank == 0) rank = 8;
      scale = 1.0;
      break;
    case StandinKind::Transcriptome:
      if (m == 0) m = 800;
      if (n == 0) n = 6;
      if (rank == 0) rank = 3;
      scale = 16000.0;
      break;
    case StandinKind::Ftse:
      if (m == 0) m = 280;
      if (n == 0) n = 20;
      if (rank == 0) rank = 6;
      scale = 100.0;
      break;
  }
  rank = static_cast<int>(std::min<Index>(rank, std::min(m, n)));
  std::mt19937_64 rng(spec.seed);
  std::gamma_distribution<double> part(2.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 1.0);
  Matrix w(m, rank), h(rank, n);
  for (Index j = 0; j < rank; ++j)
    for (Index i = 0; i < m; ++i) w(i, j) = part(rng);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < rank; ++i) h(i, j) = part(rng);
  Matrix v = w * h;
  const double noise = 0.05 * detail::population_std(v);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) v(i, j) += std::abs(jitter(rng)) * noise;
  v *= scale / v.maxCoeff();
  return DataMatrix{std::move(v), {}, {}};
}

inline StandinKind standin_kind_from_name(const std::string& name) {
  if (name == "faces") return StandinKind::Faces;
  if (name == "transcriptome") return StandinKind::Transcriptome;
  if (name == "ftse") return StandinKind::Ftse;
  throw DataError("unknown stand-in kind '" + name + "' (faces|transcriptome|ftse)");
}

}  // namespace mdlnmf

#endif  // MDLNMF_SYNTHGEN_HPP
