#ifndef MDLNMF_EXPERIMENT_HPP
#define MDLNMF_EXPERIMENT_HPP

#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "baselines.hpp"
#include "core.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "report.hpp"
#include "solver.hpp"
#include "synthgen.hpp"

namespace mdlnmf {

namespace detail {

// Bounded worker pool over independent grid points. The first worker
// exception is rethrown after everything joins.
template <typename Fn>
void run_parallel(std::size_t count, int threads, Fn&& fn) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline std::string format_compact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace detail

inline void save_summary(const std::filesystem::path& path, const SolverResult& res,
                         const DataMatrix& v, double wall_seconds) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  const double frob = (v.values - res.factors.w * res.factors.h).squaredNorm();
  out << "rank=" << res.factors.rank() << "\n"
      << "delta=" << detail::format_double(res.delta) << "\n"
      << "l_w=" << detail::format_double(res.description.l_w) << "\n"
      << "l_h=" << detail::format_double(res.description.l_h) << "\n"
      << "l_e=" << detail::format_double(res.description.l_e) << "\n"
      << "total_bits=" << detail::format_double(res.description.total()) << "\n"
      << "frobenius_error=" << detail::format_double(frob) << "\n"
      << "iterations=" << (res.trace.size() - 1) << "\n"
      << "accepted=" << res.accepted << "\n"
      << "rejected=" << res.rejected << "\n"
      << "wall_time_s=" << detail::format_double(wall_seconds) << "\n";
}

struct FactorizeSpec {
  std::filesystem::path input;
  LoadOptions load;
  std::filesystem::path out_dir;
  SolverConfig config;
  bool warm = false;
  std::filesystem::path warm_dir;  // holds W.csv and H.csv
  double warm_noise = 0.0;         // absolute noise sigma on the warm factors
};

inline InitStrategy make_init(const FactorizeSpec& spec) {
  if (!spec.warm) return InitStrategy::random_uniform();
  FactorPair warm;
  warm.w = load_matrix(spec.warm_dir / "W.csv").values;
  warm.h = load_matrix(spec.warm_dir / "H.csv").values;
  return InitStrategy::warm_start(std::move(warm), spec.warm_noise);
}

inline SolverResult run_factorize(const FactorizeSpec& spec) {
  const DataMatrix v = load_matrix(spec.input, spec.load);
  const auto t0 = std::chrono::steady_clock::now();
  SolverResult res = mdl_nmf(v, spec.config, make_init(spec));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  namespace fs = std::filesystem;
  fs::create_directories(spec.out_dir);
  save_matrix(spec.out_dir / "W.csv", res.factors.w, "w");
  save_matrix(spec.out_dir / "H.csv", res.factors.h, "h");
  save_trace(spec.out_dir / "trace.csv", res.trace);
  save_model(spec.out_dir / "model.txt", res.model);
  save_summary(spec.out_dir / "summary.txt", res, v, wall);
  return res;
}

struct BaselineSpec {
  std::filesystem::path input;
  LoadOptions load;
  std::filesystem::path out_dir;
  int rank = 2;
  long iterations = 500;
  std::uint64_t seed = 0;
  std::optional<double> sparseness_w;  // snmf only
  std::optional<double> sparseness_h;
};

namespace detail {

inline void save_error_trace(const std::filesystem::path& dir,
                             const std::vector<double>& errors);

inline void save_baseline_artifacts(const BaselineSpec& spec, const BaselineResult& res,
                                    double wall_seconds) {
  namespace fs = std::filesystem;
  fs::create_directories(spec.out_dir);
  save_matrix(spec.out_dir / "W.csv", res.factors.w, "w");
  save_matrix(spec.out_dir / "H.csv", res.factors.h, "h");
  save_error_trace(spec.out_dir, res.error_trace);
  std::ofstream out(spec.out_dir / "summary.txt");
  out << "rank=" << spec.rank << "\n"
      << "iterations=" << (res.error_trace.size() - 1) << "\n"
      << "frobenius_error=" << format_double(res.error_trace.back()) << "\n"
      << "wall_time_s=" << format_double(wall_seconds) << "\n";
}

}  // namespace detail

inline BaselineResult run_baseline_mu(const BaselineSpec& spec) {
  const DataMatrix v = load_matrix(spec.input, spec.load);
  const auto t0 = std::chrono::steady_clock::now();
  BaselineResult res = mu_nmf(v, spec.rank, spec.iterations, spec.seed);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail::save_baseline_artifacts(spec, res, wall);
  return res;
}

inline BaselineResult run_baseline_snmf(const BaselineSpec& spec) {
  const DataMatrix v = load_matrix(spec.input, spec.load);
  SparsenessTarget targets;
  targets.w = spec.sparseness_w;
  targets.h = spec.sparseness_h;
  const auto t0 = std::chrono::steady_clock::now();
  BaselineResult res = snmf(v, spec.rank, targets, spec.iterations, spec.seed);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail::save_baseline_artifacts(spec, res, wall);
  return res;
}

struct SemisynthSpec {
  std::optional<std::filesystem::path> input;  // absent: generate a stand-in
  StandinSpec standin;
  LoadOptions load;
  std::filesystem::path out_dir;
  std::vector<double> noise_sigmas = {0.1, 0.3};
  std::vector<int> r_gen = {3};
  std::vector<int> r_fit;  // empty: fit at the generator rank
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  std::vector<std::string> methods = {"mdl", "mu"};
  std::vector<Variant> variants = {Variant::Plain};
  SolverConfig config;  // rank/seed overridden per grid point
  long baseline_iterations = 300;
  double warm_noise_rel = 0.05;  // times the pooled std of the warm factors
  int threads = 2;
};

namespace detail {

inline void save_semisynth_trace(const std::filesystem::path& dir, const RunTrace& trace,
                                 const std::vector<double>& true_errors) {
  {
    std::ofstream out(dir / "trace.csv");
    out << "iteration,objective,l_w,l_h,l_e,frobenius_error,true_error,learning_rate,accepted\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const TraceEntry& t = trace[i];
      out << t.iteration << ',' << format_double(t.objective) << ',' << format_double(t.l_w)
          << ',' << format_double(t.l_h) << ',' << format_double(t.l_e) << ','
          << format_double(t.frobenius_error) << ',' << format_double(true_errors[i]) << ','
          << format_double(t.learning_rate) << ',' << (t.accepted ? 1 : 0) << "\n";
    }
  }
  const TraceEntry& f = trace.front();
  const double te0 = true_errors.front();
  for (double v : {f.objective, f.l_w, f.l_h, f.l_e, f.frobenius_error, te0})
    if (v == 0.0) return;  // degenerate start, nothing sensible to normalize
  std::ofstream out(dir / "trace_normalized.csv");
  out << "iteration,objective,l_w,l_h,l_e,frobenius_error,true_error\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceEntry& t = trace[i];
    out << t.iteration << ',' << format_double(t.objective / f.objective) << ','
        << format_double(t.l_w / f.l_w) << ',' << format_double(t.l_h / f.l_h) << ','
        << format_double(t.l_e / f.l_e) << ',' << format_double(t.frobenius_error / f.frobenius_error)
        << ',' << format_double(true_errors[i] / te0) << "\n";
  }
}

inline void save_error_trace(const std::filesystem::path& dir,
                             const std::vector<double>& errors) {
  {
    std::ofstream out(dir / "trace.csv");
    out << "iteration,frobenius_error\n";
    for (std::size_t i = 0; i < errors.size(); ++i)
      out << i << ',' << format_double(errors[i]) << "\n";
  }
  if (errors.front() == 0.0) return;
  std::ofstream out(dir / "trace_normalized.csv");
  out << "iteration,frobenius_error\n";
  for (std::size_t i = 0; i < errors.size(); ++i)
    out << i << ',' << format_double(errors[i] / errors.front()) << "\n";
}

inline double pooled_std(const Matrix& a, const Matrix& b) {
  const double n = static_cast<double>(a.size() + b.size());
  const double mean = (a.sum() + b.sum()) / n;
  const double ss = (a.array() - mean).square().sum() + (b.array() - mean).square().sum();
  return std::sqrt(ss / n);
}

inline double mean_column_sparseness(const Matrix& w) {
  double acc = 0.0;
  for (Index j = 0; j < w.cols(); ++j) acc += hoyer_sparseness(w.col(j));
  return acc / static_cast<double>(w.cols());
}

inline double mean_row_sparseness(const Matrix& h) {
  double acc = 0.0;
  for (Index i = 0; i < h.rows(); ++i) acc += hoyer_sparseness(h.row(i).transpose());
  return acc / static_cast<double>(h.rows());
}

}  // namespace detail

struct SemisynthPoint {
  Variant variant;
  double noise_sigma;
  int r_gen;
  int r_fit;
  std::uint64_t seed;
  std::string method;
};

inline std::vector<SemisynthPoint> semisynth_grid(const SemisynthSpec& spec) {
  std::vector<SemisynthPoint> grid;
  const std::vector<int> r_fit_axis = spec.r_fit;
  for (Variant variant : spec.variants)
    for (double noise : spec.noise_sigmas)
      for (int rg : spec.r_gen)
        for (int rf : (r_fit_axis.empty() ? std::vector<int>{0} : r_fit_axis))
          for (std::uint64_t seed : spec.seeds)
            for (const std::string& method : spec.methods)
              grid.push_back({variant, noise, rg, rf == 0 ? rg : rf, seed, method});
  return grid;
}

inline std::string semisynth_point_name(const SemisynthPoint& p) {
  return std::string(variant_name(p.variant)) + "_" + p.method + "_no" +
         detail::format_compact(p.noise_sigma) + "_rg" + std::to_string(p.r_gen) +
         "_rf" + std::to_string(p.r_fit) + "_s" + std::to_string(p.seed);
}

// Runs the semi-synthetic recovery grid and writes one scatter row per run
// plus per-run (normalized) traces. Grid points execute on a bounded pool;
// each owns its output subdirectory.
inline std::vector<ScatterRow> run_semisynth(const SemisynthSpec& spec) {
  namespace fs = std::filesystem;
  const DataMatrix base = spec.input ? load_matrix(*spec.input, spec.load)
                                     : make_standin(spec.standin);
  const auto grid = semisynth_grid(spec);
  if (grid.empty()) throw DataError("semisynth grid is empty; every axis needs values");
  fs::create_directories(spec.out_dir);

  std::vector<ScatterRow> rows(grid.size());
  detail::run_parallel(grid.size(), spec.threads, [&](std::size_t idx) {
    const SemisynthPoint& p = grid[idx];
    const fs::path dir = spec.out_dir / semisynth_point_name(p);
    fs::create_directories(dir);

    const SemiSyntheticSet set = make_semisynthetic(base, p.r_gen, p.noise_sigma,
                                                    p.variant, p.seed,
                                                    spec.baseline_iterations);
    FactorPair fitted;
    double bits = 0.0;
    if (p.method == "mdl") {
      const BaselineResult warm = mu_nmf(set.v_noise, p.r_fit, spec.baseline_iterations, p.seed);
      const double noise_scale =
          spec.warm_noise_rel * detail::pooled_std(warm.factors.w, warm.factors.h);
      SolverConfig cfg = spec.config;
      cfg.rank = p.r_fit;
      cfg.seed = p.seed;
      std::vector<double> true_errors;
      const SolverResult res =
          mdl_nmf(set.v_noise, cfg, InitStrategy::warm_start(warm.factors, noise_scale),
                  [&](const TraceEntry&, const FactorPair& f) {
                    true_errors.push_back(true_error(f, set));
                  });
      fitted = res.factors;
      bits = res.description.total();
      detail::save_semisynth_trace(dir, res.trace, true_errors);
    } else if (p.method == "mu") {
      const BaselineResult res = mu_nmf(set.v_noise, p.r_fit, spec.baseline_iterations, p.seed);
      fitted = res.factors;
      const Matrix e = set.v_noise.values - fitted.w * fitted.h;
      bits = description_length(fitted.w, fitted.h, e,
                                fit_code_model(fitted.w, fitted.h, e, auto_delta(set.v_noise)))
                 .total();
      detail::save_error_trace(dir, res.error_trace);
    } else if (p.method == "snmf") {
      SparsenessTarget targets;
      targets.w = detail::mean_column_sparseness(set.generating.w);
      targets.h = detail::mean_row_sparseness(set.generating.h);
      const BaselineResult res =
          snmf(set.v_noise, p.r_fit, targets, spec.baseline_iterations, p.seed);
      fitted = res.factors;
      const Matrix e = set.v_noise.values - fitted.w * fitted.h;
      bits = description_length(fitted.w, fitted.h, e,
                                fit_code_model(fitted.w, fitted.h, e, auto_delta(set.v_noise)))
                 .total();
      detail::save_error_trace(dir, res.error_trace);
    } else {
      throw DataError("unknown method '" + p.method + "' (mdl|mu|snmf)");
    }

    save_matrix(dir / "W.csv", fitted.w, "w");
    save_matrix(dir / "H.csv", fitted.h, "h");
    rows[idx] = {p.method, variant_name(p.variant), p.noise_sigma, p.r_gen,
                 p.r_fit, p.seed, true_error(fitted, set), noise_error(fitted, set), bits};
  });

  save_scatter(spec.out_dir / "scatter.csv", rows);
  return rows;
}

struct SweepSpec {
  std::optional<std::filesystem::path> input;
  StandinSpec standin;
  LoadOptions load;
  std::filesystem::path out_dir;
  std::vector<int> ranks = {2, 4, 8};
  std::vector<std::uint64_t> seeds = {0};
  SolverConfig config;
  int threads = 2;
};

// Factorizes the same data across a rank grid, exposing how the description
// length splits move with r.
inline void run_sweep(const SweepSpec& spec) {
  namespace fs = std::filesystem;
  if (spec.ranks.empty() || spec.seeds.empty())
    throw DataError("sweep needs at least one rank and one seed");
  const DataMatrix v = spec.input ? load_matrix(*spec.input, spec.load)
                                  : make_standin(spec.standin);
  fs::create_directories(spec.out_dir);

  struct Point { int rank; std::uint64_t seed; };
  std::vector<Point> grid;
  for (int r : spec.ranks)
    for (std::uint64_t s : spec.seeds) grid.push_back({r, s});

  struct Row { SolverResult res; double wall; };
  std::vector<Row> results(grid.size());
  detail::run_parallel(grid.size(), spec.threads, [&](std::size_t idx) {
    SolverConfig cfg = spec.config;
    cfg.rank = grid[idx].rank;
    cfg.seed = grid[idx].seed;
    const auto t0 = std::chrono::steady_clock::now();
    SolverResult res = mdl_nmf(v, cfg, InitStrategy::random_uniform());
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const fs::path dir = spec.out_dir / ("r" + std::to_string(grid[idx].rank) + "_s" +
                                         std::to_string(grid[idx].seed));
    fs::create_directories(dir);
    save_matrix(dir / "W.csv", res.factors.w, "w");
    save_matrix(dir / "H.csv", res.factors.h, "h");
    save_trace(dir / "trace.csv", res.trace);
    save_model(dir / "model.txt", res.model);
    save_summary(dir / "summary.txt", res, v, wall);
    results[idx] = {std::move(res), wall};
  });

  std::ofstream out(spec.out_dir / "sweep.csv");
  if (!out) throw DataError("cannot write sweep.csv");
  out << "rank,seed,l_w,l_h,l_e,total_bits,frobenius_error,iterations,accepted,rejected\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const SolverResult& r = results[i].res;
    const double frob = (v.values - r.factors.w * r.factors.h).squaredNorm();
    out << grid[i].rank << ',' << grid[i].seed << ','
        << detail::format_double(r.description.l_w) << ','
        << detail::format_double(r.description.l_h) << ','
        << detail::format_double(r.description.l_e) << ','
        << detail::format_double(r.description.total()) << ','
        << detail::format_double(frob) << ',' << (r.trace.size() - 1) << ','
        << r.accepted << ',' << r.rejected << "\n";
  }
}

}  // namespace mdlnmf

#endif  // MDLNMF_EXPERIMENT_HPP
