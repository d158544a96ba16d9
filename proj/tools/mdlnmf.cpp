// Command-line front end: factorize / baseline-mu / baseline-snmf /
// semisynth / sweep / report / gen.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <mdlnmf/mdlnmf.hpp>

namespace {

using namespace mdlnmf;

std::string default_out(const char* command) {
  const char* root = std::getenv("MDLNMF_OUT");
  return (root ? std::string(root) : std::string("out")) + "/" + command;
}

double parse_delta(const std::string& s) {
  if (s == "auto") return 0.0;
  const auto v = detail::parse_double(s);
  if (!v || !(*v > 0.0))
    throw CLI::ValidationError("--delta", "expects a positive number or 'auto'");
  return *v;
}

Variant parse_variant(const std::string& s) {
  if (s == "plain") return Variant::Plain;
  if (s == "smoothed") return Variant::Smoothed;
  if (s == "sparse") return Variant::SparseGenerated;
  throw CLI::ValidationError("--variants", "expects plain|smoothed|sparse");
}

struct SolverFlags {
  std::string delta = "auto";
  double lr = 0.0;
  long max_iter = 10000;
  double lr_reduction = 0.5;
  double min_lr = 1e-14;
  int patience = 50;
  double rel_tol = 1e-7;

  void attach(CLI::App* cmd) {
    cmd->add_option("--delta", delta, "precision (bin width) in data units, or 'auto'");
    cmd->add_option("--lr", lr, "initial learning rate (0 = scale from the data)");
    cmd->add_option("--max-iter", max_iter, "iteration budget");
    cmd->add_option("--lr-reduction", lr_reduction, "learning-rate factor on a rejected step");
    cmd->add_option("--min-lr", min_lr, "stop once both learning rates fall below this");
    cmd->add_option("--patience", patience, "flat accepted steps before stopping");
    cmd->add_option("--rel-tol", rel_tol, "relative improvement counted as flat");
  }

  SolverConfig to_config(int rank, std::uint64_t seed) const {
    SolverConfig c;
    c.rank = rank;
    c.delta = parse_delta(delta);
    c.learning_rate_w = lr;
    c.learning_rate_h = lr;
    c.max_iterations = max_iter;
    c.lr_reduction_factor = lr_reduction;
    c.min_learning_rate = min_lr;
    c.stop_patience = patience;
    c.stop_rel_tol = rel_tol;
    c.seed = seed;
    return c;
  }
};

struct InputFlags {
  std::string input;
  bool transpose = false;
  std::string delimiter = ",";

  void attach(CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--input", input, "CSV matrix (rows = dimensions)");
    if (required) opt->required();
    cmd->add_flag("--transpose", transpose, "transpose after loading");
    cmd->add_option("--delimiter", delimiter, "field delimiter (default ',')");
  }

  LoadOptions load_options() const {
    LoadOptions o;
    o.transpose = transpose;
    o.delimiter = delimiter.empty() ? ',' : delimiter[0];
    return o;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Description-length NMF toolkit"};
  app.require_subcommand(1);

  // ---- factorize ----
  auto* factorize = app.add_subcommand("factorize", "MDL gradient-descent factorization");
  InputFlags fz_in;
  fz_in.attach(factorize);
  SolverFlags fz_solver;
  fz_solver.attach(factorize);
  int fz_rank = 0;
  std::uint64_t fz_seed = 0;
  std::string fz_init = "random";
  double fz_warm_noise = 0.0;
  std::string fz_out = default_out("factorize");
  factorize->add_option("--rank", fz_rank, "subspace size r")->required();
  factorize->add_option("--seed", fz_seed, "RNG seed");
  factorize->add_option("--init", fz_init, "random | warm:DIR (DIR holds W.csv and H.csv)");
  factorize->add_option("--warm-noise", fz_warm_noise, "Gaussian sigma added to warm factors");
  factorize->add_option("--out", fz_out, "output directory");
  factorize->callback([&] {
    FactorizeSpec spec;
    spec.input = fz_in.input;
    spec.load = fz_in.load_options();
    spec.out_dir = fz_out;
    spec.config = fz_solver.to_config(fz_rank, fz_seed);
    if (fz_init.rfind("warm:", 0) == 0) {
      spec.warm = true;
      spec.warm_dir = fz_init.substr(5);
      spec.warm_noise = fz_warm_noise;
    } else if (fz_init != "random") {
      throw CLI::ValidationError("--init", "expects random or warm:DIR");
    }
    const SolverResult res = run_factorize(spec);
    std::cout << "wrote " << fz_out << " (total " << res.description.total()
              << " bits over " << res.trace.size() - 1 << " iterations)\n";
  });

  // ---- baseline-mu ----
  auto* bmu = app.add_subcommand("baseline-mu", "Multiplicative-updates baseline");
  InputFlags bmu_in;
  bmu_in.attach(bmu);
  int bmu_rank = 0;
  long bmu_iters = 500;
  std::uint64_t bmu_seed = 0;
  std::string bmu_out = default_out("baseline-mu");
  bmu->add_option("--rank", bmu_rank, "subspace size r")->required();
  bmu->add_option("--iterations", bmu_iters, "update count");
  bmu->add_option("--seed", bmu_seed, "RNG seed");
  bmu->add_option("--out", bmu_out, "output directory");
  bmu->callback([&] {
    BaselineSpec spec;
    spec.input = bmu_in.input;
    spec.load = bmu_in.load_options();
    spec.out_dir = bmu_out;
    spec.rank = bmu_rank;
    spec.iterations = bmu_iters;
    spec.seed = bmu_seed;
    const BaselineResult res = run_baseline_mu(spec);
    std::cout << "wrote " << bmu_out << " (error " << res.error_trace.back() << ")\n";
  });

  // ---- baseline-snmf ----
  auto* bsn = app.add_subcommand("baseline-snmf", "Sparseness-constrained baseline");
  InputFlags bsn_in;
  bsn_in.attach(bsn);
  int bsn_rank = 0;
  long bsn_iters = 500;
  std::uint64_t bsn_seed = 0;
  double bsn_sw = -1.0, bsn_sh = -1.0;
  std::string bsn_out = default_out("baseline-snmf");
  bsn->add_option("--rank", bsn_rank, "subspace size r")->required();
  bsn->add_option("--iterations", bsn_iters, "update count");
  bsn->add_option("--seed", bsn_seed, "RNG seed");
  bsn->add_option("--sparseness-w", bsn_sw, "column sparseness target for W in [0,1]");
  bsn->add_option("--sparseness-h", bsn_sh, "row sparseness target for H in [0,1]");
  bsn->add_option("--out", bsn_out, "output directory");
  bsn->callback([&] {
    BaselineSpec spec;
    spec.input = bsn_in.input;
    spec.load = bsn_in.load_options();
    spec.out_dir = bsn_out;
    spec.rank = bsn_rank;
    spec.iterations = bsn_iters;
    spec.seed = bsn_seed;
    if (bsn_sw >= 0.0) spec.sparseness_w = bsn_sw;
    if (bsn_sh >= 0.0) spec.sparseness_h = bsn_sh;
    const BaselineResult res = run_baseline_snmf(spec);
    std::cout << "wrote " << bsn_out << " (error " << res.error_trace.back() << ")\n";
  });

  // ---- semisynth ----
  auto* ss = app.add_subcommand("semisynth", "Semi-synthetic recovery grid");
  InputFlags ss_in;
  ss_in.attach(ss, /*required=*/false);
  SolverFlags ss_solver;
  ss_solver.attach(ss);
  std::string ss_standin = "faces";
  std::uint64_t ss_standin_seed = 0;
  std::vector<double> ss_noise = {0.1, 0.3};
  std::vector<int> ss_rgen = {3};
  std::vector<int> ss_rfit;
  std::vector<std::uint64_t> ss_seeds = {0, 1, 2};
  std::vector<std::string> ss_methods = {"mdl", "mu"};
  std::vector<std::string> ss_variants = {"plain"};
  long ss_base_iters = 300;
  double ss_warm_noise_rel = 0.05;
  int ss_threads = 2;
  std::string ss_out = default_out("semisynth");
  ss->add_option("--standin", ss_standin, "stand-in data when --input is absent (faces|transcriptome|ftse)");
  ss->add_option("--standin-seed", ss_standin_seed, "stand-in generator seed");
  ss->add_option("--noise", ss_noise, "noise levels (times the data std)")->delimiter(',');
  ss->add_option("--r-gen", ss_rgen, "generator ranks")->delimiter(',');
  ss->add_option("--r-fit", ss_rfit, "fit ranks (default: match the generator)")->delimiter(',');
  ss->add_option("--seeds", ss_seeds, "seeds")->delimiter(',');
  ss->add_option("--methods", ss_methods, "mdl|mu|snmf")->delimiter(',');
  ss->add_option("--variants", ss_variants, "plain|smoothed|sparse")->delimiter(',');
  ss->add_option("--baseline-iters", ss_base_iters, "MU/sNMF iteration budget");
  ss->add_option("--warm-noise-rel", ss_warm_noise_rel, "warm-start noise, times the factor std");
  ss->add_option("--threads", ss_threads, "worker pool size");
  ss->add_option("--out", ss_out, "output directory");
  ss->callback([&] {
    SemisynthSpec spec;
    if (!ss_in.input.empty()) spec.input = ss_in.input;
    spec.standin.kind = standin_kind_from_name(ss_standin);
    spec.standin.seed = ss_standin_seed;
    spec.load = ss_in.load_options();
    spec.out_dir = ss_out;
    spec.noise_sigmas = ss_noise;
    spec.r_gen = ss_rgen;
    spec.r_fit = ss_rfit;
    spec.seeds = ss_seeds;
    spec.methods = ss_methods;
    spec.variants.clear();
    for (const auto& v : ss_variants) spec.variants.push_back(parse_variant(v));
    spec.config = ss_solver.to_config(/*rank=*/1, /*seed=*/0);
    spec.baseline_iterations = ss_base_iters;
    spec.warm_noise_rel = ss_warm_noise_rel;
    spec.threads = ss_threads;
    const auto rows = run_semisynth(spec);
    std::cout << "wrote " << ss_out << "/scatter.csv (" << rows.size() << " runs)\n";
  });

  // ---- sweep ----
  auto* sw = app.add_subcommand("sweep", "Factorize across a rank grid");
  InputFlags sw_in;
  sw_in.attach(sw, /*required=*/false);
  SolverFlags sw_solver;
  sw_solver.attach(sw);
  std::string sw_standin = "faces";
  std::uint64_t sw_standin_seed = 0;
  std::vector<int> sw_ranks = {2, 4, 8};
  std::vector<std::uint64_t> sw_seeds = {0};
  int sw_threads = 2;
  std::string sw_out = default_out("sweep");
  sw->add_option("--standin", sw_standin, "stand-in data when --input is absent");
  sw->add_option("--standin-seed", sw_standin_seed, "stand-in generator seed");
  sw->add_option("--ranks", sw_ranks, "rank grid")->delimiter(',');
  sw->add_option("--seeds", sw_seeds, "seeds")->delimiter(',');
  sw->add_option("--threads", sw_threads, "worker pool size");
  sw->add_option("--out", sw_out, "output directory");
  sw->callback([&] {
    SweepSpec spec;
    if (!sw_in.input.empty()) spec.input = sw_in.input;
    spec.standin.kind = standin_kind_from_name(sw_standin);
    spec.standin.seed = sw_standin_seed;
    spec.load = sw_in.load_options();
    spec.out_dir = sw_out;
    spec.ranks = sw_ranks;
    spec.seeds = sw_seeds;
    spec.config = sw_solver.to_config(/*rank=*/1, /*seed=*/0);
    spec.threads = sw_threads;
    run_sweep(spec);
    std::cout << "wrote " << sw_out << "/sweep.csv\n";
  });

  // ---- report ----
  auto* rp = app.add_subcommand("report", "Aggregate a semisynth run into plots");
  std::string rp_in = default_out("semisynth");
  std::string rp_out = default_out("report");
  rp->add_option("--in", rp_in, "directory holding scatter.csv and run traces");
  rp->add_option("--out", rp_out, "output directory");
  rp->callback([&] {
    ReportSpec spec;
    spec.input_dir = rp_in;
    spec.out_dir = rp_out;
    run_report(spec);
    std::cout << "wrote " << rp_out << "\n";
  });

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "Write a desk-scale stand-in dataset");
  std::string gen_kind = "faces";
  long gen_m = 0, gen_n = 0;
  int gen_rank = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out = default_out("gen") + "/V.csv";
  gen->add_option("--kind", gen_kind, "faces|transcriptome|ftse");
  gen->add_option("--m", gen_m, "rows (0 = kind default)");
  gen->add_option("--n", gen_n, "columns (0 = kind default)");
  gen->add_option("--structure-rank", gen_rank, "latent rank of the stand-in");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output CSV path");
  gen->callback([&] {
    StandinSpec spec;
    spec.kind = standin_kind_from_name(gen_kind);
    spec.m = gen_m;
    spec.n = gen_n;
    spec.structure_rank = gen_rank;
    spec.seed = gen_seed;
    const DataMatrix v = make_standin(spec);
    const std::filesystem::path path(gen_out);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    save_matrix(path, v.values, "x");
    std::cout << "wrote " << gen_out << " (" << v.rows() << "x" << v.cols() << ")\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const mdlnmf::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const mdlnmf::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
