// nnmc: planted-instance generation, sampling, nuclear-norm regularized
// completion, coherence and bound calculators, and Monte-Carlo verification
// suites. Exit codes: 0 success, 1 invalid arguments, 2 verification failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <nnmc/experiments.hpp>
#include <nnmc/matrix.hpp>
#include <nnmc/parallel.hpp>
#include <nnmc/sampling.hpp>
#include <nnmc/solver.hpp>
#include <nnmc/svd.hpp>
#include <nnmc/tangent.hpp>
#include <nnmc/verify.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitVerifyFailed = 2;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << '\n';
  } else {
    write_text(out_path, text + "\n");
  }
}

nnmc::PlantedSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return nnmc::planted_spec_from_json(buffer.str());
}

std::vector<std::size_t> parse_grid(const std::string& text) {
  std::vector<std::size_t> grid;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    std::size_t pos = 0;
    const unsigned long long value = std::stoull(token, &pos);
    if (pos != token.size() || value == 0) {
      throw std::invalid_argument("bad omega grid entry '" + token + "'");
    }
    grid.push_back(static_cast<std::size_t>(value));
  }
  if (grid.empty()) throw std::invalid_argument("empty omega grid");
  return grid;
}

struct GenArgs {
  long m = 0, n = 0, r = 0;
  std::string spectrum = "flat";
  double top = 1.0;
  double ratio = 1.0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::string out_matrix;
  std::string out_meta;
};

int run_gen(const GenArgs& args) {
  nnmc::PlantedSpec spec;
  spec.rows = args.m;
  spec.cols = args.n;
  spec.rank = args.r;
  spec.spectrum.kind = args.spectrum == "flat"
                           ? nnmc::SpectrumSpec::Kind::Flat
                           : nnmc::SpectrumSpec::Kind::Geometric;
  spec.spectrum.top = args.top;
  spec.spectrum.ratio = args.ratio;
  spec.tail.kind = args.eps > 0.0 ? nnmc::TailSpec::Kind::GaussianScaled
                                  : nnmc::TailSpec::Kind::None;
  spec.tail.epsilon_target = args.eps;
  spec.seed = args.seed;

  const nnmc::PlantedInstance inst = nnmc::generate_planted(spec);
  nnmc::write_matrix_csv(inst.A, args.out_matrix);

  nlohmann::ordered_json meta;
  meta["spec"] = nlohmann::ordered_json::parse(nnmc::to_json(spec));
  meta["epsilon"] = inst.epsilon;
  meta["mu0"] = inst.coherence.mu0;
  meta["mu1"] = inst.coherence.mu1;
  std::vector<double> sigma(inst.planted.sigma.data(),
                            inst.planted.sigma.data() + inst.planted.rank());
  meta["sigma"] = sigma;
  meta["a_frobenius"] = inst.A.norm();
  if (!args.out_meta.empty()) write_text(args.out_meta, meta.dump(2) + "\n");
  std::cerr << "wrote " << args.m << "x" << args.n << " matrix to "
            << args.out_matrix << " (epsilon=" << inst.epsilon << ")\n";
  return kExitOk;
}

struct SampleArgs {
  std::string matrix;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_sample(const SampleArgs& args) {
  const nnmc::Matrix a = nnmc::read_matrix_csv(args.matrix);
  const auto omega =
      nnmc::SampleMultiset::uniform(a.rows(), a.cols(), args.count, args.seed);
  nnmc::write_observations(nnmc::observe(a, omega), args.out);
  std::cerr << "wrote " << args.count << " observations to " << args.out
            << " (max multiplicity " << omega.max_multiplicity() << ")\n";
  return kExitOk;
}

struct SolveArgs {
  std::string obs;
  std::string lambda = "auto";
  double eps = 0.0;
  long r = 0;
  int max_iters = 5000;
  double tol = 1e-10;
  bool no_acceleration = false;
  std::string out_b;
  std::string out_result;
};

int run_solve(const SolveArgs& args) {
  const nnmc::ObservationSet obs = nnmc::read_observations(args.obs);
  double lambda = 0.0;
  if (args.lambda == "auto") {
    if (args.r < 1) {
      throw std::invalid_argument("--lambda auto needs --r (and --eps)");
    }
    lambda = nnmc::select_lambda(obs.sample().rows(), obs.sample().cols(),
                                 args.r, obs.sample().size(), args.eps);
    if (lambda <= 0.0) lambda = nnmc::lambda_floor(obs.values());
  } else {
    lambda = std::stod(args.lambda);
    if (!(lambda > 0.0)) {
      throw std::invalid_argument("--lambda must be positive");
    }
  }
  nnmc::SolverConfig config;
  config.lambda = lambda;
  config.max_iters = args.max_iters;
  config.rel_obj_tol = args.tol;
  config.acceleration = !args.no_acceleration;
  const nnmc::SolverResult res = nnmc::solve(obs, config);
  if (!args.out_b.empty()) nnmc::write_matrix_csv(res.B, args.out_b);

  nlohmann::ordered_json j;
  j["lambda"] = lambda;
  j["iterations"] = res.iterations;
  j["objective"] = res.objective_trace.back();
  j["kkt"] = {{"tangent_gap", res.kkt.tangent_gap},
              {"spectral_slack", res.kkt.spectral_slack}};
  j["converged"] = res.converged;
  emit(j.dump(2), args.out_result);
  return kExitOk;
}

struct CoherenceArgs {
  std::string matrix;
  long r = 0;
  double beta = 2.0;
  bool constant32 = false;
  std::string out;
};

int run_coherence(const CoherenceArgs& args) {
  const nnmc::Matrix a = nnmc::read_matrix_csv(args.matrix);
  const nnmc::TruncatedSvd top = nnmc::truncate(a, args.r);
  const nnmc::CoherenceProfile profile =
      nnmc::coherence(nnmc::tangent_space(top));
  const nnmc::Matrix residual = a - nnmc::reconstruct(top);
  nnmc::TailStats tail;
  tail.frobenius_residual = residual.norm();
  tail.max_abs_residual = residual.cwiseAbs().maxCoeff();
  const auto req =
      nnmc::required_sample_size(profile, tail, args.beta, args.constant32);

  nlohmann::ordered_json j;
  j["mu0"] = profile.mu0;
  j["mu1"] = profile.mu1;
  j["r"] = args.r;
  j["beta"] = args.beta;
  j["epsilon"] = tail.frobenius_residual;
  j["required_sample_size"] = {{"bound1", req.bound1},
                               {"bound2", req.bound2},
                               {"required", req.required}};
  emit(j.dump(2), args.out);
  return kExitOk;
}

struct BoundsArgs {
  long m = 0, n = 0, r = 0;
  std::size_t omega = 0;
  double beta = 2.0;
  double eps = 0.0;
  double lambda = 0.0;
  double perp_norm = 0.0;
  std::optional<double> sampled_residual;
  std::optional<double> spectral_noise;
  double max_abs_ar = 0.0;
  std::string out;
};

int run_bounds(const BoundsArgs& args) {
  nnmc::BoundInputs in;
  in.rows = args.m;
  in.cols = args.n;
  in.rank = args.r;
  in.omega_size = args.omega;
  in.beta = args.beta;
  in.epsilon = args.eps;
  in.lambda = args.lambda;
  in.perp_norm = args.perp_norm;
  nnmc::CompetitorExtras extras;
  // concentration plug-in when no measured residual is supplied
  extras.sampled_residual =
      args.sampled_residual.value_or(args.eps *
                                     std::sqrt(2.0 * args.omega /
                                               (static_cast<double>(args.m) *
                                                args.n)));
  extras.spectral_noise = args.spectral_noise.value_or(args.eps);
  extras.max_abs_ar = args.max_abs_ar;
  const nnmc::BoundReport report =
      nnmc::make_bound_report(in, extras, nnmc::MeasuredErrors{});
  emit(nnmc::to_json(report), args.out);
  return kExitOk;
}

struct VerifyArgs {
  std::string suite;
  int trials = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  long m = 40, n = 40, r = 2;
  std::size_t omega = 800;
  std::string out;
};

int run_verify(const VerifyArgs& args) {
  nnmc::SuiteResult result;
  if (args.suite == "lemma1") {
    result = nnmc::run_lemma1_suite(args.trials, args.seed, args.threads);
  } else if (args.suite == "lemma2") {
    result = nnmc::run_lemma2_suite(args.trials, args.seed, args.threads);
  } else if (args.suite == "thm2") {
    result = nnmc::run_thm2_suite(args.trials, args.seed, args.threads,
                                  args.m, args.n, args.r, args.omega);
  } else if (args.suite == "prox") {
    result = nnmc::run_prox_suite(args.trials, args.seed, args.threads);
  } else if (args.suite == "kkt") {
    result = nnmc::run_kkt_suite(args.trials, args.seed, args.threads);
  } else {
    throw std::invalid_argument("unknown suite '" + args.suite + "'");
  }
  emit(nnmc::to_json(result), args.out);
  return result.pass ? kExitOk : kExitVerifyFailed;
}

struct SweepArgs {
  std::string spec_file;
  std::string omega_grid;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string lambda = "auto";
  double beta = 2.0;
  int max_iters = 5000;
  double tol = 1e-10;
  unsigned threads = 0;
};

int run_sweep(const SweepArgs& args) {
  const nnmc::PlantedSpec spec = load_spec_file(args.spec_file);
  const std::vector<std::size_t> grid = parse_grid(args.omega_grid);
  nnmc::LambdaRule rule = nnmc::LambdaRule::corollary1();
  if (args.lambda != "auto") {
    const double value = std::stod(args.lambda);
    if (!(value > 0.0)) throw std::invalid_argument("--lambda must be positive");
    rule = nnmc::LambdaRule::fixed(value);
  }
  nnmc::TrialOptions opts;
  opts.beta = args.beta;
  opts.max_iters = args.max_iters;
  opts.rel_obj_tol = args.tol;
  const auto records =
      nnmc::sweep(spec, grid, rule, args.trials, args.seed, opts, args.threads);
  write_text(args.out, nnmc::records_to_csv(records));
  write_text(args.out + ".json", nnmc::records_to_json(records) + "\n");

  for (const auto& cell : nnmc::summarize_sweep(records)) {
    std::cerr << "omega " << cell.omega_size << ": median "
              << (std::isnan(cell.median_ratio) ? "|A_r - B|" : "ratio")
              << " = "
              << (std::isnan(cell.median_ratio) ? cell.median_absolute
                                                : cell.median_ratio)
              << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nuclear-norm regularized matrix completion toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a planted matrix");
  gen_cmd->add_option("--m", gen.m, "rows")->required();
  gen_cmd->add_option("--n", gen.n, "cols")->required();
  gen_cmd->add_option("--r", gen.r, "planted rank")->required();
  gen_cmd->add_option("--spectrum", gen.spectrum, "flat|geometric")
      ->check(CLI::IsMember({"flat", "geometric"}));
  gen_cmd->add_option("--top", gen.top, "top singular value");
  gen_cmd->add_option("--ratio", gen.ratio, "geometric decay ratio");
  gen_cmd->add_option("--eps", gen.eps, "tail Frobenius norm target");
  gen_cmd->add_option("--seed", gen.seed, "rng seed");
  gen_cmd->add_option("--out-matrix", gen.out_matrix, "matrix CSV path")
      ->required();
  gen_cmd->add_option("--out-meta", gen.out_meta, "meta JSON path");

  SampleArgs sample;
  auto* sample_cmd =
      app.add_subcommand("sample", "sample entries uniformly with replacement");
  sample_cmd->add_option("--matrix", sample.matrix, "matrix CSV")->required();
  sample_cmd->add_option("--count", sample.count, "number of draws")
      ->required();
  sample_cmd->add_option("--seed", sample.seed, "rng seed");
  sample_cmd->add_option("--out", sample.out, "observation file")->required();

  SolveArgs solve_args;
  auto* solve_cmd =
      app.add_subcommand("solve", "solve the regularized completion problem");
  solve_cmd->add_option("--obs", solve_args.obs, "observation file")
      ->required();
  solve_cmd->add_option("--lambda", solve_args.lambda,
                        "positive value or 'auto'");
  solve_cmd->add_option("--eps", solve_args.eps,
                        "||A - A_r||_F for the auto rule");
  solve_cmd->add_option("--r", solve_args.r, "target rank for the auto rule");
  solve_cmd->add_option("--max-iters", solve_args.max_iters, "iteration cap");
  solve_cmd->add_option("--tol", solve_args.tol,
                        "relative objective-change stop");
  solve_cmd->add_flag("--no-acceleration", solve_args.no_acceleration,
                      "plain proximal gradient");
  solve_cmd->add_option("--out-b", solve_args.out_b, "solution CSV path");
  solve_cmd->add_option("--out-result", solve_args.out_result,
                        "result JSON path (default stdout)");

  CoherenceArgs coh;
  auto* coh_cmd =
      app.add_subcommand("coherence", "coherence and sample-size requirement");
  coh_cmd->add_option("--matrix", coh.matrix, "matrix CSV")->required();
  coh_cmd->add_option("--r", coh.r, "rank")->required();
  coh_cmd->add_option("--beta", coh.beta, "confidence parameter");
  coh_cmd->add_flag("--constant32", coh.constant32,
                    "use the concentration-only constant 32");
  coh_cmd->add_option("--out", coh.out, "JSON path (default stdout)");

  BoundsArgs bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "evaluate recovery bounds");
  bounds_cmd->add_option("--m", bounds.m, "rows")->required();
  bounds_cmd->add_option("--n", bounds.n, "cols")->required();
  bounds_cmd->add_option("--r", bounds.r, "rank")->required();
  bounds_cmd->add_option("--omega", bounds.omega, "sample size")->required();
  bounds_cmd->add_option("--beta", bounds.beta, "confidence parameter");
  bounds_cmd->add_option("--eps", bounds.eps, "||A - A_r||_F");
  bounds_cmd->add_option("--lambda", bounds.lambda, "regularization weight")
      ->required();
  bounds_cmd->add_option("--perp-norm", bounds.perp_norm,
                         "measured ||P_Tperp(B*)||_F");
  bounds_cmd->add_option("--sampled-residual", bounds.sampled_residual,
                         "override the concentration plug-in residual");
  bounds_cmd->add_option("--spectral-noise", bounds.spectral_noise,
                         "override the spectral noise proxy");
  bounds_cmd->add_option("--max-abs-ar", bounds.max_abs_ar, "||A_r||_inf");
  bounds_cmd->add_option("--out", bounds.out, "JSON path (default stdout)");

  VerifyArgs verify;
  auto* verify_cmd =
      app.add_subcommand("verify", "run a Monte-Carlo verification suite");
  verify_cmd
      ->add_option("--suite", verify.suite, "lemma1|lemma2|thm2|prox|kkt")
      ->required()
      ->check(CLI::IsMember({"lemma1", "lemma2", "thm2", "prox", "kkt"}));
  verify_cmd->add_option("--trials", verify.trials, "trial count")->required();
  verify_cmd->add_option("--seed", verify.seed, "rng seed");
  verify_cmd->add_option("--threads", verify.threads, "worker count");
  verify_cmd->add_option("--m", verify.m, "thm2 rows");
  verify_cmd->add_option("--n", verify.n, "thm2 cols");
  verify_cmd->add_option("--r", verify.r, "thm2 rank");
  verify_cmd->add_option("--omega", verify.omega, "thm2 sample size");
  verify_cmd->add_option("--out", verify.out, "JSON path (default stdout)");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "bound-vs-measured sweep");
  sweep_cmd->add_option("--spec", sweep_args.spec_file, "planted spec JSON")
      ->required();
  sweep_cmd->add_option("--omega-grid", sweep_args.omega_grid,
                        "comma-separated sample sizes")
      ->required();
  sweep_cmd->add_option("--trials", sweep_args.trials, "trials per cell")
      ->required();
  sweep_cmd->add_option("--seed", sweep_args.seed, "rng seed");
  sweep_cmd->add_option("--out", sweep_args.out, "CSV path")->required();
  sweep_cmd->add_option("--lambda", sweep_args.lambda,
                        "'auto' (corollary rule) or a fixed value");
  sweep_cmd->add_option("--beta", sweep_args.beta, "confidence parameter");
  sweep_cmd->add_option("--max-iters", sweep_args.max_iters, "iteration cap");
  sweep_cmd->add_option("--tol", sweep_args.tol, "solver tolerance");
  sweep_cmd->add_option("--threads", sweep_args.threads, "worker count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (gen_cmd->parsed()) return run_gen(gen);
    if (sample_cmd->parsed()) return run_sample(sample);
    if (solve_cmd->parsed()) return run_solve(solve_args);
    if (coh_cmd->parsed()) return run_coherence(coh);
    if (bounds_cmd->parsed()) return run_bounds(bounds);
    if (verify_cmd->parsed()) return run_verify(verify);
    if (sweep_cmd->parsed()) return run_sweep(sweep_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}
