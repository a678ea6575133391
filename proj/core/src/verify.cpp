#include "nnmc/verify.hpp"

#include "nnmc/experiments.hpp"
#include "nnmc/parallel.hpp"
#include "nnmc/rng.hpp"
#include "nnmc/sampling.hpp"
#include "nnmc/solver.hpp"
#include "nnmc/svd.hpp"
#include "nnmc/tangent.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nnmc {

double SuiteResult::metric(const std::string& name) const {
  for (const auto& [key, value] : metrics) {
    if (key == name) return value;
  }
  throw std::invalid_argument("SuiteResult: no metric named " + name);
}

std::string to_json(const SuiteResult& result) {
  nlohmann::ordered_json j;
  j["suite"] = result.suite;
  j["trials"] = result.trials;
  j["seed"] = result.seed;
  j["pass"] = result.pass;
  nlohmann::ordered_json metrics;
  for (const auto& [key, value] : result.metrics) metrics[key] = value;
  j["metrics"] = std::move(metrics);
  return j.dump(2);
}

namespace {

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.next_normal();
  return m;
}

void require_trials(int trials) {
  if (trials < 1) {
    throw std::invalid_argument("verification suite: trials must be positive");
  }
}

}  // namespace

SuiteResult run_lemma1_suite(int trials, std::uint64_t seed,
                             unsigned threads) {
  require_trials(trials);
  const double tol = 1e-10;
  std::vector<char> failed(static_cast<std::size_t>(trials), 0);
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t k) {
    Rng rng(Rng::derive(seed, k));
    const Index m = 2 + static_cast<Index>(rng.next_below(7));
    const Index n = 2 + static_cast<Index>(rng.next_below(7));
    const std::size_t count =
        1 + rng.next_below(2 * static_cast<std::uint64_t>(m * n));
    auto pairs = SampleMultiset::uniform(m, n, count, rng.next_u64()).pairs();
    pairs.push_back(pairs.front());  // force at least one duplicate
    const SampleMultiset omega(m, n, std::move(pairs));
    const Matrix z = gaussian_matrix(m, n, rng);
    const Matrix w = gaussian_matrix(m, n, rng);

    const double inner_zz = romega_inner(omega, z, z);
    const double inner_ww = romega_inner(omega, w, w);
    const double inner_zw = romega_inner(omega, z, w);
    const double frob_sq = apply_romega(omega, z).squaredNorm();
    const bool eq12 = inner_zz <= frob_sq + tol;
    const bool eq13 =
        std::abs(inner_zw) <= std::sqrt(inner_zz) * std::sqrt(inner_ww) + tol;
    if (!eq12 || !eq13) failed[k] = 1;
  });
  SuiteResult result;
  result.suite = "lemma1";
  result.trials = trials;
  result.seed = seed;
  int violations = 0;
  for (char f : failed) violations += f;
  result.pass = violations == 0;
  result.metrics = {{"violations", static_cast<double>(violations)},
                    {"tolerance", tol}};
  return result;
}

SuiteResult run_prox_suite(int trials, std::uint64_t seed, unsigned threads) {
  require_trials(trials);
  const double residual_tol = 1e-8;
  std::vector<char> subgrad_failed(static_cast<std::size_t>(trials), 0);
  std::vector<char> perturb_failed(static_cast<std::size_t>(trials), 0);
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t k) {
    Rng rng(Rng::derive(seed, k));
    const Index m = 5, n = 7;
    const double scale = std::pow(10.0, 2.0 * rng.next_double() - 1.0);
    const Matrix z = scale * gaussian_matrix(m, n, rng);
    const double sigma1 = singular_values(z)(0);
    const double tau = (0.05 + 1.2 * rng.next_double()) * sigma1;
    const Matrix x = svt_prox(z, tau);

    const Matrix g = (z - x) / tau;
    const KktResidual res = subgradient_residual(g, x);
    if (res.tangent_gap > residual_tol || res.spectral_slack > residual_tol) {
      subgrad_failed[k] = 1;
    }

    const auto prox_objective = [&](const Matrix& cand) {
      return 0.5 * (cand - z).squaredNorm() + tau * singular_values(cand).sum();
    };
    const double best = prox_objective(x);
    for (int p = 0; p < 50; ++p) {
      Matrix dir = gaussian_matrix(m, n, rng);
      dir /= dir.norm();
      const double radius = std::pow(10.0, -6.0 + 6.0 * rng.next_double()) *
                            std::max(x.norm(), tau);
      if (prox_objective(x + radius * dir) < best - 1e-12 * std::max(1.0, best)) {
        perturb_failed[k] = 1;
        break;
      }
    }
  });
  SuiteResult result;
  result.suite = "prox";
  result.trials = trials;
  result.seed = seed;
  int subgrad = 0, perturb = 0;
  for (char f : subgrad_failed) subgrad += f;
  for (char f : perturb_failed) perturb += f;
  result.pass = subgrad == 0 && perturb == 0;
  result.metrics = {{"subgradient_violations", static_cast<double>(subgrad)},
                    {"perturbation_wins", static_cast<double>(perturb)},
                    {"residual_tolerance", residual_tol}};
  return result;
}

SuiteResult run_thm2_suite(int trials, std::uint64_t seed, unsigned threads,
                           long rows, long cols, long rank,
                           std::size_t omega_size) {
  require_trials(trials);
  std::vector<double> deviation(static_cast<std::size_t>(trials), 0.0);
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t k) {
    const std::uint64_t trial_seed = Rng::derive(seed, k);
    PlantedSpec spec;
    spec.rows = rows;
    spec.cols = cols;
    spec.rank = rank;
    spec.seed = trial_seed;
    const PlantedInstance inst = generate_planted(spec);
    const auto omega = SampleMultiset::uniform(
        rows, cols, omega_size, Rng::derive(trial_seed, 0x517cc1b727220a95ULL));
    deviation[k] =
        pt_romega_pt_deviation(tangent_space(inst.planted), omega);
  });
  int successes = 0;
  double max_dev = 0.0;
  for (double d : deviation) {
    if (d <= 0.5) ++successes;
    max_dev = std::max(max_dev, d);
  }
  const double rate = static_cast<double>(successes) / trials;
  SuiteResult result;
  result.suite = "thm2";
  result.trials = trials;
  result.seed = seed;
  result.pass = rate >= 0.95;
  result.metrics = {{"success_rate", rate},
                    {"required_rate", 0.95},
                    {"max_deviation", max_dev},
                    {"omega_size", static_cast<double>(omega_size)}};
  return result;
}

SuiteResult run_lemma2_suite(int trials, std::uint64_t seed,
                             unsigned threads) {
  require_trials(trials);
  PlantedSpec spec;
  spec.rows = 50;
  spec.cols = 50;
  spec.rank = 3;
  spec.tail.kind = TailSpec::Kind::GaussianScaled;
  spec.tail.epsilon_target = 0.1;
  spec.seed = seed;
  const PlantedInstance inst = generate_planted(spec);
  const Lemma2Result check = lemma2_check(inst.A, spec.rank, 1250, 2.0, trials,
                                          Rng::derive(seed, 1), threads);
  SuiteResult result;
  result.suite = "lemma2";
  result.trials = trials;
  result.seed = seed;
  result.pass = check.violations == 0 && check.size_condition_met;
  result.metrics = {
      {"violations", static_cast<double>(check.violations)},
      {"violation_rate", check.violation_rate},
      {"target_rate", check.threshold},
      {"size_condition_met", check.size_condition_met ? 1.0 : 0.0},
      {"size_condition_rhs", check.size_condition_rhs}};
  return result;
}

SuiteResult run_kkt_suite(int trials, std::uint64_t seed, unsigned threads) {
  require_trials(trials);
  std::vector<char> failed(static_cast<std::size_t>(trials), 0);
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t k) {
    Rng rng(Rng::derive(seed, k));
    const Index m = 4 + static_cast<Index>(rng.next_below(5));
    const Index n = 4 + static_cast<Index>(rng.next_below(5));
    const Matrix a = gaussian_matrix(m, n, rng);
    const auto omega = SampleMultiset::uniform(
        m, n, static_cast<std::size_t>(1.5 * static_cast<double>(m * n)),
        rng.next_u64());
    const ObservationSet obs = observe(a, omega);
    const double romega_a_spectral =
        singular_values(apply_romega(omega, a))(0);

    // tightly solved optimum: residuals at solver-precision scale
    SolverConfig config;
    config.lambda = 0.25 * romega_a_spectral;
    config.max_iters = 20000;
    config.rel_obj_tol = 1e-15;
    const SolverResult sol = solve(obs, config);
    bool ok = sol.kkt.tangent_gap <= 1e-6 * config.lambda &&
              sol.kkt.spectral_slack <= 1e-6;
    ok = ok && objective(obs, sol.B, config.lambda) <=
                   objective(obs, Matrix::Zero(m, n), config.lambda);

    // zero solution is exactly optimal once lambda dominates ||R_Omega(A)||
    const double big_lambda = 1.01 * romega_a_spectral;
    const KktResidual zero_res =
        kkt_residual(obs, Matrix::Zero(m, n), big_lambda);
    ok = ok && zero_res.tangent_gap == 0.0 && zero_res.spectral_slack == 0.0;

    // a random point must be detectably non-optimal
    const Matrix b_bad = 3.0 * gaussian_matrix(m, n, rng);
    const KktResidual bad = kkt_residual(obs, b_bad, config.lambda);
    ok = ok && std::max(bad.tangent_gap, bad.spectral_slack) > 1e-8;

    if (!ok) failed[k] = 1;
  });
  SuiteResult result;
  result.suite = "kkt";
  result.trials = trials;
  result.seed = seed;
  int failures = 0;
  for (char f : failed) failures += f;
  result.pass = failures == 0;
  result.metrics = {{"failures", static_cast<double>(failures)}};
  return result;
}

}  // namespace nnmc
