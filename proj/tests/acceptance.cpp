// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run a subset by listing criterion numbers as arguments.

#include <nnmc/bounds.hpp>
#include <nnmc/experiments.hpp>
#include <nnmc/rng.hpp>
#include <nnmc/solver.hpp>
#include <nnmc/verify.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace nnmc;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// ---- criterion 4/5/8 share one sweep --------------------------------------

struct DominanceRun {
  std::vector<ExperimentRecord> records;
  std::vector<SweepCellSummary> cells;
  int converged = 0;
};

const DominanceRun& dominance_run() {
  static const DominanceRun run = [] {
    PlantedSpec spec;
    spec.rows = 100;
    spec.cols = 100;
    spec.rank = 5;
    spec.spectrum.top = 1.0;  // sigma_r = 1
    spec.tail.kind = TailSpec::Kind::GaussianScaled;
    spec.tail.epsilon_target = 0.05;
    spec.seed = 0xACCE55;
    TrialOptions opts;
    opts.beta = 2.0;
    opts.max_iters = 6000;
    opts.rel_obj_tol = 1e-12;
    DominanceRun out;
    out.records = sweep(spec, {3000, 5000, 8000}, LambdaRule::corollary1(),
                        50, 0xC4C4, opts);
    out.cells = summarize_sweep(out.records);
    for (const auto& rec : out.records) {
      if (rec.converged) ++out.converged;
    }
    return out;
  }();
  return run;
}

// ---- criteria -------------------------------------------------------------

Outcome criterion1() {
  const double t0 = now_seconds();
  const SuiteResult res = run_lemma1_suite(1000, 0xC1);
  const double elapsed = now_seconds() - t0;
  std::ostringstream detail;
  detail << "1000 random multiset triples, "
         << static_cast<int>(res.metric("violations"))
         << " violations at tol 1e-10, " << elapsed << "s";
  return {res.pass && elapsed < 10.0, detail.str()};
}

Outcome criterion2() {
  const double t0 = now_seconds();
  const SuiteResult res = run_prox_suite(200, 0xC2);
  const double elapsed = now_seconds() - t0;
  std::ostringstream detail;
  detail << "200 random 5x7 prox instances, "
         << static_cast<int>(res.metric("subgradient_violations"))
         << " subgradient violations, "
         << static_cast<int>(res.metric("perturbation_wins"))
         << " perturbation wins, " << elapsed << "s";
  return {res.pass && elapsed < 10.0, detail.str()};
}

Outcome criterion3() {
  const double t0 = now_seconds();
  PlantedSpec spec;
  spec.rows = 50;
  spec.cols = 60;
  spec.rank = 3;
  spec.seed = 0xC3C3;
  TrialOptions opts;
  opts.max_iters = 5000;
  opts.rel_obj_tol = 1e-12;
  const auto records =
      sweep(spec, {1800}, LambdaRule::corollary1(), 100, 0x3333, opts);
  int hits = 0;
  for (const auto& rec : records) {
    if (rec.measured_full / rec.a_frobenius <= 1e-3) ++hits;
  }
  const double elapsed = now_seconds() - t0;
  std::ostringstream detail;
  detail << hits << "/100 seeds recovered to 1e-3 relative error (need 95), "
         << elapsed << "s";
  return {hits >= 95 && elapsed < 300.0, detail.str()};
}

Outcome criterion4() {
  const double t0 = now_seconds();
  const DominanceRun& run = dominance_run();
  int perp_violations = 0;
  int tangent_violations = 0;
  for (const auto& rec : run.records) {
    if (!rec.converged) continue;
    if (rec.measured_perp > rec.bounds.cor1_perp) ++perp_violations;
    if (rec.measured_tangent > rec.bounds.cor1_tangent) ++tangent_violations;
  }
  const double elapsed = now_seconds() - t0;
  std::ostringstream detail;
  detail << run.converged << "/150 converged; bound violations: perp "
         << perp_violations << ", tangent " << tangent_violations << "; "
         << elapsed << "s";
  return {run.converged > 0 && perp_violations == 0 &&
              tangent_violations == 0 && elapsed < 1200.0,
          detail.str()};
}

Outcome criterion5() {
  const DominanceRun& run = dominance_run();
  const auto& cells = run.cells;
  int inversions = 0;
  for (std::size_t k = 1; k < cells.size(); ++k) {
    if (cells[k].median_ratio > cells[k - 1].median_ratio) ++inversions;
  }
  // least-squares slope of log(median ratio) against log(omega)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& cell : cells) {
    const double x = std::log(static_cast<double>(cell.omega_size));
    const double y = std::log(cell.median_ratio);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double count = static_cast<double>(cells.size());
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  std::ostringstream detail;
  detail << "median total/eps over omega {3000,5000,8000}: ";
  for (const auto& cell : cells) detail << cell.median_ratio << " ";
  detail << "(" << inversions << " inversions, slope " << slope << ")";
  return {inversions <= 1 && slope < 0.0, detail.str()};
}

Outcome criterion6() {
  const double t0 = now_seconds();
  const SuiteResult res = run_thm2_suite(100, 0xC6);
  const double elapsed = now_seconds() - t0;
  std::ostringstream detail;
  detail << "deviation <= 1/2 in " << 100.0 * res.metric("success_rate")
         << "% of 100 trials (need 95%), max "
         << res.metric("max_deviation") << ", " << elapsed << "s";
  return {res.pass && elapsed < 300.0, detail.str()};
}

Outcome criterion7() {
  const double t0 = now_seconds();
  const SuiteResult res = run_lemma2_suite(1000, 0xC7);
  const double elapsed = now_seconds() - t0;
  std::ostringstream detail;
  detail << static_cast<int>(res.metric("violations"))
         << " violations in 1000 trials (target rate "
         << res.metric("target_rate") << "), size condition "
         << (res.metric("size_condition_met") == 1.0 ? "met" : "NOT met")
         << ", " << elapsed << "s";
  return {res.pass && elapsed < 120.0, detail.str()};
}

Outcome criterion8() {
  const DominanceRun& run = dominance_run();
  int checked = 0;
  int violations = 0;
  double worst = 0.0;
  for (const auto& rec : run.records) {
    if (!rec.converged) continue;
    ++checked;
    const double slack_allow = 1e-6 * (1.0 + std::abs(rec.thm3_rhs));
    const double slack = rec.thm3_lhs - rec.thm3_rhs;
    worst = std::max(worst, slack);
    if (slack > slack_allow) ++violations;
  }
  std::ostringstream detail;
  detail << "optimality inequality at " << checked << " converged solutions, "
         << violations << " violations, worst slack " << worst;
  return {checked > 0 && violations == 0, detail.str()};
}

Outcome criterion9() {
  const double t0 = now_seconds();
  bool ok = true;
  std::ostringstream detail;
  const auto expect = [&](double got, double want, const char* what) {
    if (std::abs(got - want) > 1e-6 * std::max(1.0, std::abs(want))) {
      ok = false;
      detail << what << " got " << got << " want " << want << "; ";
    }
  };

  BoundInputs in;
  in.rows = 100;
  in.cols = 100;
  in.rank = 5;
  in.omega_size = 5000;
  in.beta = 2.0;
  in.epsilon = 1.0;
  in.lambda = 0.1;
  in.perp_norm = 0.0;
  expect(theorem1_bounds(in).perp, 55.89495209964411, "thm1 perp");
  const Corollary1Bounds c1 = corollary1_bounds(in);
  expect(c1.perp, 50.43007372533831, "cor1 perp");
  expect(c1.tangent, 13972.459174984333, "cor1 tangent");
  expect(gamma_bound(in), 1.1986869012455514, "gamma");
  expect(select_lambda(100, 100, 5, 2000, 0.1), 0.006345420031365487,
         "select_lambda");

  CoherenceProfile profile;
  profile.mu0 = 1.0;
  profile.mu1 = 1.0;
  profile.rank = 5;
  profile.rows = 100;
  profile.cols = 100;
  expect(required_sample_size(profile, {0.0, 0.0}, 2.0).bound1,
         6400454.05699951, "required bound1");
  expect(required_sample_size(profile, {0.01, 0.1}, 2.0).bound2,
         2456.090765860315, "required bound2");

  // the analytic minimizer of the theorem-1 perp bound IS the selection rule
  Rng rng(0xC9);
  double worst_ratio_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index m = 10 + static_cast<Index>(rng.next_below(490));
    const Index n = 10 + static_cast<Index>(rng.next_below(490));
    const Index r = 1 + static_cast<Index>(rng.next_below(10));
    const std::size_t omega =
        10 + rng.next_below(static_cast<std::uint64_t>(m) * n - 10);
    const double eps = 1e-3 + 10.0 * rng.next_double();
    const double mn = static_cast<double>(m) * static_cast<double>(n);
    const double lambda_star = std::sqrt(
        8.0 * eps * eps * static_cast<double>(omega) *
        static_cast<double>(omega) /
        (3.0 * mn * mn * static_cast<double>(r) *
         std::log(2.0 * static_cast<double>(n))));
    const double ratio = lambda_star / select_lambda(m, n, r, omega, eps);
    worst_ratio_err = std::max(worst_ratio_err, std::abs(ratio - 1.0));
  }
  if (worst_ratio_err > 1e-9) {
    ok = false;
    detail << "optimal-lambda ratio drift " << worst_ratio_err << "; ";
  }
  const double elapsed = now_seconds() - t0;
  detail << "formula calculators match frozen oracles, ratio drift "
         << worst_ratio_err << ", " << elapsed << "s";
  return {ok && elapsed < 1.0, detail.str()};
}

Outcome criterion10() {
  PlantedSpec spec;
  spec.rows = 20;
  spec.cols = 24;
  spec.rank = 2;
  spec.tail.kind = TailSpec::Kind::GaussianScaled;
  spec.tail.epsilon_target = 0.05;
  spec.seed = 0xD10;
  TrialOptions opts;
  opts.max_iters = 1200;
  const auto serial =
      sweep(spec, {150, 240}, LambdaRule::corollary1(), 3, 0xD11, opts, 1);
  const auto threaded =
      sweep(spec, {150, 240}, LambdaRule::corollary1(), 3, 0xD11, opts, 2);
  const bool csv_same = records_to_csv(serial) == records_to_csv(threaded);
  const bool json_same = records_to_json(serial) == records_to_json(threaded);
  const bool suite_same = to_json(run_lemma1_suite(200, 0xD12, 1)) ==
                          to_json(run_lemma1_suite(200, 0xD12, 2));
  const bool rerun_same =
      records_to_csv(sweep(spec, {150, 240}, LambdaRule::corollary1(), 3,
                           0xD11, opts, 2)) == records_to_csv(serial);
  std::ostringstream detail;
  detail << "csv " << (csv_same ? "identical" : "DIFFERS") << ", json "
         << (json_same ? "identical" : "DIFFERS") << ", suite json "
         << (suite_same ? "identical" : "DIFFERS") << ", rerun "
         << (rerun_same ? "identical" : "DIFFERS")
         << " across 1 and 2 workers";
  return {csv_same && json_same && suite_same && rerun_same, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8},
      {9, criterion9}, {10, criterion10},
  };
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome outcome{false, "exception"};
    try {
      outcome = fn();
    } catch (const std::exception& e) {
      outcome.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s\n", outcome.pass ? "PASS" : "FAIL", id,
                outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures;
}
