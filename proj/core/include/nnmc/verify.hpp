#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace nnmc {

/// Outcome of one Monte-Carlo verification suite. Metrics keep insertion
/// order so the JSON form is stable.
struct SuiteResult {
  std::string suite;
  int trials = 0;
  std::uint64_t seed = 0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> metrics;

  double metric(const std::string& name) const;
};

std::string to_json(const SuiteResult& result);

/// Multiset inner-product inequalities on random (Omega, Z, W) triples with
/// duplicates forced; exact up to 1e-10.
SuiteResult run_lemma1_suite(int trials, std::uint64_t seed,
                             unsigned threads = 0);

/// Subgradient optimality of the singular-value soft-threshold on random
/// 5x7 inputs, plus a beats-random-perturbations objective check.
SuiteResult run_prox_suite(int trials, std::uint64_t seed,
                           unsigned threads = 0);

/// Concentration of (mn/|Omega|) P_T R_Omega P_T around P_T for planted
/// incoherent rank-2 40x40 instances at |Omega| = 800; passes when the
/// deviation stays <= 1/2 in at least 95% of trials. The geometry can be
/// overridden for small smoke runs.
SuiteResult run_thm2_suite(int trials, std::uint64_t seed,
                           unsigned threads = 0, long rows = 40,
                           long cols = 40, long rank = 2,
                           std::size_t omega_size = 800);

/// Tail concentration bound at the 50x50, |Omega| = 1250, beta = 2 setup
/// with a Gaussian tail flat enough that the sample-size condition holds;
/// passes on zero violations.
SuiteResult run_lemma2_suite(int trials, std::uint64_t seed,
                             unsigned threads = 0);

/// KKT residual behavior: near-zero residuals at tightly solved optima and
/// at the exact zero-solution regime, strictly positive residuals at
/// non-optimal points.
SuiteResult run_kkt_suite(int trials, std::uint64_t seed,
                          unsigned threads = 0);

}  // namespace nnmc
