#pragma once

#include "nnmc/bounds.hpp"
#include "nnmc/sampling.hpp"
#include "nnmc/solver.hpp"
#include "nnmc/tangent.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nnmc {

struct SpectrumSpec {
  enum class Kind { Flat, Geometric };
  Kind kind = Kind::Flat;
  double top = 1.0;
  double ratio = 1.0;  ///< per-step decay for Geometric, in (0, 1]
};

struct TailSpec {
  enum class Kind { None, GaussianScaled };
  Kind kind = Kind::None;
  double epsilon_target = 0.0;
};

/// Synthetic instance description. Factors are Haar-distributed (QR of a
/// Gaussian matrix with sign-fixed diagonal).
struct PlantedSpec {
  Index rows = 0;
  Index cols = 0;
  Index rank = 0;
  SpectrumSpec spectrum;
  TailSpec tail;
  std::uint64_t seed = 0;
};

struct PlantedInstance {
  Matrix A;
  TruncatedSvd planted;  ///< the rank-r part; equals truncate(A, rank)
  double epsilon;        ///< ||A - A_r||_F, exact by construction
  CoherenceProfile coherence;
};

/// The tail is projected onto the orthogonal complement of the planted
/// factors and rescaled to hit epsilon_target exactly, so the planted part
/// is the best rank-r approximation whenever epsilon_target < sigma_r
/// (enforced; larger targets are rejected).
PlantedInstance generate_planted(const PlantedSpec& spec);

struct LambdaRule {
  bool use_corollary1 = true;
  double fixed_value = 0.0;

  static LambdaRule corollary1() { return {true, 0.0}; }
  static LambdaRule fixed(double value) { return {false, value}; }
};

struct TrialOptions {
  double beta = 2.0;
  int max_iters = 5000;
  double rel_obj_tol = 1e-10;
};

struct ExperimentRecord {
  PlantedSpec spec;
  std::size_t omega_size = 0;
  std::uint64_t omega_seed = 0;
  double lambda_used = 0.0;
  double epsilon = 0.0;
  double a_frobenius = 0.0;
  double measured_perp = 0.0;     ///< ||P_Tperp(B*)||_F
  double measured_tangent = 0.0;  ///< ||P_T(A_r - B*)||_F
  double measured_total = 0.0;    ///< ||A_r - B*||_F
  double measured_full = 0.0;     ///< ||A - B*||_F
  double thm3_lhs = 0.0;  ///< lambda <B*-A_r, UV^T> + lambda ||P_Tperp(B*)||_*
  double thm3_rhs = 0.0;  ///< <R_Omega(B*-A), A_r-B*>
  BoundReport bounds;
  bool converged = false;
  int iterations = 0;
  KktResidual kkt{0.0, 0.0};
  double runtime_ms = 0.0;  ///< wall time; excluded from CSV/JSON output
};

/// One end-to-end experiment: plant (from spec.seed), sample Omega (from
/// omega_seed), solve, measure the error split against the planted rank-r
/// part, and evaluate every bound. Deterministic given the two seeds.
ExperimentRecord run_trial(const PlantedSpec& spec, std::size_t omega_size,
                           const LambdaRule& rule, std::uint64_t omega_seed,
                           const TrialOptions& opts = {});

/// Grid of omega sizes, trials_per_cell trials each. Trial g (global index,
/// cell-major) plants from spec.seed ^ g and samples from seed ^ g, so
/// records are a pure function of (spec, grid, seed) for any worker count.
std::vector<ExperimentRecord> sweep(const PlantedSpec& spec,
                                    const std::vector<std::size_t>& omega_grid,
                                    const LambdaRule& rule,
                                    int trials_per_cell, std::uint64_t seed,
                                    const TrialOptions& opts = {},
                                    unsigned threads = 0);

/// Per-cell summary of a sweep: median of measured_total / epsilon when
/// epsilon > 0 in every trial of the cell, otherwise median absolute error.
struct SweepCellSummary {
  std::size_t omega_size;
  double median_ratio;    ///< NaN when any epsilon in the cell is 0
  double median_absolute; ///< median measured_total
};

std::vector<SweepCellSummary> summarize_sweep(
    const std::vector<ExperimentRecord>& records);

/// Flat CSV, one row per record (runtime excluded); bit-identical for
/// identical inputs.
std::string records_to_csv(const std::vector<ExperimentRecord>& records);

/// JSON sidecar with the full bound reports.
std::string records_to_json(const std::vector<ExperimentRecord>& records);

PlantedSpec planted_spec_from_json(const std::string& text);
std::string to_json(const PlantedSpec& spec);

}  // namespace nnmc
