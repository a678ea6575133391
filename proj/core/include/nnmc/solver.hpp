#pragma once

#include "nnmc/sampling.hpp"
#include "nnmc/svd.hpp"

#include <cstdint>
#include <vector>

namespace nnmc {

struct SolverConfig {
  double lambda = 1.0;
  int max_iters = 5000;    ///< cap on the target-lambda stage
  double rel_obj_tol = 1e-10;
  double step_size = 0.0;  ///< <= 0 means 1 / max_multiplicity (exact Lipschitz)
  bool acceleration = true;
  /// Warm-start through a geometric lambda path from 0.5 ||R_Omega(A)||
  /// down to the target before the final stage. Small lambdas converge
  /// orders of magnitude faster this way; the minimizer is unchanged.
  bool continuation = true;
  std::uint64_t seed = 0;  ///< reserved; the default path draws nothing
};

struct KktResidual {
  double tangent_gap;
  double spectral_slack;
};

struct SolverResult {
  Matrix B;
  std::vector<double> objective_trace;  ///< objective at B_0, B_1, ...
  int iterations = 0;
  KktResidual kkt{0.0, 0.0};
  bool converged = false;
};

/// (1/2) sum over the multiset of (B_ij - A_ij)^2 + lambda ||B||_*,
/// duplicates each contributing a term.
double objective(const ObservationSet& obs, const Matrix& b, double lambda);

/// Gradient of the smooth part: R_Omega(B - A). Its Lipschitz constant is
/// the max multiplicity of the sample.
Matrix gradient(const ObservationSet& obs, const Matrix& b);

/// Prox of tau ||.||_*: soft-thresholds the singular values of z.
Matrix svt_prox(const Matrix& z, double tau);

/// Proximal gradient (FISTA by default, ISTA when acceleration is off)
/// starting from B = 0, optionally through the continuation path. The
/// objective trace covers the target-lambda stage, which stops when the
/// relative objective change drops below rel_obj_tol or after max_iters
/// steps; non-convergence is reported, not thrown. `iterations` counts
/// every prox step taken, warm stages included. The KKT residual is
/// evaluated at the final iterate.
SolverResult solve(const ObservationSet& obs, const SolverConfig& config);

/// Distance of G from the nuclear-norm subdifferential at B. The tangent
/// space of B keeps singular triplets with sigma_k > 1e-8 * sigma_1.
/// tangent_gap = ||P_T(G) - U V^T||_F over that space,
/// spectral_slack = max(0, ||P_Tperp(G)|| - 1). Both vanish exactly when
/// G is a subgradient.
KktResidual subgradient_residual(const Matrix& g, const Matrix& b);

/// Residual of the first-order optimality condition of the regularized
/// problem at B: applies subgradient_residual to -R_Omega(B - A) / lambda.
KktResidual kkt_residual(const ObservationSet& obs, const Matrix& b,
                         double lambda);

/// lambda = (2 |Omega| eps / (mn)) sqrt(2 / (3 r log(2n))); returns 0 when
/// eps = 0 (callers substitute lambda_floor to keep the problem well posed).
double select_lambda(Index m, Index n, Index r, std::size_t omega_size,
                     double epsilon);

/// 1e-6 times the rms of the observed values (1e-12 when all are zero).
double lambda_floor(const std::vector<double>& observed_values);

}  // namespace nnmc
