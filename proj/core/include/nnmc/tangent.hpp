#pragma once

#include "nnmc/sampling.hpp"
#include "nnmc/svd.hpp"

#include <cstdint>

namespace nnmc {

/// Row and column spaces of a rank-r reference matrix. P_T and P_Tperp act
/// on m-by-n matrices through the factors; both are invariant under sign
/// flips of matching (u_k, v_k) columns.
struct TangentSpace {
  Matrix U;  ///< m-by-r, orthonormal columns
  Matrix V;  ///< n-by-r, orthonormal columns
};

TangentSpace tangent_space(const TruncatedSvd& f);

/// P_T(Z) = P_U Z + Z P_V - P_U Z P_V.
Matrix project_t(const TangentSpace& ts, const Matrix& z);

/// P_Tperp(Z) = (I - P_U) Z (I - P_V); complements project_t exactly.
Matrix project_tperp(const TangentSpace& ts, const Matrix& z);

struct CoherenceProfile {
  double mu0;
  double mu1;
  Index rank;
  Index rows;
  Index cols;
};

/// mu0 = max((m/r) max_i ||P_U e_i||^2, (n/r) max_j ||P_V e_j||^2),
/// mu1 = sqrt(mn/r) max_ij |[U V^T]_ij|.
CoherenceProfile coherence(const TangentSpace& ts);

struct TailStats {
  double max_abs_residual;   ///< ||A - A_r||_inf
  double frobenius_residual; ///< ||A - A_r||_F
};

struct SampleSizeRequirement {
  double bound1;   ///< coherence term
  double bound2;   ///< residual-flatness term; 0 for an exactly low-rank tail
  double required; ///< max of the two
};

/// Sample-size lower bounds for confidence parameter beta > 1. Natural
/// logarithms throughout. `constant32` swaps the leading 114 for the
/// concentration-only constant 32.
SampleSizeRequirement required_sample_size(const CoherenceProfile& profile,
                                           const TailStats& tail, double beta,
                                           bool constant32 = false);

struct DeviationOptions {
  int max_iters = 1000;
  double rel_tol = 1e-6;
  int restarts = 2;
  std::uint64_t probe_seed = 0x9e3779b9;  ///< start-vector stream, fixed
};

/// Operator norm of (mn/|Omega|) P_T R_Omega P_T - P_T over matrix space,
/// by power iteration restricted to T (the operator annihilates Tperp).
/// Iterates are re-projected onto T each step to suppress drift.
double pt_romega_pt_deviation(const TangentSpace& ts,
                              const SampleMultiset& omega,
                              const DeviationOptions& opts = {});

}  // namespace nnmc
