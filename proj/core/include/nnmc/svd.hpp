#pragma once

#include "nnmc/matrix.hpp"

namespace nnmc {

/// Full factorization m = U diag(sigma) V^T with U m-by-m, V n-by-n and
/// sigma of length min(m, n), nonincreasing and nonnegative.
struct SvdFactors {
  Matrix U;
  Vector sigma;
  Matrix V;
};

/// Top-r singular triplets of a matrix; columns of U and V are orthonormal.
struct TruncatedSvd {
  Matrix U;      ///< m-by-r
  Vector sigma;  ///< length r, nonincreasing
  Matrix V;      ///< n-by-r

  Index rank() const { return sigma.size(); }
};

SvdFactors svd(const Matrix& m);

/// Best rank-r approximation factors; requires 1 <= r <= min(rows, cols).
TruncatedSvd truncate(const Matrix& m, Index r);

/// U diag(sigma) V^T.
Matrix reconstruct(const TruncatedSvd& f);

/// Singular values only, nonincreasing.
Vector singular_values(const Matrix& m);

}  // namespace nnmc
