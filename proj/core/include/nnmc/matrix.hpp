#pragma once

#include <Eigen/Core>

#include <string>

namespace nnmc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct MatrixNorms {
  double nuclear;    ///< sum of singular values
  double frobenius;  ///< sqrt of sum of squared entries
  double spectral;   ///< largest singular value
  double max_abs;    ///< largest entry in magnitude
};

/// All four norms at once. Nuclear and spectral go through the singular
/// values; the ordering spectral <= frobenius <= nuclear always holds.
MatrixNorms norms(const Matrix& m);

bool is_finite(const Matrix& m);

/// Throws std::invalid_argument when `m` is empty or has NaN/Inf entries.
void require_finite(const Matrix& m, const char* what);

/// Dense matrix file format: one row per line, comma-separated decimal
/// floats, no header. Values round-trip bit-exactly.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const Matrix& m, const std::string& path);

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

}  // namespace nnmc
