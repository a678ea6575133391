#include "nnmc/svd.hpp"

#include <Eigen/SVD>

#include <stdexcept>

namespace nnmc {

SvdFactors svd(const Matrix& m) {
  require_finite(m, "svd");
  Eigen::BDCSVD<Matrix> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return SvdFactors{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

TruncatedSvd truncate(const Matrix& m, Index r) {
  require_finite(m, "truncate");
  const Index kmax = std::min(m.rows(), m.cols());
  if (r < 1 || r > kmax) {
    throw std::invalid_argument("truncate: rank out of range");
  }
  Eigen::BDCSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  out.U = dec.matrixU().leftCols(r);
  out.sigma = dec.singularValues().head(r);
  out.V = dec.matrixV().leftCols(r);
  return out;
}

Matrix reconstruct(const TruncatedSvd& f) {
  return f.U * f.sigma.asDiagonal() * f.V.transpose();
}

Vector singular_values(const Matrix& m) {
  require_finite(m, "singular_values");
  Eigen::BDCSVD<Matrix> dec(m);
  return dec.singularValues();
}

}  // namespace nnmc
