#include "nnmc/tangent.hpp"

#include "nnmc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace nnmc {

TangentSpace tangent_space(const TruncatedSvd& f) {
  return TangentSpace{f.U, f.V};
}

namespace {

void require_dims(const TangentSpace& ts, const Matrix& z, const char* what) {
  if (z.rows() != ts.U.rows() || z.cols() != ts.V.rows()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.next_normal();
  return m;
}

}  // namespace

Matrix project_t(const TangentSpace& ts, const Matrix& z) {
  require_dims(ts, z, "project_t");
  const Matrix ut_z = ts.U.transpose() * z;   // r x n
  const Matrix z_v = z * ts.V;                // m x r
  return ts.U * ut_z + z_v * ts.V.transpose() -
         ts.U * (ut_z * ts.V) * ts.V.transpose();
}

Matrix project_tperp(const TangentSpace& ts, const Matrix& z) {
  require_dims(ts, z, "project_tperp");
  // (I - P_U) Z (I - P_V), applied factor by factor
  Matrix w = z - ts.U * (ts.U.transpose() * z);
  return w - (w * ts.V) * ts.V.transpose();
}

CoherenceProfile coherence(const TangentSpace& ts) {
  const Index m = ts.U.rows();
  const Index n = ts.V.rows();
  const Index r = ts.U.cols();
  if (r < 1 || ts.V.cols() != r) {
    throw std::invalid_argument("coherence: invalid tangent space factors");
  }
  // ||P_U e_i||^2 is the squared norm of row i of U
  const double u_max = ts.U.rowwise().squaredNorm().maxCoeff();
  const double v_max = ts.V.rowwise().squaredNorm().maxCoeff();
  CoherenceProfile out;
  out.mu0 = std::max(static_cast<double>(m) / r * u_max,
                     static_cast<double>(n) / r * v_max);
  out.mu1 = std::sqrt(static_cast<double>(m) * n / r) *
            (ts.U * ts.V.transpose()).cwiseAbs().maxCoeff();
  out.rank = r;
  out.rows = m;
  out.cols = n;
  return out;
}

SampleSizeRequirement required_sample_size(const CoherenceProfile& profile,
                                           const TailStats& tail, double beta,
                                           bool constant32) {
  if (!(beta > 1.0)) {
    throw std::invalid_argument("required_sample_size: beta must exceed 1");
  }
  const double m = static_cast<double>(profile.rows);
  const double n = static_cast<double>(profile.cols);
  const double r = static_cast<double>(profile.rank);
  const double log2n = std::log(2.0 * n);
  const double leading = constant32 ? 32.0 : 114.0;
  SampleSizeRequirement out;
  out.bound1 = leading * std::max(profile.mu0, profile.mu1 * profile.mu1) * r *
               (m + n) * beta * log2n * log2n;
  if (tail.frobenius_residual > 0.0) {
    out.bound2 = 8.0 * m * n * tail.max_abs_residual * tail.max_abs_residual /
                 (3.0 * tail.frobenius_residual * tail.frobenius_residual) *
                 beta * std::log(n);
  } else {
    out.bound2 = 0.0;  // exactly low-rank tail
  }
  out.required = std::max(out.bound1, out.bound2);
  return out;
}

double pt_romega_pt_deviation(const TangentSpace& ts,
                              const SampleMultiset& omega,
                              const DeviationOptions& opts) {
  if (ts.U.rows() != omega.rows() || ts.V.rows() != omega.cols()) {
    throw std::invalid_argument("pt_romega_pt_deviation: dimension mismatch");
  }
  const double scale = static_cast<double>(omega.rows()) *
                       static_cast<double>(omega.cols()) /
                       static_cast<double>(omega.size());
  const auto apply = [&](const Matrix& z) -> Matrix {
    const Matrix pz = project_t(ts, z);
    return scale * project_t(ts, apply_romega(omega, pz)) - pz;
  };

  double best = 0.0;
  for (int restart = 0; restart < opts.restarts; ++restart) {
    Rng rng(Rng::derive(opts.probe_seed, static_cast<std::uint64_t>(restart)));
    Matrix z = project_t(ts, gaussian_matrix(omega.rows(), omega.cols(), rng));
    const double z0 = z.norm();
    if (z0 < 1e-300) continue;
    z /= z0;
    double estimate = 0.0;
    double prev = 0.0;
    for (int iter = 0; iter < opts.max_iters; ++iter) {
      const Matrix w = apply(z);
      estimate = z.cwiseProduct(w).sum();  // Rayleigh quotient
      const double wn = w.norm();
      if (wn < 1e-30) {
        estimate = 0.0;  // operator numerically zero on T
        break;
      }
      z = project_t(ts, w);
      const double zn = z.norm();
      if (zn < 1e-300) break;
      z /= zn;
      if (iter >= 8 &&
          std::abs(estimate - prev) <= opts.rel_tol * std::abs(estimate)) {
        break;
      }
      prev = estimate;
    }
    best = std::max(best, std::abs(estimate));
  }
  return best;
}

}  // namespace nnmc
