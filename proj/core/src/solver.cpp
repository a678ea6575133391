#include "nnmc/solver.hpp"

#include "nnmc/tangent.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace nnmc {

namespace {

void require_dims(const ObservationSet& obs, const Matrix& b,
                  const char* what) {
  if (b.rows() != obs.sample().rows() || b.cols() != obs.sample().cols()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

double residual_half_sq(const ObservationSet& obs, const Matrix& b) {
  const auto& cells = obs.sample().cells();
  const auto& vals = obs.cell_values();
  double sum = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const double d = b(cells[k].row, cells[k].col) - vals[k];
    sum += cells[k].count * d * d;
  }
  return 0.5 * sum;
}

struct ProxOutput {
  Matrix b;
  double nuclear;  // exact nuclear norm of b
};

ProxOutput svt_prox_with_norm(const Matrix& z, double tau) {
  Eigen::BDCSVD<Matrix> dec(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = dec.singularValues();
  Index keep = 0;
  while (keep < sigma.size() && sigma(keep) > tau) ++keep;
  ProxOutput out;
  if (keep == 0) {
    out.b = Matrix::Zero(z.rows(), z.cols());
    out.nuclear = 0.0;
    return out;
  }
  const Vector shrunk = sigma.head(keep).array() - tau;
  out.b = dec.matrixU().leftCols(keep) * shrunk.asDiagonal() *
          dec.matrixV().leftCols(keep).transpose();
  out.nuclear = shrunk.sum();
  return out;
}

}  // namespace

double objective(const ObservationSet& obs, const Matrix& b, double lambda) {
  require_dims(obs, b, "objective");
  require_finite(b, "objective");
  if (lambda < 0.0) {
    throw std::invalid_argument("objective: lambda must be nonnegative");
  }
  return residual_half_sq(obs, b) + lambda * singular_values(b).sum();
}

Matrix gradient(const ObservationSet& obs, const Matrix& b) {
  require_dims(obs, b, "gradient");
  require_finite(b, "gradient");
  const auto& cells = obs.sample().cells();
  const auto& vals = obs.cell_values();
  Matrix g = Matrix::Zero(b.rows(), b.cols());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    g(cells[k].row, cells[k].col) =
        cells[k].count * (b(cells[k].row, cells[k].col) - vals[k]);
  }
  return g;
}

Matrix svt_prox(const Matrix& z, double tau) {
  require_finite(z, "svt_prox");
  if (tau < 0.0) throw std::invalid_argument("svt_prox: tau must be >= 0");
  if (tau == 0.0) return z;
  return svt_prox_with_norm(z, tau).b;
}

SolverResult solve(const ObservationSet& obs, const SolverConfig& config) {
  if (!(config.lambda > 0.0)) {
    throw std::invalid_argument("solve: lambda must be positive");
  }
  if (!(config.rel_obj_tol > 0.0)) {
    throw std::invalid_argument("solve: rel_obj_tol must be positive");
  }
  if (config.max_iters < 1) {
    throw std::invalid_argument("solve: max_iters must be positive");
  }
  const Index m = obs.sample().rows();
  const Index n = obs.sample().cols();
  const double eta = config.step_size > 0.0
                         ? config.step_size
                         : 1.0 / obs.sample().max_multiplicity();
  const double lambda = config.lambda;
  const auto& cells = obs.sample().cells();
  const auto& vals = obs.cell_values();

  SolverResult result;
  Matrix b = Matrix::Zero(m, n);
  Matrix y = b;
  double momentum = 1.0;
  double obj = residual_half_sq(obs, b);  // ||0||_* = 0
  result.objective_trace.push_back(obj);

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    // z = y - eta * R_Omega(y - A), touched entries only
    Matrix z = y;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      z(cells[k].row, cells[k].col) -=
          eta * cells[k].count * (y(cells[k].row, cells[k].col) - vals[k]);
    }
    ProxOutput prox = svt_prox_with_norm(z, eta * lambda);
    const double obj_next =
        residual_half_sq(obs, prox.b) + lambda * prox.nuclear;

    if (config.acceleration) {
      const double momentum_next =
          0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      y = prox.b + ((momentum - 1.0) / momentum_next) * (prox.b - b);
      momentum = momentum_next;
    } else {
      y = prox.b;
    }
    b = std::move(prox.b);
    result.objective_trace.push_back(obj_next);
    result.iterations = iter;

    const double rel_change =
        std::abs(obj_next - obj) / std::max(std::abs(obj), 1e-300);
    obj = obj_next;
    if (rel_change < config.rel_obj_tol) {
      result.converged = true;
      break;
    }
  }

  result.kkt = kkt_residual(obs, b, lambda);
  result.B = std::move(b);
  return result;
}

KktResidual subgradient_residual(const Matrix& g, const Matrix& b) {
  if (g.rows() != b.rows() || g.cols() != b.cols()) {
    throw std::invalid_argument("subgradient_residual: dimension mismatch");
  }
  require_finite(g, "subgradient_residual");
  Eigen::BDCSVD<Matrix> dec(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = dec.singularValues();
  const double sigma1 = sigma.size() > 0 ? sigma(0) : 0.0;
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > 1e-8 * sigma1 && sigma(rank) > 0.0) {
    ++rank;
  }
  KktResidual out{0.0, 0.0};
  if (rank == 0) {
    // subdifferential at 0 is the unit spectral ball
    out.spectral_slack = std::max(0.0, singular_values(g)(0) - 1.0);
    return out;
  }
  const TangentSpace ts_b{dec.matrixU().leftCols(rank),
                          dec.matrixV().leftCols(rank)};
  out.tangent_gap =
      (project_t(ts_b, g) - ts_b.U * ts_b.V.transpose()).norm();
  out.spectral_slack =
      std::max(0.0, singular_values(project_tperp(ts_b, g))(0) - 1.0);
  return out;
}

KktResidual kkt_residual(const ObservationSet& obs, const Matrix& b,
                         double lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("kkt_residual: lambda must be positive");
  }
  const Matrix g = -gradient(obs, b) / lambda;
  return subgradient_residual(g, b);
}

double select_lambda(Index m, Index n, Index r, std::size_t omega_size,
                     double epsilon) {
  if (m < 1 || n < 1) {
    throw std::invalid_argument("select_lambda: dimensions must be positive");
  }
  if (r < 1) throw std::invalid_argument("select_lambda: rank must be positive");
  if (omega_size < 1) {
    throw std::invalid_argument("select_lambda: empty sample");
  }
  if (epsilon < 0.0) {
    throw std::invalid_argument("select_lambda: epsilon must be nonnegative");
  }
  const double mn = static_cast<double>(m) * static_cast<double>(n);
  return 2.0 * static_cast<double>(omega_size) * epsilon / mn *
         std::sqrt(2.0 / (3.0 * static_cast<double>(r) *
                          std::log(2.0 * static_cast<double>(n))));
}

double lambda_floor(const std::vector<double>& observed_values) {
  if (observed_values.empty()) {
    throw std::invalid_argument("lambda_floor: no observed values");
  }
  double sum_sq = 0.0;
  for (double v : observed_values) sum_sq += v * v;
  const double rms = std::sqrt(sum_sq / observed_values.size());
  return rms > 0.0 ? 1e-6 * rms : 1e-12;
}

}  // namespace nnmc
