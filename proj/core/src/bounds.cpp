#include "nnmc/bounds.hpp"

#include "nnmc/parallel.hpp"
#include "nnmc/rng.hpp"
#include "nnmc/sampling.hpp"
#include "nnmc/svd.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace nnmc {

namespace {

struct Dims {
  double m, n, r, omega;
};

Dims dims(const BoundInputs& in) {
  if (in.rows < 1 || in.cols < 1 || in.rank < 1 || in.omega_size < 1) {
    throw std::invalid_argument("bounds: dimensions, rank and |Omega| must be positive");
  }
  return Dims{static_cast<double>(in.rows), static_cast<double>(in.cols),
              static_cast<double>(in.rank),
              static_cast<double>(in.omega_size)};
}

}  // namespace

Theorem1Bounds theorem1_bounds(const BoundInputs& in) {
  const Dims d = dims(in);
  if (!(in.lambda > 0.0)) {
    throw std::invalid_argument("theorem1_bounds: lambda must be positive");
  }
  const double log2n = std::log(2.0 * d.n);
  Theorem1Bounds out;
  out.perp = 8.0 * d.omega * in.epsilon * in.epsilon / (d.m * d.n * in.lambda) +
             3.0 * d.m * d.n * d.r * log2n * in.lambda / d.omega;
  out.tangent = 4.0 * in.epsilon +
                2.0 * d.m * d.n * in.lambda / d.omega *
                    std::sqrt(3.0 * d.r * log2n) +
                64.0 * std::log(d.n) *
                    std::sqrt(d.m * d.n * in.beta / (6.0 * d.omega)) *
                    in.perp_norm;
  return out;
}

Corollary1Bounds corollary1_bounds(const BoundInputs& in) {
  const Dims d = dims(in);
  if (in.epsilon < 0.0) {
    throw std::invalid_argument("corollary1_bounds: epsilon must be nonnegative");
  }
  const double log2n = std::log(2.0 * d.n);
  Corollary1Bounds out;
  out.perp = 4.0 * std::sqrt(6.0 * d.r * log2n) * in.epsilon;
  out.tangent =
      (10.0 + 256.0 * std::sqrt(d.m * d.n * d.r * log2n * log2n * log2n *
                                in.beta / d.omega)) *
      in.epsilon;
  out.total = out.perp + out.tangent;
  return out;
}

double gamma_bound(const BoundInputs& in) {
  const Dims d = dims(in);
  if (in.lambda < 0.0) {
    throw std::invalid_argument("gamma_bound: lambda must be nonnegative");
  }
  const double log2n = std::log(2.0 * d.n);
  return 2.0 * d.omega * in.epsilon * in.epsilon / (d.m * d.n) +
         3.0 * d.m * d.n * d.r * log2n * in.lambda * in.lambda /
             (8.0 * d.omega);
}

CompetitorBounds competitor_bounds(const BoundInputs& in,
                                   const CompetitorExtras& extras) {
  const Dims d = dims(in);
  CompetitorBounds out;
  out.candes_plan =
      (1.0 + d.m * std::sqrt(d.n / d.omega)) * extras.sampled_residual;
  out.keshavan = extras.max_abs_ar * std::pow(d.m, 0.25) *
                     std::pow(d.n, 1.25) * std::sqrt(d.r / d.omega) +
                 d.m * d.n * std::sqrt(d.r) / d.omega * extras.spectral_noise;
  out.foygel = in.epsilon + d.n * std::sqrt(d.r * d.m / d.omega) +
               std::sqrt(d.n * in.epsilon) *
                   std::pow(d.r * d.m / d.omega, 0.25);
  out.koltchinskii =
      in.epsilon + std::sqrt(d.m * d.n * d.n * std::log(d.n) * d.r / d.omega);
  return out;
}

BoundReport make_bound_report(const BoundInputs& in,
                              const CompetitorExtras& extras,
                              const MeasuredErrors& measured) {
  const Theorem1Bounds t1 = theorem1_bounds(in);
  const Corollary1Bounds c1 = corollary1_bounds(in);
  const CompetitorBounds comp = competitor_bounds(in, extras);
  BoundReport report;
  report.inputs = in;
  report.thm1_perp = t1.perp;
  report.thm1_tangent = t1.tangent;
  report.cor1_perp = c1.perp;
  report.cor1_tangent = c1.tangent;
  report.cor1_total = c1.total;
  report.gamma = gamma_bound(in);
  report.candes_plan = comp.candes_plan;
  report.keshavan_additive = comp.keshavan;
  report.foygel_additive = comp.foygel;
  report.koltchinskii = comp.koltchinskii;
  report.measured_perp = measured.perp;
  report.measured_tangent = measured.tangent;
  report.measured_total = measured.total;
  report.constants_are_unity = true;
  return report;
}

std::string to_json(const BoundReport& report) {
  nlohmann::ordered_json j;
  j["inputs"] = {{"m", report.inputs.rows},
                 {"n", report.inputs.cols},
                 {"r", report.inputs.rank},
                 {"omega", report.inputs.omega_size},
                 {"beta", report.inputs.beta},
                 {"epsilon", report.inputs.epsilon},
                 {"lambda", report.inputs.lambda},
                 {"perp_norm", report.inputs.perp_norm}};
  j["thm1_perp"] = report.thm1_perp;
  j["thm1_tangent"] = report.thm1_tangent;
  j["cor1_perp"] = report.cor1_perp;
  j["cor1_tangent"] = report.cor1_tangent;
  j["cor1_total"] = report.cor1_total;
  j["gamma"] = report.gamma;
  j["candes_plan"] = report.candes_plan;
  j["keshavan_additive"] = report.keshavan_additive;
  j["foygel_additive"] = report.foygel_additive;
  j["koltchinskii"] = report.koltchinskii;
  j["measured_perp"] = report.measured_perp;
  j["measured_tangent"] = report.measured_tangent;
  j["measured_total"] = report.measured_total;
  j["constants_are_unity"] = report.constants_are_unity;
  return j.dump(2);
}

Lemma2Result lemma2_check(const Matrix& a, Index r, std::size_t omega_size,
                          double beta, int trials, std::uint64_t seed,
                          unsigned threads) {
  require_finite(a, "lemma2_check");
  if (trials < 1) {
    throw std::invalid_argument("lemma2_check: trials must be positive");
  }
  if (omega_size < 1) {
    throw std::invalid_argument("lemma2_check: omega_size must be positive");
  }
  if (!(beta > 1.0)) {
    throw std::invalid_argument("lemma2_check: beta must exceed 1");
  }
  const Matrix residual = a - reconstruct(truncate(a, r));
  const double eps = residual.norm();
  const double m = static_cast<double>(a.rows());
  const double n = static_cast<double>(a.cols());

  Lemma2Result result;
  result.trials = trials;
  result.threshold = std::pow(n, -beta);
  if (eps > 0.0) {
    result.size_condition_rhs = 8.0 * m * n *
                                residual.cwiseAbs().maxCoeff() *
                                residual.cwiseAbs().maxCoeff() /
                                (3.0 * eps * eps) * beta * std::log(n);
  } else {
    result.size_condition_rhs = 0.0;
  }
  result.size_condition_met =
      static_cast<double>(omega_size) >= result.size_condition_rhs;

  const double bound_sq =
      2.0 * static_cast<double>(omega_size) * eps * eps / (m * n);
  std::vector<char> violated(static_cast<std::size_t>(trials), 0);
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t k) {
    const auto omega = SampleMultiset::uniform(
        a.rows(), a.cols(), omega_size, Rng::derive(seed, k));
    const double lhs_sq = romega_inner(omega, residual, residual);
    if (lhs_sq > bound_sq) violated[k] = 1;
  });
  result.violations = 0;
  for (char v : violated) result.violations += v;
  result.violation_rate = static_cast<double>(result.violations) / trials;
  return result;
}

}  // namespace nnmc
