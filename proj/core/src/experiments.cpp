#include "nnmc/experiments.hpp"

#include "nnmc/parallel.hpp"
#include "nnmc/rng.hpp"

#include <Eigen/QR>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nnmc {

namespace {

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.next_normal();
  return m;
}

// Haar-distributed orthonormal factor: thin Q of a Gaussian matrix with the
// R diagonal forced positive.
Matrix haar_factor(Index dim, Index r, Rng& rng) {
  const Matrix g = gaussian_matrix(dim, r, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, r);
  const Matrix rmat = qr.matrixQR().topRows(r);
  for (Index k = 0; k < r; ++k) {
    if (rmat(k, k) < 0.0) q.col(k) = -q.col(k);
  }
  return q;
}

void validate_spec(const PlantedSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1) {
    throw std::invalid_argument("generate_planted: dimensions must be positive");
  }
  if (spec.rank < 1 || spec.rank > std::min(spec.rows, spec.cols)) {
    throw std::invalid_argument("generate_planted: rank out of range");
  }
  if (!(spec.spectrum.top > 0.0)) {
    throw std::invalid_argument("generate_planted: top singular value must be positive");
  }
  if (spec.spectrum.kind == SpectrumSpec::Kind::Geometric &&
      !(spec.spectrum.ratio > 0.0 && spec.spectrum.ratio <= 1.0)) {
    throw std::invalid_argument("generate_planted: ratio must lie in (0, 1]");
  }
  if (spec.tail.epsilon_target < 0.0) {
    throw std::invalid_argument("generate_planted: epsilon target must be nonnegative");
  }
}

std::string spectrum_name(SpectrumSpec::Kind kind) {
  return kind == SpectrumSpec::Kind::Flat ? "flat" : "geometric";
}

std::string tail_name(TailSpec::Kind kind) {
  return kind == TailSpec::Kind::None ? "none" : "gaussian_scaled";
}

}  // namespace

PlantedInstance generate_planted(const PlantedSpec& spec) {
  validate_spec(spec);
  Rng rng(spec.seed);
  const Matrix u = haar_factor(spec.rows, spec.rank, rng);
  const Matrix v = haar_factor(spec.cols, spec.rank, rng);
  Vector sigma(spec.rank);
  for (Index k = 0; k < spec.rank; ++k) {
    sigma(k) = spec.spectrum.kind == SpectrumSpec::Kind::Flat
                   ? spec.spectrum.top
                   : spec.spectrum.top * std::pow(spec.spectrum.ratio,
                                                  static_cast<double>(k));
  }

  PlantedInstance inst;
  inst.planted = TruncatedSvd{u, sigma, v};
  inst.A = reconstruct(inst.planted);
  inst.epsilon = 0.0;

  const double eps_target = spec.tail.kind == TailSpec::Kind::GaussianScaled
                                ? spec.tail.epsilon_target
                                : 0.0;
  if (eps_target > 0.0) {
    if (eps_target >= sigma(spec.rank - 1)) {
      throw std::invalid_argument(
          "generate_planted: epsilon target must stay below sigma_r so the "
          "planted factors remain the best rank-r approximation");
    }
    Matrix tail = gaussian_matrix(spec.rows, spec.cols, rng);
    const TangentSpace ts{u, v};
    tail = project_tperp(ts, tail);
    const double norm = tail.norm();
    if (norm < 1e-300) {
      throw std::invalid_argument(
          "generate_planted: tail has no orthogonal complement to live in");
    }
    inst.A += tail * (eps_target / norm);
    inst.epsilon = eps_target;
  }
  inst.coherence = coherence(TangentSpace{u, v});
  return inst;
}

ExperimentRecord run_trial(const PlantedSpec& spec, std::size_t omega_size,
                           const LambdaRule& rule, std::uint64_t omega_seed,
                           const TrialOptions& opts) {
  if (omega_size < 1) {
    throw std::invalid_argument("run_trial: omega_size must be positive");
  }
  const auto start = std::chrono::steady_clock::now();

  const PlantedInstance inst = generate_planted(spec);
  const auto omega =
      SampleMultiset::uniform(spec.rows, spec.cols, omega_size, omega_seed);
  const ObservationSet obs = observe(inst.A, omega);

  double lambda = rule.use_corollary1
                      ? select_lambda(spec.rows, spec.cols, spec.rank,
                                      omega_size, inst.epsilon)
                      : rule.fixed_value;
  if (lambda <= 0.0) lambda = lambda_floor(obs.values());

  SolverConfig config;
  config.lambda = lambda;
  config.max_iters = opts.max_iters;
  config.rel_obj_tol = opts.rel_obj_tol;
  const SolverResult sol = solve(obs, config);

  const TangentSpace ts = tangent_space(inst.planted);
  const Matrix a_r = reconstruct(inst.planted);
  const Matrix diff = a_r - sol.B;

  ExperimentRecord rec;
  rec.spec = spec;
  rec.omega_size = omega_size;
  rec.omega_seed = omega_seed;
  rec.lambda_used = lambda;
  rec.epsilon = inst.epsilon;
  rec.a_frobenius = inst.A.norm();
  rec.measured_perp = project_tperp(ts, sol.B).norm();
  rec.measured_tangent = project_t(ts, diff).norm();
  rec.measured_total = diff.norm();
  rec.measured_full = (inst.A - sol.B).norm();

  // optimality inequality at the solve output
  const Matrix uvt = ts.U * ts.V.transpose();
  rec.thm3_lhs =
      lambda * ((sol.B - a_r).cwiseProduct(uvt).sum() +
                singular_values(project_tperp(ts, sol.B)).sum());
  rec.thm3_rhs = romega_inner(omega, sol.B - inst.A, a_r - sol.B);

  const Matrix residual = inst.A - a_r;
  BoundInputs bi;
  bi.rows = spec.rows;
  bi.cols = spec.cols;
  bi.rank = spec.rank;
  bi.omega_size = omega_size;
  bi.beta = opts.beta;
  bi.epsilon = inst.epsilon;
  bi.lambda = lambda;
  bi.perp_norm = rec.measured_perp;
  CompetitorExtras extras;
  extras.sampled_residual = std::sqrt(romega_inner(omega, residual, residual));
  extras.spectral_noise =
      inst.epsilon > 0.0 ? singular_values(residual)(0) : 0.0;
  extras.max_abs_ar = a_r.cwiseAbs().maxCoeff();
  rec.bounds = make_bound_report(
      bi, extras,
      MeasuredErrors{rec.measured_perp, rec.measured_tangent,
                     rec.measured_total});
  rec.converged = sol.converged;
  rec.iterations = sol.iterations;
  rec.kkt = sol.kkt;
  rec.runtime_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return rec;
}

std::vector<ExperimentRecord> sweep(const PlantedSpec& spec,
                                    const std::vector<std::size_t>& omega_grid,
                                    const LambdaRule& rule,
                                    int trials_per_cell, std::uint64_t seed,
                                    const TrialOptions& opts,
                                    unsigned threads) {
  if (omega_grid.empty()) {
    throw std::invalid_argument("sweep: omega grid must be non-empty");
  }
  if (trials_per_cell < 1) {
    throw std::invalid_argument("sweep: trials_per_cell must be positive");
  }
  const std::size_t total =
      omega_grid.size() * static_cast<std::size_t>(trials_per_cell);
  std::vector<ExperimentRecord> records(total);
  parallel_for(total, threads, [&](std::size_t g) {
    const std::size_t cell = g / static_cast<std::size_t>(trials_per_cell);
    PlantedSpec trial_spec = spec;
    trial_spec.seed = Rng::derive(spec.seed, g);
    records[g] = run_trial(trial_spec, omega_grid[cell], rule,
                           Rng::derive(seed, g), opts);
  });
  return records;
}

std::vector<SweepCellSummary> summarize_sweep(
    const std::vector<ExperimentRecord>& records) {
  std::vector<std::size_t> sizes;
  for (const auto& rec : records) {
    if (std::find(sizes.begin(), sizes.end(), rec.omega_size) == sizes.end()) {
      sizes.push_back(rec.omega_size);
    }
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  };
  std::vector<SweepCellSummary> out;
  for (std::size_t size : sizes) {
    std::vector<double> ratios;
    std::vector<double> absolutes;
    bool ratio_defined = true;
    for (const auto& rec : records) {
      if (rec.omega_size != size) continue;
      absolutes.push_back(rec.measured_total);
      if (rec.epsilon > 0.0) {
        ratios.push_back(rec.measured_total / rec.epsilon);
      } else {
        ratio_defined = false;
      }
    }
    SweepCellSummary cell;
    cell.omega_size = size;
    cell.median_absolute = median(absolutes);
    cell.median_ratio = ratio_defined
                            ? median(ratios)
                            : std::numeric_limits<double>::quiet_NaN();
    out.push_back(cell);
  }
  return out;
}

namespace {

void append_record_fields(nlohmann::ordered_json& j,
                          const ExperimentRecord& rec) {
  j["spec"] = nlohmann::ordered_json::parse(to_json(rec.spec));
  j["omega_size"] = rec.omega_size;
  j["omega_seed"] = rec.omega_seed;
  j["lambda"] = rec.lambda_used;
  j["epsilon"] = rec.epsilon;
  j["a_frobenius"] = rec.a_frobenius;
  j["measured"] = {{"perp", rec.measured_perp},
                   {"tangent", rec.measured_tangent},
                   {"total", rec.measured_total},
                   {"full", rec.measured_full}};
  j["thm3"] = {{"lhs", rec.thm3_lhs}, {"rhs", rec.thm3_rhs}};
  j["converged"] = rec.converged;
  j["iterations"] = rec.iterations;
  j["kkt"] = {{"tangent_gap", rec.kkt.tangent_gap},
              {"spectral_slack", rec.kkt.spectral_slack}};
  j["bounds"] = nlohmann::ordered_json::parse(to_json(rec.bounds));
}

}  // namespace

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::ostringstream out;
  out << "m,n,r,spectrum,top,ratio,tail,epsilon_target,spec_seed,"
         "omega_size,omega_seed,lambda,epsilon,a_frobenius,"
         "measured_perp,measured_tangent,measured_total,measured_full,"
         "thm3_lhs,thm3_rhs,converged,iterations,"
         "kkt_tangent_gap,kkt_spectral_slack,mu_beta,"
         "thm1_perp,thm1_tangent,cor1_perp,cor1_tangent,cor1_total,gamma,"
         "candes_plan,keshavan_additive,foygel_additive,koltchinskii\n";
  for (const auto& rec : records) {
    const auto& b = rec.bounds;
    out << rec.spec.rows << ',' << rec.spec.cols << ',' << rec.spec.rank << ','
        << spectrum_name(rec.spec.spectrum.kind) << ','
        << format_double(rec.spec.spectrum.top) << ','
        << format_double(rec.spec.spectrum.ratio) << ','
        << tail_name(rec.spec.tail.kind) << ','
        << format_double(rec.spec.tail.epsilon_target) << ','
        << rec.spec.seed << ',' << rec.omega_size << ',' << rec.omega_seed
        << ',' << format_double(rec.lambda_used) << ','
        << format_double(rec.epsilon) << ','
        << format_double(rec.a_frobenius) << ','
        << format_double(rec.measured_perp) << ','
        << format_double(rec.measured_tangent) << ','
        << format_double(rec.measured_total) << ','
        << format_double(rec.measured_full) << ','
        << format_double(rec.thm3_lhs) << ',' << format_double(rec.thm3_rhs)
        << ',' << (rec.converged ? 1 : 0) << ',' << rec.iterations << ','
        << format_double(rec.kkt.tangent_gap) << ','
        << format_double(rec.kkt.spectral_slack) << ','
        << format_double(b.inputs.beta) << ',' << format_double(b.thm1_perp)
        << ',' << format_double(b.thm1_tangent) << ','
        << format_double(b.cor1_perp) << ',' << format_double(b.cor1_tangent)
        << ',' << format_double(b.cor1_total) << ',' << format_double(b.gamma)
        << ',' << format_double(b.candes_plan) << ','
        << format_double(b.keshavan_additive) << ','
        << format_double(b.foygel_additive) << ','
        << format_double(b.koltchinskii) << '\n';
  }
  return out.str();
}

std::string records_to_json(const std::vector<ExperimentRecord>& records) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& rec : records) {
    nlohmann::ordered_json j;
    append_record_fields(j, rec);
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

PlantedSpec planted_spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("planted spec: bad JSON: ") +
                                e.what());
  }
  PlantedSpec spec;
  try {
    spec.rows = j.at("m").get<Index>();
    spec.cols = j.at("n").get<Index>();
    spec.rank = j.at("r").get<Index>();
    const auto& sp = j.at("spectrum");
    const std::string kind = sp.at("kind").get<std::string>();
    if (kind == "flat") {
      spec.spectrum.kind = SpectrumSpec::Kind::Flat;
    } else if (kind == "geometric") {
      spec.spectrum.kind = SpectrumSpec::Kind::Geometric;
    } else {
      throw std::invalid_argument("planted spec: unknown spectrum kind '" +
                                  kind + "'");
    }
    spec.spectrum.top = sp.at("top").get<double>();
    spec.spectrum.ratio = sp.value("ratio", 1.0);
    const auto& tail = j.at("tail");
    const std::string tail_kind = tail.at("kind").get<std::string>();
    if (tail_kind == "none") {
      spec.tail.kind = TailSpec::Kind::None;
    } else if (tail_kind == "gaussian_scaled") {
      spec.tail.kind = TailSpec::Kind::GaussianScaled;
    } else {
      throw std::invalid_argument("planted spec: unknown tail kind '" +
                                  tail_kind + "'");
    }
    spec.tail.epsilon_target = tail.value("epsilon_target", 0.0);
    if (j.contains("factor_model") &&
        j.at("factor_model").get<std::string>() != "haar") {
      throw std::invalid_argument("planted spec: only the haar factor model is supported");
    }
    spec.seed = j.value("seed", 0ULL);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("planted spec: ") + e.what());
  }
  return spec;
}

std::string to_json(const PlantedSpec& spec) {
  nlohmann::ordered_json j;
  j["m"] = spec.rows;
  j["n"] = spec.cols;
  j["r"] = spec.rank;
  j["spectrum"] = {{"kind", spectrum_name(spec.spectrum.kind)},
                   {"top", spec.spectrum.top},
                   {"ratio", spec.spectrum.ratio}};
  j["tail"] = {{"kind", tail_name(spec.tail.kind)},
               {"epsilon_target", spec.tail.epsilon_target}};
  j["factor_model"] = "haar";
  j["seed"] = spec.seed;
  return j.dump(2);
}

}  // namespace nnmc
