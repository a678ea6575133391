#include <doctest.h>

#include <nnmc/experiments.hpp>
#include <nnmc/verify.hpp>

#include <cmath>

#include "test_util.hpp"

using namespace nnmc;

namespace {

PlantedSpec small_spec() {
  PlantedSpec spec;
  spec.rows = 20;
  spec.cols = 24;
  spec.rank = 2;
  spec.tail.kind = TailSpec::Kind::GaussianScaled;
  spec.tail.epsilon_target = 0.05;
  spec.seed = 99;
  return spec;
}

}  // namespace

TEST_CASE("a tail-free planted instance is exactly low-rank") {
  PlantedSpec spec;
  spec.rows = 30;
  spec.cols = 40;
  spec.rank = 3;
  spec.seed = 11;
  const PlantedInstance inst = generate_planted(spec);
  CHECK(inst.epsilon == 0.0);
  const TruncatedSvd rec = truncate(inst.A, 3);
  // same column spaces: projectors agree
  CHECK((rec.U * rec.U.transpose() -
         inst.planted.U * inst.planted.U.transpose())
            .norm() < 1e-8);
  CHECK((rec.V * rec.V.transpose() -
         inst.planted.V * inst.planted.V.transpose())
            .norm() < 1e-8);
  // orthonormal factors, nonincreasing spectrum
  CHECK((inst.planted.U.transpose() * inst.planted.U - Matrix::Identity(3, 3))
            .norm() < 1e-10);
  CHECK((inst.planted.V.transpose() * inst.planted.V - Matrix::Identity(3, 3))
            .norm() < 1e-10);
}

TEST_CASE("the tail hits its target norm exactly and stays below sigma_r") {
  PlantedSpec spec = small_spec();
  spec.tail.epsilon_target = 0.1;
  const PlantedInstance inst = generate_planted(spec);
  const Matrix residual = inst.A - reconstruct(truncate(inst.A, spec.rank));
  CHECK(residual.norm() == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(inst.epsilon == doctest::Approx(0.1).epsilon(1e-12));

  spec.tail.epsilon_target = 1.0;  // equals sigma_r for a flat unit spectrum
  CHECK_THROWS_AS(generate_planted(spec), std::invalid_argument);
}

TEST_CASE("haar factors are incoherent at scale") {
  std::vector<double> mu0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    PlantedSpec spec;
    spec.rows = 100;
    spec.cols = 100;
    spec.rank = 5;
    spec.seed = Rng::derive(1234, seed);
    mu0.push_back(generate_planted(spec).coherence.mu0);
  }
  std::sort(mu0.begin(), mu0.end());
  CHECK(mu0[mu0.size() / 2] <= 3.0);
}

TEST_CASE("geometric spectra decay and invalid specs are rejected") {
  PlantedSpec spec = small_spec();
  spec.spectrum.kind = SpectrumSpec::Kind::Geometric;
  spec.spectrum.top = 2.0;
  spec.spectrum.ratio = 0.5;
  spec.tail.kind = TailSpec::Kind::None;
  const PlantedInstance inst = generate_planted(spec);
  CHECK(inst.planted.sigma(0) == doctest::Approx(2.0));
  CHECK(inst.planted.sigma(1) == doctest::Approx(1.0));

  spec.spectrum.ratio = 1.5;
  CHECK_THROWS_AS(generate_planted(spec), std::invalid_argument);
  spec.spectrum.ratio = 0.5;
  spec.rank = 0;
  CHECK_THROWS_AS(generate_planted(spec), std::invalid_argument);
}

TEST_CASE("run_trial is deterministic and splits the error orthogonally") {
  const PlantedSpec spec = small_spec();
  TrialOptions opts;
  opts.max_iters = 2000;
  const ExperimentRecord a = run_trial(spec, 240, LambdaRule::corollary1(), 7, opts);
  const ExperimentRecord b = run_trial(spec, 240, LambdaRule::corollary1(), 7, opts);
  CHECK(records_to_csv({a}) == records_to_csv({b}));
  CHECK(records_to_json({a}) == records_to_json({b}));

  // ||A_r - B||^2 = ||P_T(A_r - B)||^2 + ||P_Tperp(B)||^2
  const double split = a.measured_tangent * a.measured_tangent +
                       a.measured_perp * a.measured_perp;
  CHECK(split == doctest::Approx(a.measured_total * a.measured_total)
                     .epsilon(1e-8));
  CHECK(a.lambda_used ==
        doctest::Approx(select_lambda(spec.rows, spec.cols, spec.rank, 240,
                                      a.epsilon))
            .epsilon(1e-12));
}

TEST_CASE("exact recovery in the low-rank regime with the lambda floor") {
  PlantedSpec spec;
  spec.rows = 50;
  spec.cols = 60;
  spec.rank = 3;
  spec.seed = 2718;
  TrialOptions opts;
  opts.max_iters = 4000;
  opts.rel_obj_tol = 1e-12;
  const ExperimentRecord rec =
      run_trial(spec, 1800, LambdaRule::corollary1(), 31, opts);
  CHECK(rec.epsilon == 0.0);
  // corollary-1 lambda degenerates to the floor here
  CHECK(rec.lambda_used > 0.0);
  CHECK(rec.measured_full / rec.a_frobenius <= 1e-3);
}

TEST_CASE("sweep with a single cell reproduces run_trial records") {
  const PlantedSpec spec = small_spec();
  TrialOptions opts;
  opts.max_iters = 1500;
  const auto records = sweep(spec, {200}, LambdaRule::corollary1(), 3, 555, opts);
  REQUIRE(records.size() == 3);
  for (std::size_t g = 0; g < records.size(); ++g) {
    PlantedSpec trial_spec = spec;
    trial_spec.seed = Rng::derive(spec.seed, g);
    const ExperimentRecord direct = run_trial(
        trial_spec, 200, LambdaRule::corollary1(), Rng::derive(555, g), opts);
    CHECK(records_to_csv({records[g]}) == records_to_csv({direct}));
  }
}

TEST_CASE("sweep output is identical for one and two workers") {
  const PlantedSpec spec = small_spec();
  TrialOptions opts;
  opts.max_iters = 1000;
  const auto serial =
      sweep(spec, {150, 220}, LambdaRule::corollary1(), 2, 77, opts, 1);
  const auto parallel =
      sweep(spec, {150, 220}, LambdaRule::corollary1(), 2, 77, opts, 2);
  CHECK(records_to_csv(serial) == records_to_csv(parallel));
  CHECK(records_to_json(serial) == records_to_json(parallel));
}

TEST_CASE("sweep summaries report per-cell medians") {
  const PlantedSpec spec = small_spec();
  TrialOptions opts;
  opts.max_iters = 1500;
  const auto records =
      sweep(spec, {150, 300}, LambdaRule::corollary1(), 3, 4321, opts);
  const auto cells = summarize_sweep(records);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].omega_size == 150);
  CHECK(cells[1].omega_size == 300);
  for (const auto& cell : cells) {
    CHECK(std::isfinite(cell.median_ratio));
    CHECK(cell.median_ratio > 0.0);
    CHECK(cell.median_absolute > 0.0);
  }
}

TEST_CASE("planted spec json round-trips") {
  PlantedSpec spec = small_spec();
  spec.spectrum.kind = SpectrumSpec::Kind::Geometric;
  spec.spectrum.ratio = 0.8;
  const PlantedSpec back = planted_spec_from_json(to_json(spec));
  CHECK(back.rows == spec.rows);
  CHECK(back.cols == spec.cols);
  CHECK(back.rank == spec.rank);
  CHECK(back.spectrum.kind == spec.spectrum.kind);
  CHECK(back.spectrum.top == spec.spectrum.top);
  CHECK(back.spectrum.ratio == spec.spectrum.ratio);
  CHECK(back.tail.kind == spec.tail.kind);
  CHECK(back.tail.epsilon_target == spec.tail.epsilon_target);
  CHECK(back.seed == spec.seed);

  CHECK_THROWS_AS(planted_spec_from_json("{not json"), std::invalid_argument);
  CHECK_THROWS_AS(planted_spec_from_json("{\"m\": 4}"), std::invalid_argument);
  CHECK_THROWS_AS(
      planted_spec_from_json(
          R"({"m":4,"n":4,"r":1,"spectrum":{"kind":"cubic","top":1.0},
              "tail":{"kind":"none"},"seed":0})"),
      std::invalid_argument);
}

TEST_CASE("records csv has one row per record plus a header") {
  const PlantedSpec spec = small_spec();
  TrialOptions opts;
  opts.max_iters = 500;
  const auto records = sweep(spec, {120}, LambdaRule::fixed(0.05), 2, 5, opts);
  const std::string csv = records_to_csv(records);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.rfind("m,n,r,", 0) == 0);
}

TEST_CASE("verification suites pass at smoke scale") {
  const SuiteResult lemma1 = run_lemma1_suite(100, 42);
  CHECK(lemma1.pass);
  CHECK(lemma1.metric("violations") == 0.0);

  const SuiteResult prox = run_prox_suite(20, 42);
  CHECK(prox.pass);

  const SuiteResult kkt = run_kkt_suite(3, 42);
  CHECK(kkt.pass);

  const SuiteResult lemma2 = run_lemma2_suite(50, 42);
  CHECK(lemma2.pass);
  CHECK(lemma2.metric("size_condition_met") == 1.0);

  const std::string json = to_json(lemma1);
  CHECK(json.find("\"suite\": \"lemma1\"") != std::string::npos);
  CHECK(json.find("\"pass\": true") != std::string::npos);
}

TEST_CASE("suite results are identical across worker counts") {
  const SuiteResult serial = run_lemma1_suite(60, 9, 1);
  const SuiteResult parallel = run_lemma1_suite(60, 9, 2);
  CHECK(to_json(serial) == to_json(parallel));
  const SuiteResult t_serial = run_thm2_suite(4, 5, 1, 16, 16, 2, 130);
  const SuiteResult t_parallel = run_thm2_suite(4, 5, 2, 16, 16, 2, 130);
  CHECK(to_json(t_serial) == to_json(t_parallel));
}
