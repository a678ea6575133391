// End-to-end exercise of the nnmc command-line surface. Takes the path to
// the built binary as argv[1]; returns nonzero on the first failure.

#include <nlohmann/json.hpp>

#include <nnmc/sampling.hpp>
#include <nnmc/matrix.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
  if (!ok) {
    ++g_failures;
    std::cerr << "FAIL: " << what << '\n';
  }
}

int run(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: nnmc_cli_check <path-to-nnmc>\n";
    return 2;
  }
  const std::string bin = argv[1];
  const fs::path dir =
      fs::temp_directory_path() / "nnmc_cli_check";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto path = [&](const char* name) { return (dir / name).string(); };
  const std::string quiet = " 2>/dev/null";

  // gen: planted matrix plus meta
  check(run(bin + " gen --m 30 --n 36 --r 3 --spectrum flat --top 1.0" +
            " --eps 0.05 --seed 7 --out-matrix " + path("a.csv") +
            " --out-meta " + path("a.json") + quiet) == 0,
        "gen exits 0");
  const nnmc::Matrix a = nnmc::read_matrix_csv(path("a.csv"));
  check(a.rows() == 30 && a.cols() == 36, "gen wrote a 30x36 matrix");
  const auto meta = nlohmann::json::parse(slurp(path("a.json")));
  check(std::abs(meta.at("epsilon").get<double>() - 0.05) < 1e-10,
        "gen meta reports the tail target");
  check(meta.contains("mu0") && meta.contains("mu1"), "gen meta has coherence");

  // sample: observations round-trip through the library reader
  check(run(bin + " sample --matrix " + path("a.csv") +
            " --count 648 --seed 11 --out " + path("obs.txt") + quiet) == 0,
        "sample exits 0");
  const nnmc::ObservationSet obs = nnmc::read_observations(path("obs.txt"));
  check(obs.sample().size() == 648, "sample wrote 648 observations");
  {
    std::ifstream in(path("obs.txt"));
    std::string header;
    std::getline(in, header);
    check(header == "30 36 648", "observation header is 'm n count'");
  }

  // solve with the corollary rule
  check(run(bin + " solve --obs " + path("obs.txt") +
            " --lambda auto --eps 0.05 --r 3 --max-iters 3000 --tol 1e-11" +
            " --out-b " + path("b.csv") + " --out-result " +
            path("result.json") + quiet) == 0,
        "solve exits 0");
  const auto result = nlohmann::json::parse(slurp(path("result.json")));
  check(result.at("lambda").get<double>() > 0.0, "solve reports lambda");
  check(result.contains("kkt") && result.at("kkt").contains("tangent_gap"),
        "solve reports the kkt residual");
  const nnmc::Matrix b = nnmc::read_matrix_csv(path("b.csv"));
  check((a - b).norm() / a.norm() < 0.5, "solve output approximates the input");

  // invalid arguments exit 1
  check(run(bin + " solve --obs " + path("obs.txt") + " --lambda -0.5" +
            quiet) == 1,
        "negative lambda exits 1");
  check(run(bin + " solve --obs " + path("obs.txt") + " --lambda auto" +
            quiet) == 1,
        "auto lambda without --r exits 1");
  check(run(bin + " sample --matrix " + path("a.csv") + quiet) == 1,
        "missing required flags exit 1");
  check(run(bin + " verify --suite bogus --trials 5" + quiet) == 1,
        "unknown suite exits 1");

  // coherence
  check(run(bin + " coherence --matrix " + path("a.csv") +
            " --r 3 --beta 2 --out " + path("coh.json") + quiet) == 0,
        "coherence exits 0");
  const auto coh = nlohmann::json::parse(slurp(path("coh.json")));
  check(coh.at("mu0").get<double>() >= 1.0, "coherence reports mu0");
  check(coh.at("required_sample_size").contains("required"),
        "coherence reports the sample-size requirement");

  // bounds
  check(run(bin + " bounds --m 100 --n 100 --r 5 --omega 5000 --beta 2" +
            " --eps 1.0 --lambda 0.1 --perp-norm 0 --out " +
            path("bounds.json") + quiet) == 0,
        "bounds exits 0");
  const auto bounds = nlohmann::json::parse(slurp(path("bounds.json")));
  check(std::abs(bounds.at("thm1_perp").get<double>() - 55.89495209964411) <
            1e-6,
        "bounds reproduces the theorem-1 number");
  check(bounds.at("constants_are_unity").get<bool>(),
        "bounds flags unity constants");

  // verify: a passing suite exits 0, a failing one exits 2
  check(run(bin + " verify --suite lemma1 --trials 100 --seed 3 --out " +
            path("lemma1.json") + quiet) == 0,
        "lemma1 verify exits 0");
  const auto lemma1 = nlohmann::json::parse(slurp(path("lemma1.json")));
  check(lemma1.at("pass").get<bool>(), "lemma1 verify passes");
  check(run(bin + " verify --suite thm2 --trials 8 --seed 3 --m 6 --n 6" +
            " --r 2 --omega 2 --out " + path("thm2_bad.json") + quiet) == 2,
        "starved thm2 verify exits 2");

  // sweep: spec file, grid, CSV plus JSON sidecar, worker independence
  {
    std::ofstream spec(path("spec.json"));
    spec << R"({"m":20,"n":24,"r":2,
                "spectrum":{"kind":"flat","top":1.0,"ratio":1.0},
                "tail":{"kind":"gaussian_scaled","epsilon_target":0.05},
                "factor_model":"haar","seed":42})";
  }
  check(run(bin + " sweep --spec " + path("spec.json") +
            " --omega-grid 150,240 --trials 2 --seed 9 --max-iters 800" +
            " --threads 1 --out " + path("sweep1.csv") + quiet) == 0,
        "sweep exits 0");
  check(run(bin + " sweep --spec " + path("spec.json") +
            " --omega-grid 150,240 --trials 2 --seed 9 --max-iters 800" +
            " --threads 2 --out " + path("sweep2.csv") + quiet) == 0,
        "second sweep exits 0");
  check(!slurp(path("sweep1.csv")).empty(), "sweep wrote a CSV");
  check(slurp(path("sweep1.csv")) == slurp(path("sweep2.csv")),
        "sweep CSV is worker-count independent");
  check(slurp(path("sweep1.csv.json")) == slurp(path("sweep2.csv.json")),
        "sweep JSON sidecar is worker-count independent");
  check(nlohmann::json::parse(slurp(path("sweep1.csv.json"))).size() == 4,
        "sweep sidecar has one entry per trial");

  fs::remove_all(dir);
  if (g_failures == 0) {
    std::cout << "cli check: all checks passed\n";
    return 0;
  }
  std::cerr << "cli check: " << g_failures << " failure(s)\n";
  return 1;
}
