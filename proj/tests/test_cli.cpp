#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "barron/expansion.hpp"
#include "barron/network.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kCli = BARRONFLOW_CLI_PATH;
const fs::path kFixtures = BARRONFLOW_FIXTURES;

int run_cli(const std::string& args) {
  const std::string cmd = "'" + kCli + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("barronflow_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("cli solve writes the anchor ledger and artifacts") {
  const fs::path out = temp_dir("solve");
  const std::string problem = (kFixtures / "single_mode_d1.prob").string();
  const int rc =
      run_cli("solve --problem '" + problem + "' --eps 1e-3 --out '" + out.string() + "'");
  CHECK(rc == 0);

  const json ledger = json::parse(slurp(out / "ledger.json"));
  CHECK(ledger["alpha_star"].get<double>() == 0.5);
  CHECK(ledger["beta_star"].get<double>() ==
        doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-15));
  CHECK(ledger["ell_f"].get<double>() ==
        doctest::Approx(2.0 * (1.0 + M_PI * M_PI)).epsilon(1e-14));
  CHECK(ledger["run"]["recursion_holds"].get<bool>());
  CHECK(ledger["run"]["contraction_per_step"].get<bool>());

  CHECK(fs::exists(out / "trace.csv"));
  const barron::TrigExpansion solution =
      barron::expansion_from_text(slurp(out / "solution.expansion"), 1);
  CHECK(solution.size() == 1);
}

TEST_CASE("cli solve is byte-deterministic") {
  const fs::path a = temp_dir("det_a");
  const fs::path b = temp_dir("det_b");
  const std::string problem = (kFixtures / "single_mode_d1.prob").string();
  for (const fs::path* out : {&a, &b})
    CHECK(run_cli("solve --problem '" + problem + "' --eps 1e-3 --seed 7 --out '" +
                  out->string() + "'") == 0);
  for (const char* name : {"trace.csv", "ledger.json", "solution.expansion"})
    CHECK(slurp(a / name) == slurp(b / name));
}

TEST_CASE("cli exit codes distinguish failure classes") {
  const fs::path out = temp_dir("exit");
  // Missing problem file: I/O error.
  CHECK(run_cli("solve --problem '" + (out / "missing.prob").string() + "' --out '" +
                out.string() + "'") == 2);

  // eps outside (0, 2/lambda_min): precondition error.
  const std::string problem = (kFixtures / "single_mode_d1.prob").string();
  CHECK(run_cli("solve --problem '" + problem + "' --eps 2.5 --out '" + out.string() + "'") == 3);

  // Corrupted declared ellipticity window: assumption audit failure.
  std::string text = slurp(kFixtures / "single_mode_d1.prob");
  const auto pos = text.find("a_min = 1.0");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 11, "a_min = 2.0");
  const fs::path corrupt = out / "corrupt.prob";
  std::ofstream(corrupt) << text;
  CHECK(run_cli("solve --problem '" + corrupt.string() + "' --eps 1e-3 --out '" + out.string() +
                "'") == 4);
}

TEST_CASE("cli solve supports the finite-difference oracle") {
  const fs::path out = temp_dir("fd_oracle");
  const std::string problem = (kFixtures / "single_mode_d1.prob").string();
  CHECK(run_cli("solve --problem '" + problem + "' --eps 1e-3 --oracle fd --fd-n 128 --out '" +
                out.string() + "'") == 0);
  const json ledger = json::parse(slurp(out / "ledger.json"));
  CHECK(ledger["run"]["oracle"] == "fd");
  CHECK(ledger["run"]["final_fd_rel_l2"].get<double>() <= 1e-3);
}

TEST_CASE("cli extract reports networks, errors, and budgets") {
  const fs::path out = temp_dir("extract");
  const std::string problem = (kFixtures / "single_mode_d1.prob").string();
  const int rc = run_cli("extract --problem '" + problem + "' --eps 0.05 --trials 5 --seed 3 --out '" +
                         out.string() + "'");
  CHECK(rc == 0);

  const json summary = json::parse(slurp(out / "extract_summary.json"));
  CHECK(summary["cosine"]["error_h1"].get<double>() <= 0.05);
  CHECK(summary["cosine"]["achieved_eps"].get<bool>());
  CHECK(summary["cosine"]["within_budget"].get<bool>());
  CHECK(summary["relu"]["box_audit"]["pass"].get<bool>());
  CHECK(summary.contains("neuron_budget_cos"));
  CHECK(summary.contains("neuron_budget_relu"));

  // Network files re-import cleanly.
  const barron::TwoLayerNet cosine = barron::load_network((out / "net_cosine.net").string());
  CHECK(cosine.activation == barron::Activation::Cosine);
  const barron::TwoLayerNet relu = barron::load_network((out / "net_relu.net").string());
  CHECK(relu.activation == barron::Activation::ReLU);

  const std::string errors = slurp(out / "extract_errors.csv");
  CHECK(errors.rfind("activation,k,error", 0) == 0);
}

TEST_CASE("cli verify passes and emits the machine-readable report") {
  const fs::path out = temp_dir("verify");
  CHECK(run_cli("verify --seed 1 --out '" + out.string() + "'") == 0);
  const json report = json::parse(slurp(out / "verify_report.json"));
  CHECK(report["all_pass"].get<bool>());
  bool has_poincare_d1 = false, has_poincare_d2 = false;
  for (const auto& check : report["checks"]) {
    if (check["check"] == "poincare_d1") has_poincare_d1 = true;
    if (check["check"] == "poincare_d2") has_poincare_d2 = true;
    CHECK(check["pass"].get<bool>());
  }
  CHECK(has_poincare_d1);
  CHECK(has_poincare_d2);
}

TEST_CASE("cli honors the output-directory environment default") {
  const fs::path out = temp_dir("envdir");
  const std::string problem = (kFixtures / "single_mode_d1.prob").string();
  const std::string cmd = "BARRONFLOW_OUT='" + out.string() + "' '" + kCli + "' solve --problem '" +
                          problem + "' --eps 1e-2 >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(fs::exists(out / "ledger.json"));
}

TEST_CASE("cli bench writes one row per dimension and boundary kind") {
  const fs::path out = temp_dir("bench");
  CHECK(run_cli("bench --dims 1,2 --eps 1e-2 --out '" + out.string() + "'") == 0);
  const std::string csv = slurp(out / "bench.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 4 rows
}
