#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

extern std::vector<std::string> test_args;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

// Run the CLI under test with `args`, capturing stdout+stderr.
RunResult run_cli(const std::string& args) {
  REQUIRE_FALSE(test_args.empty());
  const std::string out_path = "cli_test_output.txt";
  std::string cmd = "\"" + test_args[0] + "\" " + args + " > " + out_path +
                    " 2>&1";
  int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = (raw == -1) ? -1 : WEXITSTATUS(raw);
  std::ifstream in(out_path);
  std::ostringstream os;
  os << in.rdbuf();
  r.output = os.str();
  std::remove(out_path.c_str());
  return r;
}

}  // namespace

TEST_CASE("version and help") {
  RunResult r = run_cli("--version");
  CHECK(r.exit_code == 0);
  CHECK_FALSE(r.output.empty());

  r = run_cli("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("bound") != std::string::npos);
  CHECK(r.output.find("sweep") != std::string::npos);
  CHECK(r.output.find("equilibria") != std::string::npos);
  CHECK(r.output.find("simulate") != std::string::npos);
  CHECK(r.output.find("background") != std::string::npos);
  CHECK(r.output.find("export-sdpa") != std::string::npos);
}

TEST_CASE("unknown flags exit with a usage error") {
  RunResult r = run_cli("bound --no-such-flag");
  CHECK(r.exit_code == 1);
  r = run_cli("no-such-subcommand");
  CHECK(r.exit_code == 1);
}

TEST_CASE("bound subcommand reports the value and writes json") {
  const std::string json = "cli_bound.json";
  std::remove(json.c_str());
  RunResult r = run_cli("bound --kind truncated --L 3.5 --N 6 --degree 2 --out " +
                        json);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("9.07") != std::string::npos);
  CHECK(r.output.find("config_hash=") != std::string::npos);
  CHECK(r.output.find("status=optimal") != std::string::npos);
  std::ifstream in(json);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  CHECK(os.str().find("\"bound\"") != std::string::npos);
  std::remove(json.c_str());
}

TEST_CASE("sweep subcommand appends schema-stable csv rows") {
  const std::string csv = "cli_sweep.csv";
  std::remove(csv.c_str());
  RunResult r = run_cli("sweep --kind truncated --degree 2 --grid 2.0 --out " +
                        csv);
  CHECK(r.exit_code == 0);
  std::ifstream in(csv);
  REQUIRE(in.good());
  std::string line;
  bool header_seen = false;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.rfind("L,N,degree,kind,bound,status,primal_res,dual_res,iters,seconds",
                   0) == 0) {
      header_seen = true;
      continue;
    }
    if (!line.empty() && line.rfind("#", 0) != 0) ++rows;
  }
  CHECK(header_seen);
  CHECK(rows >= 1);
  std::remove(csv.c_str());
}

TEST_CASE("environment variables override defaults") {
  const std::string csv = "cli_bound_env.csv";
  std::remove(csv.c_str());
  setenv("KSBOUND_L", "3.5", 1);
  setenv("KSBOUND_N", "6", 1);
  RunResult r = run_cli("bound --kind truncated --degree 2 --out " + csv);
  unsetenv("KSBOUND_L");
  unsetenv("KSBOUND_N");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("9.07") != std::string::npos);
  std::remove(csv.c_str());
}

TEST_CASE("simulate subcommand reports decay") {
  const std::string csv = "cli_traj.csv";
  RunResult r = run_cli("simulate --L 0.9 --N 8 --T 120 --out " + csv);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("decayed to zero") != std::string::npos);
  std::ifstream in(csv);
  REQUIRE(in.good());
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line))
    if (line.rfind("t,energy", 0) == 0) header_seen = true;
  CHECK(header_seen);
  std::remove(csv.c_str());
}

TEST_CASE("simulate subcommand flags blow-up with a nonzero exit") {
  RunResult r = run_cli("simulate --L 4 --N 3 --T 200");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("blow-up detected") != std::string::npos);
}

TEST_CASE("equilibria subcommand writes branch samples") {
  const std::string csv = "cli_branch.csv";
  RunResult r = run_cli("equilibria --branch 1 --Lmax 1.4 --out " + csv);
  CHECK(r.exit_code == 0);
  std::ifstream in(csv);
  REQUIRE(in.good());
  std::string line;
  bool header_seen = false;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.rfind("n,L,N,energy,residual", 0) == 0) {
      header_seen = true;
      continue;
    }
    if (!line.empty() && line.rfind("#", 0) != 0) ++rows;
  }
  CHECK(header_seen);
  CHECK(rows > 3);
  std::remove(csv.c_str());
}

TEST_CASE("export subcommand emits a parseable program") {
  const std::string path = "cli_export.dat-s";
  RunResult r = run_cli("export-sdpa --kind truncated --L 2 --N 4 --degree 2 --out " +
                        path);
  CHECK(r.exit_code == 0);
  std::ifstream in(path);
  REQUIRE(in.good());
  int m = 0;
  in >> m;
  CHECK(m > 0);
  std::remove(path.c_str());
}

TEST_CASE("background subcommand reports alpha and writes the profile") {
  const std::string csv = "cli_profile.csv";
  const std::string json = "cli_profile.json";
  RunResult r = run_cli("background --L 1.8 --N 8 --out " + csv + " --json " +
                        json);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("alpha") != std::string::npos);
  std::ifstream cin_file(csv);
  CHECK(cin_file.good());
  std::ifstream jin(json);
  CHECK(jin.good());
  std::remove(csv.c_str());
  std::remove(json.c_str());
}
