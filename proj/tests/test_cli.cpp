#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hypangles_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd =
      env + " \"" + std::string(HYPANGLES_CLI) + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("cli enumerate writes elements and a summary") {
  const fs::path out = scratch("enum");
  REQUIRE(run("enumerate --Q 2.2360679775 --out " + out.string()).code == 0);
  const auto summary = lines(out / "enumerate_summary.csv");
  REQUIRE(summary.size() == 3);
  CHECK(summary[0].rfind("# hypangles ", 0) == 0);
  CHECK(summary[2].find(",10,") != std::string::npos);
  const auto elements = lines(out / "enumerate.csv");
  CHECK(elements.size() == 12);
  CHECK(elements[1] == "a,b,c,d,norm_sq,theta");
}

TEST_CASE("cli enumerate below sqrt 2 reports zero") {
  const fs::path out = scratch("enum0");
  REQUIRE(run("enumerate --Q 1.2 --summary-only --out " + out.string()).code == 0);
  const auto summary = lines(out / "enumerate_summary.csv");
  REQUIRE(summary.size() == 3);
  CHECK(summary[2].find(",0,") != std::string::npos);
  CHECK_FALSE(fs::exists(out / "enumerate.csv"));
}

TEST_CASE("cli error codes") {
  CHECK(run("enumerate --lattice nope --out " + scratch("bad").string()).code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("volcheck --M 1,0,0,1 --out " + scratch("k").string()).code == 2);
  CHECK(run("paircorr --xi-step 0 --out " + scratch("step").string()).code == 2);
  CHECK(run("enumerate --Q 3 --out /proc/hypangles_unwritable").code == 3);
}

TEST_CASE("cli paircorr is thread-count independent and honours the tolerance") {
  const fs::path a = scratch("pc1"), b = scratch("pc3");
  const std::string args = "paircorr --Q 120 --xi-max 2 --xi-step 0.1 --interval 0:pi ";
  const int ca = run(args + "--out " + a.string(), "HYPANGLES_THREADS=1").code;
  const int cb = run(args + "--out " + b.string(), "HYPANGLES_THREADS=3").code;
  CHECK(ca == cb);
  CHECK(slurp(a / "paircorr.csv") == slurp(b / "paircorr.csv"));
  const auto rows = lines(a / "paircorr.csv");
  REQUIRE(rows.size() == 22);
  CHECK(rows[1].find("R2_restricted") != std::string::npos);
  CHECK(run(args + "--tolerance 0 --out " + a.string()).code == 1);
}

TEST_CASE("cli config file with flag override") {
  const fs::path out = scratch("cfg");
  fs::create_directories(out);
  const fs::path cfg = out / "run.json";
  std::ofstream(cfg) << R"({"Q": 50, "xi-max": 1, "xi-step": 0.5, "out": ")" << out.string()
                     << R"("})";
  REQUIRE(run("density --config " + cfg.string() + " --Q 40").code == 0);
  const auto rows = lines(out / "density.csv");
  REQUIRE(rows.size() == 5);  // comment, header, xi = 0, 0.5, 1
  CHECK(rows[1] == "xi,g2_theory,R2_theory,tail_bound,R2_tail_bound");

  std::ofstream(cfg) << R"({"bogus": 1})";
  CHECK(run("density --config " + cfg.string()).code == 2);
}

TEST_CASE("cli volcheck: seed changes only the Monte Carlo columns") {
  const fs::path a = scratch("vc1"), b = scratch("vc2");
  const std::string args = "volcheck --Q-list 30 --xi-max 1 --xi-step 0.5 --samples 20000 ";
  CHECK(run(args + "--seed 1 --out " + a.string()).code == 0);
  CHECK(run(args + "--seed 2 --out " + b.string()).code == 0);
  const auto ra = lines(a / "volcheck.csv"), rb = lines(b / "volcheck.csv");
  REQUIRE(ra.size() == 4);
  REQUIRE(rb.size() == 4);
  auto cells = [](const std::string& row) {
    std::vector<std::string> c;
    std::stringstream ss(row);
    for (std::string cell; std::getline(ss, cell, ',');) c.push_back(cell);
    return c;
  };
  for (std::size_t k = 2; k < ra.size(); ++k) {
    const auto x = cells(ra[k]), y = cells(rb[k]);
    for (std::size_t j : {0u, 1u, 2u, 3u, 6u, 7u}) CHECK(x[j] == y[j]);
    CHECK(x[4] != y[4]);
  }
}

TEST_CASE("cli generator file enumeration") {
  const fs::path out = scratch("gen");
  const std::string file = std::string(HYPANGLES_SOURCE_DIR) + "/data/octagon_generators.json";
  REQUIRE(run("enumerate --generators " + file + " --Q 30 --summary-only --out " + out.string())
              .code == 0);
  const fs::path direct = scratch("gen_direct");
  REQUIRE(run("enumerate --lattice octagon --Q 30 --summary-only --out " + direct.string()).code ==
          0);
  const auto g = lines(out / "enumerate_summary.csv"), d = lines(direct / "enumerate_summary.csv");
  auto count = [](const std::string& row) {
    std::stringstream ss(row);
    std::string cell;
    for (int k = 0; k < 3; ++k) std::getline(ss, cell, ',');
    return cell;
  };
  CHECK(count(g[2]) == count(d[2]));
}
