#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kFixtures = RIBBONBV_FIXTURES;
const std::string kCli = RIBBONBV_CLI;

struct Run {
  int status = -1;
  std::string out;  // stdout and stderr
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + kCli + "' " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string fx(const std::string& name) { return "'" + kFixtures + "/" + name + "'"; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Scratch directory removed at scope exit.
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ribbonbv-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return "'" + (path / name).string() + "'"; }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("validate") {
  Run ok = run("validate " + fx("t4.alg"));
  CHECK(ok.status == 0);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  CHECK(ok.out.find("PASS homotopy dim_B=2") != std::string::npos);
  Run bad = run("validate " + fx("broken.alg"));
  CHECK(bad.status == 1);
  CHECK(bad.out.find("FAIL associativity witness=(") != std::string::npos);
  CHECK(run("validate " + fx("nosuch.alg")).status == 2);
  CHECK(run("validate " + fx("massey.alg") + " --double").status == 0);
  CHECK(run("validate " + fx("ainf_bad.alg")).status == 1);
}

TEST_CASE("enumerate") {
  Run tri = run("enumerate --chi 1 --legs 3 --trivalent --count-only");
  CHECK(tri.status == 0);
  // The two cyclic orders of the tripod are distinct leg-labeled classes.
  CHECK(tri.out == "2\n");
  Run none = run("enumerate --chi 1 --legs 2 --trivalent --count-only");
  CHECK(none.status == 0);
  CHECK(none.out == "0\n");
  auto census = oracle::brute_force_census(9, true, true);
  for (auto [chi, legs] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{0, 3}, std::pair{-1, 1}}) {
    CAPTURE(chi);
    CAPTURE(legs);
    Run r = run("enumerate --chi " + std::to_string(chi) + " --legs " + std::to_string(legs) + " --trivalent --count-only");
    CHECK(r.status == 0);
    auto it = census.classes.find({chi, legs});
    CHECK(r.out == std::to_string(it == census.classes.end() ? 0 : it->second) + "\n");
  }
  Run listing = run("enumerate --chi 1 --legs 3 --trivalent");
  CHECK(listing.status == 0);
  CHECK(listing.out.rfind("# chi=1 count=2\n", 0) == 0);
  CHECK(run("enumerate --chi 1").status == 2);
}

TEST_CASE("solve then check round trip") {
  TempDir tmp;
  Run solve = run("solve " + fx("t4.alg") + " --min-euler -1 --max-legs 6 -o " + tmp.file("S.txt"));
  REQUIRE(solve.status == 0);
  const std::string text = slurp(tmp.path / "S.txt");
  CHECK(text.find("# max_letters=6") != std::string::npos);
  CHECK(text.find("# max_hbar=2") != std::string::npos);
  CHECK(text.find("# chi_min=-1") != std::string::npos);
  CHECK(text.find("# weighting=classes") != std::string::npos);
  Run pass = run("check " + tmp.file("S.txt") + " " + fx("t4.alg") + " --window 4 2");
  CHECK(pass.status == 0);
  CHECK(pass.out.find("PASS") != std::string::npos);
  Run window = run("check " + tmp.file("S.txt") + " " + fx("t4.alg") + " --window 6 3");
  CHECK(window.status == 2);
  // The same run with three workers writes identical bytes.
  REQUIRE(run("solve " + fx("t4.alg") + " --min-euler -1 --max-legs 6 --jobs 3 -o " + tmp.file("S3.txt")).status == 0);
  CHECK(slurp(tmp.path / "S3.txt") == text);
  REQUIRE(run("solve " + fx("t4.alg") + " --min-euler -1 --max-legs 6 -o " + tmp.file("Senv.txt"), "RIBBONBV_JOBS=2")
              .status == 0);
  CHECK(slurp(tmp.path / "Senv.txt") == text);
  // JSON output checks the same way.
  REQUIRE(run("solve " + fx("t4.alg") + " --min-euler -1 --max-legs 6 --format json -o " + tmp.file("S.json")).status ==
          0);
  CHECK(run("check " + tmp.file("S.json") + " " + fx("t4.alg") + " --window 4 2").status == 0);
}

TEST_CASE("solve then check with a nonzero differential on B") {
  TempDir tmp;
  REQUIRE(run("solve " + fx("q2i.alg") + " --min-euler 0 --max-legs 6 -o " + tmp.file("S.txt")).status == 0);
  Run pass = run("check " + tmp.file("S.txt") + " " + fx("q2i.alg") + " --window 4 1");
  CHECK(pass.status == 0);
  CHECK(pass.out.find("PASS") != std::string::npos);
}

TEST_CASE("check on trivial and corrupted inputs") {
  CHECK(run("check " + fx("Szero.txt") + " " + fx("t4.alg") + " --window 2 1").status == 0);
  TempDir tmp;
  {
    std::ofstream out(tmp.path / "bad.txt");
    // hbar Delta of (u w w w) leaves hbar (w)(w).
    out << "# max_letters=6\n# max_hbar=2\nhbar=0 cycles=[[0,1,1,1]] coeff=1\n";
  }
  Run bad = run("check " + tmp.file("bad.txt") + " " + fx("t4.alg") + " --window 4 1");
  CHECK(bad.status == 1);
  CHECK(bad.out.find("FAIL") != std::string::npos);
  {
    std::ofstream out(tmp.path / "garbled.txt");
    out << "hbar=0 cycles=[[0,0,1] coeff=1\n";
  }
  CHECK(run("check " + tmp.file("garbled.txt") + " " + fx("t4.alg") + " --window 2 1").status == 2);
}

TEST_CASE("trees only and degenerate inputs") {
  TempDir tmp;
  REQUIRE(run("solve " + fx("t4.alg") + " --trees-only --max-legs 6 -o " + tmp.file("T.txt")).status == 0);
  const std::string trees = slurp(tmp.path / "T.txt");
  CHECK(trees.find("# max_hbar=0") != std::string::npos);
  CHECK(trees.find("hbar=1") == std::string::npos);
  REQUIRE(run("solve " + fx("q1.alg") + " --min-euler -1 --max-legs 4 -o " + tmp.file("Q.txt")).status == 0);
  CHECK(slurp(tmp.path / "Q.txt").find("# terms=0") != std::string::npos);
  CHECK(run("check " + tmp.file("Q.txt") + " " + fx("q1.alg") + " --window 2 1").status == 0);
}

TEST_CASE("A-infinity refusal and doubling") {
  Run refuse = run("solve " + fx("ainf_bad.alg"));
  CHECK(refuse.status == 1);
  CHECK(refuse.out.find("tadpole") != std::string::npos);
  TempDir tmp;
  REQUIRE(run("double " + fx("massey.alg") + " -o " + tmp.file("d.alg")).status == 0);
  CHECK(run("validate " + tmp.file("d.alg")).status == 0);
  REQUIRE(run("solve " + fx("massey.alg") + " --double --max-legs 4 -o " + tmp.file("M.txt")).status == 0);
  CHECK(run("check " + tmp.file("M.txt") + " " + fx("massey.alg") + " --double --window 2 0").status == 0);
}
