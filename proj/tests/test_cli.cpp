#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Run {
  int code;
  std::string out, err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("ispec_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Run run(const std::string& args, const std::string& env = "") {
  const auto o = scratch() / "stdout.txt", e = scratch() / "stderr.txt";
  const std::string cmd = env + " '" + std::string(ISPEC_CLI_PATH) + "' " + args + " > '" + o.string() + "' 2> '" +
                          e.string() + "'";
  const int st = std::system(cmd.c_str());
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(o), slurp(e)};
}

std::string out_dir(const std::string& name) { return "--out '" + (scratch() / name).string() + "'"; }

}  // namespace

TEST_CASE("help and usage errors") {
  const auto h = run("--help");
  CHECK(h.code == 0);
  CHECK(h.out.find("CSV columns") != std::string::npos);
  CHECK(h.out.find("spectrum.csv") != std::string::npos);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run(out_dir("bad") + " spectrum --q bogus").code == 2);
  CHECK(run(out_dir("bad") + " spectrum --q const:nan").code == 2);
  CHECK(run(out_dir("bad") + " spectrum --n notanumber").code == 2);
  CHECK(run(out_dir("bad") + " reconstruct --pair 2,1").code == 2);
  CHECK(run(out_dir("bad") + " --config /nonexistent.json").code == 2);
}

TEST_CASE("spectrum table") {
  const auto r = run(out_dir("spec") + " spectrum --ell 0 --n 10 --q zero");
  REQUIRE(r.code == 0);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  CHECK(line == "ell,n,lambda,j2_free,remainder");
  for (int n = 1; n <= 10; ++n) {
    REQUIRE(std::getline(is, line));
    double ell, nn, lam;
    char c;
    std::istringstream ls(line);
    ls >> ell >> c >> nn >> c >> lam;
    CHECK(nn == n);
    CHECK(std::abs(lam / (n * n * kPi * kPi) - 1) <= 1e-8);
  }
  const auto dir = scratch() / "spec";
  CHECK(slurp(dir / "spectrum.svg").find("<polyline") != std::string::npos);
  CHECK(slurp(dir / "checks.csv").rfind("name,value,tol,pass", 0) == 0);
  // deterministic
  const auto again = run(out_dir("spec2") + " spectrum --ell 0 --n 10 --q zero");
  CHECK(slurp(dir / "spectrum.json") == slurp(scratch() / "spec2" / "spectrum.json"));
  CHECK(again.out == r.out);
  // a coarser grid through the environment
  const auto coarse = run(out_dir("spec3") + " spectrum --ell 2 --n 5", "ISPEC_GRID_PANELS=32");
  CHECK(coarse.code == 0);
}

TEST_CASE("obstruction value") {
  const auto r = run(out_dir("u2") + " uniq02 --obstruction");
  CHECK(r.code == 0);
  CHECK(r.out == "90.000000\n");
}

TEST_CASE("appendix report") {
  const auto r = run(out_dir("app") + " appendix-a");
  // b/K misses its target, so the run reports a tolerance failure
  CHECK(r.code == 1);
  CHECK(r.err.find("FAIL b_over_K") != std::string::npos);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["integral_cos"].get<double>() / -0.39843 - 1) <= 1e-3);
  CHECK(j["K_forced_zero"].get<bool>());
}

TEST_CASE("config file and external targets") {
  const auto cfg = scratch() / "cfg.json";
  std::ofstream(cfg) << R"({"command": "spectrum", "ell": 1, "n": 12, "q": "cos:0.05:2"})";
  const auto r = run(out_dir("s1") + " --config '" + cfg.string() + "'");
  REQUIRE(r.code == 0);
  REQUIRE(run(out_dir("s0") + " spectrum --ell 0 --n 12 --q cos:0.05:2").code == 0);
  const auto t = run(out_dir("rc") + " reconstruct --pair 0,1 --target1 '" + (scratch() / "s0" / "spectrum.json").string() +
                     "' --target2 '" + (scratch() / "s1" / "spectrum.json").string() + "'");
  CHECK(t.code == 0);
  const auto j = nlohmann::json::parse(t.out);
  CHECK(j["converged"].get<bool>());
  CHECK(j["q_error_if_known"].is_null());
  // the reconstructed potential against the one that made the spectra
  std::istringstream is(slurp(scratch() / "rc" / "reconstruct_q_hat.csv"));
  std::string line;
  std::getline(is, line);
  double worst = 0.0;
  while (std::getline(is, line)) {
    double x, v;
    char c;
    std::istringstream(line) >> x >> c >> v;
    worst = std::max(worst, std::abs(v - 0.05 * std::cos(2 * kPi * x)));
  }
  CHECK(worst <= 1e-3);
  CHECK(run(out_dir("rc") + " reconstruct --target1 '" + (scratch() / "s0" / "spectrum.json").string() + "'").code == 2);
}

TEST_CASE("scatter and linmap defaults") {
  const auto s = run(out_dir("sc") + " scatter");
  CHECK(s.code == 0);
  const auto j = nlohmann::json::parse(s.out);
  REQUIRE(j.size() == 3);
  for (const auto& e : j) {
    CHECK(std::abs(e["sigma_re"].get<double>() - 1) <= 1e-10);
    CHECK(e.contains("wronskian_check"));
  }
  const auto l = run(out_dir("lm") + " linmap --n 20");
  CHECK(l.code == 0);
  CHECK(nlohmann::json::parse(l.out)["kernel_dim_estimate"].get<int>() == 0);
}

TEST_CASE("solver failure") {
  CHECK(run(out_dir("sf") + " spectrum --n 2 --q const:1e12").code == 3);
}
