#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "spinsde/commands.hpp"
#include "spinsde/dynamics.hpp"

using namespace spinsde;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::vector<const char*> argv{"spinsde"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<double>> rows(const std::string& csv) {
  std::vector<std::vector<double>> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty() || !(std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '-')) {
      break;
    }
    std::vector<double> r;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) r.push_back(std::stod(cell));
    out.push_back(r);
  }
  return out;
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("spinsde_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("sibling paths") {
  CHECK(sibling_path("a/b.csv", "_x") == "a/b_x.csv");
  CHECK(sibling_path("a.b/c", "_x") == "a.b/c_x");
  CHECK(sibling_path("out", "_x") == "out_x");
}

TEST_CASE("simulate writes the trajectory CSV") {
  const auto r = cli({"simulate", "--preset", "fig2", "--T", "1", "--record-times", "uniform:4"});
  CHECK(r.code == 0);
  CHECK(r.out.starts_with("t,mu_x,mu_y,mu_z,norm\n0,-0.5,"));
  const auto data = rows(r.out);
  REQUIRE(data.size() == 5);
  for (const auto& row : data) CHECK(std::abs(row[4] - 1.0) <= 1e-10);
}

TEST_CASE("fig4: escape from the antipode") {
  const auto r = cli({"simulate", "--preset", "fig4", "--record-times", "all"});
  REQUIRE(r.code == 0);
  const auto data = rows(r.out);
  CHECK(data.front()[1] == -1.0);
  CHECK(data.back()[1] >= 0.99);
}

TEST_CASE("fig5: the latitude locks") {
  const auto r = cli({"simulate", "--preset", "fig5", "--record-times", "25,50"});
  REQUIRE(r.code == 0);
  const auto data = rows(r.out);
  REQUIRE(data.size() == 2);
  CHECK(std::abs(data[1][1] - data[0][1]) <= 0.05);

  // Same Brownian path through the exact alpha = 0 solution.
  const auto exact = exact_alpha0_path(NoiseSchedule::power_law(0.3, 2.0), Vec3::UnitX(),
                                       Vec3(-0.5, std::sqrt(0.75), 0.0), 50.0, 2e-3,
                                       path_seed(0, 0));
  CHECK(std::abs(exact.states.back()(0) - data[1][1]) <= 0.02);
}

TEST_CASE("malformed input exits 2 without writing") {
  TempDir dir;
  const std::string out = dir / "sim.csv";
  auto r = cli({"simulate", "--set", "alpha=not-a-number", "--output", out});
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(out));

  const std::string cfg = dir / "bad.cfg";
  std::ofstream(cfg) << "alpha=2\nfrobnicate=1\n";
  r = cli({"simulate", "--config", cfg, "--output", out});
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(r.err.find("frobnicate") != std::string::npos);

  CHECK(cli({"simulate", "--config", dir / "missing.cfg"}).code == 2);
  CHECK(cli({"simulate", "--no-such-flag"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"alpha0", "--preset", "fig5", "--n-paths", "0"}).code == 2);
  CHECK(cli({"simulate", "--preset", "fig2", "--scheme", "midpoint", "--model", "pullback-ito"})
            .code == 2);
}

TEST_CASE("scheme failure exits 3") {
  TempDir dir;
  const std::string out = dir / "sim.csv";
  const auto r = cli({"simulate", "--preset", "fig2", "--dt", "5", "--T", "20", "--output", out});
  CHECK(r.code == 3);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("moments") {
  TempDir dir;
  const std::string out = dir / "m.csv";
  auto r = cli({"moments", "--preset", "fig2", "--n-paths", "100", "--output", out});
  REQUIRE(r.code == 0);
  const std::string gap = slurp(out);
  const std::string sq = slurp(dir / "m_sqnorm.csv");
  CHECK(gap.starts_with("t,mean,stderr,n_paths\n"));
  CHECK(gap.find("\nlimit,1.25,") != std::string::npos);
  CHECK(sq.find("\nlimit,2.5,") != std::string::npos);
  const auto g = rows(gap);
  CHECK(std::abs(g.back()[1] - 1.25) <= 3.0 * g.back()[2] + 0.125);

  r = cli({"moments", "--preset", "fig2", "--n-paths", "4", "--T", "1", "--p", "0"});
  REQUIRE(r.code == 0);
  for (const auto& row : rows(r.out)) CHECK(row[1] == 1.0);

  CHECK(cli({"moments", "--preset", "fig5", "--output", out + ".x"}).code == 4);
  CHECK_FALSE(fs::exists(out + ".x"));
  CHECK(cli({"moments", "--preset", "fig2", "--model", "deterministic"}).code == 2);
}

TEST_CASE("alpha0") {
  TempDir dir;
  const std::string out = dir / "a0.csv";
  const auto r = cli({"alpha0", "--preset", "fig5", "--T", "10", "--n-paths", "200",
                      "--record-times", "uniform:5", "--output", out});
  REQUIRE(r.code == 0);
  CHECK(slurp(out).starts_with("t,mean,mean_y,mean_z,stderr,n_paths\n"));
  const std::string mart = slurp(dir / "a0_martingale.csv");
  CHECK(mart.starts_with("t,mean,stderr,n_paths,bound\n0,0,0,200,0\n"));
  for (const auto& row : rows(mart)) {
    if (row[0] == 0.0) continue;
    CHECK(std::abs(row[1] - row[4]) <= 3.0 * row[2]);
  }
  CHECK(cli({"alpha0", "--preset", "fig2"}).code == 2);
}

TEST_CASE("verify") {
  auto r = cli({"verify"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);

  r = cli({"verify", "--only", "lemmas"});
  CHECK(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);

  CHECK(cli({"verify", "--only", "nothing"}).code == 2);

  const auto flipped = cmd_verify({"drift"}, [](const Vec3& x, double alpha) {
    return Vec3(2.0 * (alpha * alpha * x.squaredNorm() + 1.0) * x);
  });
  CHECK(flipped.exit_code == kExitGateFailed);
  CHECK(flipped.files.at(0).content.find("FAIL") != std::string::npos);
}

TEST_CASE("schemes-compare") {
  // rows() stops at non-numeric lines, so parse the scheme rows by hand.
  auto parse = [](const std::string& csv) {
    std::vector<std::vector<double>> out;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::vector<double> r;
      std::istringstream ls(line.substr(line.find(',') + 1));
      std::string cell;
      while (std::getline(ls, cell, ',')) r.push_back(std::stod(cell));
      out.push_back(r);
    }
    return out;
  };
  const auto coarse = cli({"schemes-compare", "--preset", "fig2", "--T", "2", "--n-paths", "16",
                           "--dt", "0.02"});
  const auto fine = cli({"schemes-compare", "--preset", "fig2", "--T", "2", "--n-paths", "16",
                         "--dt", "0.005"});
  REQUIRE(coarse.code == 0);
  REQUIRE(fine.code == 0);
  CHECK(coarse.out.starts_with(
      "scheme,dt,norm_drift_max,norm_drift_mean,terminal_error_rms,n_paths\neuler,"));
  const auto c = parse(coarse.out);
  const auto f = parse(fine.out);
  REQUIRE(c.size() == 3);
  // columns after the name: dt, max, mean, rms, n
  CHECK(c[0][1] > 0.0);
  CHECK(c[0][1] <= 3.0 * 0.02);
  CHECK(c[1][1] <= 1e-14);
  CHECK(c[2][1] <= 1e-10);
  for (int s = 0; s < 3; ++s) CHECK(f[s][3] < c[s][3]);
}

TEST_CASE("config echo round-trips and flags override files") {
  TempDir dir;
  const auto r = cli({"config", "--preset", "fig3"});
  REQUIRE(r.code == 0);
  const std::string cfg = dir / "fig3.cfg";
  std::ofstream(cfg) << r.out;
  const auto again = cli({"config", "--config", cfg});
  CHECK(again.out == r.out);

  const auto layered = cli({"config", "--preset", "fig2", "--config", cfg, "--set", "alpha=3",
                            "--alpha", "4", "--seed", "9"});
  CHECK(layered.out.find("\nalpha=4\n") != std::string::npos);
  CHECK(layered.out.find("\nbeta=0.33333333333333331\n") != std::string::npos);
  CHECK(layered.out.find("\nmaster_seed=9\n") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across runs and thread counts") {
  const std::vector<std::string> base{"moments", "--preset", "fig2", "--n-paths", "32", "--T",
                                      "3"};
  auto with = [&](const char* threads) {
    auto a = base;
    a.push_back("--threads");
    a.push_back(threads);
    return cli(a).out;
  };
  const std::string one = with("1");
  CHECK(one == with("1"));
  CHECK(one == with("3"));
  CHECK(one == with("0"));
}
