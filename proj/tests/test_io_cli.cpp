#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "csivc/cli.hpp"
#include "csivc/errors.hpp"
#include "csivc/io.hpp"
#include "doctest.h"

using namespace csivc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(CSIVC_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// Well-formedness check: balanced tags, no external references.
bool balanced_xml(const std::string& text) {
  std::vector<std::string> stack;
  for (std::size_t pos = 0; (pos = text.find('<', pos)) != std::string::npos;) {
    const auto close = text.find('>', pos);
    if (close == std::string::npos) return false;
    const std::string tag = text.substr(pos + 1, close - pos - 1);
    pos = close + 1;
    if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
    if (tag.back() == '/') continue;
    const auto name_end = tag.find_first_of(" \n\t");
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
    } else {
      stack.push_back(tag.substr(0, name_end));
    }
  }
  return stack.empty();
}

}  // namespace

TEST_CASE("observation CSV parsing is strict") {
  const auto dir = scratch("csv");
  write(dir / "ok.csv", "y,delta,t,x1,x2\n1.5,1,0.25,0.1,-2e-1\n0.7,0,1,3,4\n");
  const auto rows = io::read_observations_csv(dir / "ok.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].x[1] == -0.2);
  CHECK(rows[1].delta == 0);

  write(dir / "header.csv", "y,t,delta,x1\n1,1,0.5,1\n");
  CHECK_THROWS_AS(io::read_observations_csv(dir / "header.csv"), ValidationError);
  write(dir / "bad.csv", "y,delta,t,x1\n1,1,0.5,1\n1,1,0.5,1,000\n");
  CHECK_THROWS_WITH_AS(io::read_observations_csv(dir / "bad.csv"), doctest::Contains("line 3"), ValidationError);
  write(dir / "text.csv", "y,delta,t,x1\n1,1,0.5,abc\n");
  CHECK_THROWS_AS(io::read_observations_csv(dir / "text.csv"), ValidationError);
  write(dir / "frac.csv", "y,delta,t,x1\n1,1.0,0.5,1\n");
  CHECK_THROWS_AS(io::read_observations_csv(dir / "frac.csv"), ValidationError);
  CHECK_THROWS_AS(io::read_observations_csv(dir / "missing.csv"), IoError);
}

TEST_CASE("curves CSV round-trips to 12 significant digits") {
  const auto dir = scratch("curves");
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  CoefficientCurves curves;
  curves.grid = linspace(0.0, 1.0, 17);
  for (std::size_t k = 0; k < curves.grid.size(); ++k) {
    curves.directions.push_back(normalize_direction(std::vector<double>{std::abs(normal(rng)) + 1e-3, normal(rng), normal(rng)}));
  }
  io::write_curves_csv(dir / "curves.csv", curves);
  const auto back = io::read_curves_csv(dir / "curves.csv");
  REQUIRE(back.grid.size() == curves.grid.size());
  for (std::size_t k = 0; k < curves.grid.size(); ++k) {
    CHECK(back.grid[k] == curves.grid[k]);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(back.directions[k][j] == doctest::Approx(curves.directions[k][j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("config parsing") {
  const auto rc = io::parse_config(nlohmann::json::parse(R"({
    "fit": {"t_grid_size": 11, "bandwidths": {"h1": 0.3, "h2": 0.1, "h_link": 0.2},
            "kernel": "gaussian", "optimizer": {"restarts": 2}},
    "simulation": {"n": 100, "reps": 3, "preset": "constant", "constant_direction": [1, 1, 1]}
  })"));
  CHECK(rc.fit.t_grid_size == 11);
  REQUIRE(rc.fit.bandwidths.has_value());
  CHECK(rc.fit.bandwidths->h2 == 0.1);
  CHECK(rc.fit.kernel.family == KernelFamily::gaussian);
  CHECK(rc.fit.optimizer.restarts == 2);
  CHECK(rc.sim.d == 3);
  CHECK(rc.sim.preset == Preset::constant);

  CHECK_FALSE(io::parse_config(nlohmann::json::parse(R"({"fit": {"bandwidths": "auto"}})")).fit.bandwidths);
  CHECK_THROWS_AS(io::parse_config(nlohmann::json::parse(R"({"fit": {"typo": 1}})")), ValidationError);
  CHECK_THROWS_AS(io::parse_config(nlohmann::json::parse(R"({"fit": {"bandwidths": "cv"}})")), ValidationError);
  CHECK_THROWS_AS(io::parse_config(nlohmann::json::parse(R"({"fit": {"t_grid_size": "x"}})")), ValidationError);
  CHECK_THROWS_AS(io::parse_config(nlohmann::json::parse(R"({"simulation": {"noise_sd": -1}})")), ValidationError);
}

TEST_CASE("cli fit") {
  const auto dir = scratch("cli_fit");
  SimConfig sim;
  sim.probe_n = 20000;
  io::write_observations_csv(dir / "data.csv", generate_dataset(sim, censoring_bound(sim), 0).data);
  write(dir / "config.json", R"({"fit": {"t_grid_size": 6, "link_grid": {"min": -0.5, "max": 0.5, "count": 21}}})");

  const auto ok = invoke({"fit", "--data", (dir / "data.csv").string(), "--config", (dir / "config.json").string(), "--out",
                       (dir / "out").string()});
  CHECK(ok.code == cli::success);
  for (const char* f : {"curves.csv", "link.csv", "diagnostics.json", "manifest.json"}) CHECK(fs::exists(dir / "out" / f));
  const auto manifest = nlohmann::json::parse(io::read_text(dir / "out" / "manifest.json"));
  CHECK(manifest["files"].size() == 4);
  CHECK(io::read_curves_csv(dir / "out" / "curves.csv").grid.size() == 6);
  CHECK(io::read_text(dir / "out" / "link.csv").rfind("u,m_hat,defined\n", 0) == 0);

  const auto missing = invoke({"fit", "--data", (dir / "nope.csv").string(), "--config", (dir / "config.json").string(),
                            "--out", (dir / "out2").string()});
  CHECK(missing.code == cli::io_error);
  CHECK(missing.err.find("nope.csv") != std::string::npos);

  write(dir / "bad.csv", "y,delta,t,x1\n1,1,0.5,1\n2,2,0.5,1\n3,1,0.2,2\n");
  const auto invalid = invoke({"fit", "--data", (dir / "bad.csv").string(), "--config", (dir / "config.json").string(),
                            "--out", (dir / "out3").string()});
  CHECK(invalid.code == cli::validation_error);
  CHECK(invalid.err.find("row 1") != std::string::npos);

  CHECK(invoke({"fit", "--data", "x"}).code == cli::validation_error);
  CHECK(invoke({}).code == cli::validation_error);
}

TEST_CASE("cli simulate is byte-for-byte reproducible") {
  const auto dir = scratch("cli_sim");
  write(dir / "config.json", R"({
    "fit": {"t_grid_size": 5, "link_grid": {"min": -0.5, "max": 0.5, "count": 11}},
    "simulation": {"n": 150, "reps": 3, "probe_n": 20000, "seed": 7}
  })");
  const auto a = invoke({"simulate", "--config", (dir / "config.json").string(), "--out", (dir / "a").string(), "--raw"});
  const auto b = invoke({"simulate", "--config", (dir / "config.json").string(), "--out", (dir / "b").string()});
  REQUIRE(a.code == cli::success);
  REQUIRE(b.code == cli::success);
  CHECK(io::read_text(dir / "a" / "summary.csv") == io::read_text(dir / "b" / "summary.csv"));
  CHECK(io::read_text(dir / "a" / "link_summary.csv") == io::read_text(dir / "b" / "link_summary.csv"));
  CHECK(fs::exists(dir / "a" / "replications.csv"));
  CHECK_FALSE(fs::exists(dir / "b" / "replications.csv"));
  CHECK(io::read_text(dir / "a" / "summary.csv").rfind("t0,beta_1_median,beta_1_q05,beta_1_q95,beta_2_median", 0) == 0);

  write(dir / "one.json", R"({"fit": {"t_grid_size": 4}, "simulation": {"n": 150, "reps": 1, "probe_n": 20000}})");
  REQUIRE(invoke({"simulate", "--config", (dir / "one.json").string(), "--out", (dir / "one").string()}).code == 0);
  std::istringstream lines(io::read_text(dir / "one" / "summary.csv"));
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    CHECK(f[1] == f[2]);
    CHECK(f[1] == f[3]);
  }
}

TEST_CASE("cli reproduce-figures writes well-formed self-contained SVG") {
  const auto dir = scratch("cli_fig");
  const auto run = invoke({"reproduce-figures", "--out", (dir / "figs").string(), "--reps", "2", "--seed", "11"});
  REQUIRE(run.code == cli::success);
  for (const char* f : {"fig1.svg", "fig2.svg", "summary.csv", "link_summary.csv", "manifest.json"}) {
    CHECK(fs::exists(dir / "figs" / f));
  }
  for (const char* f : {"fig1.svg", "fig2.svg"}) {
    const auto text = io::read_text(dir / "figs" / f);
    CHECK(balanced_xml(text));
    CHECK(text.find("href") == std::string::npos);
    CHECK(text.find("url(") == std::string::npos);
  }
  const auto manifest = nlohmann::json::parse(io::read_text(dir / "figs" / "manifest.json"));
  CHECK(manifest["config"]["reps"] == 2);
  CHECK(manifest["seed"] == 11);

  std::istringstream link(io::read_text(dir / "figs" / "link_summary.csv"));
  std::string first, line, last;
  std::getline(link, line);
  std::getline(link, first);
  while (std::getline(link, line)) last = line;
  CHECK(first.rfind("-0.5,", 0) == 0);
  CHECK(last.rfind("0.5,", 0) == 0);
}
