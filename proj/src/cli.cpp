#include "csivc/cli.hpp"

#include <chrono>
#include <thread>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "csivc/errors.hpp"
#include "csivc/io.hpp"
#include "csivc/simd.hpp"
#include "csivc/svg.hpp"

namespace csivc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Manifest {
  std::string command;
  json config;
  std::uint64_t seed = 0;
  std::vector<std::string> files;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
};

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory: " + dir.string());
}

// Writes manifest.json after checking every promised file exists.
void finish_manifest(Manifest& m, const fs::path& dir) {
  m.files.push_back("manifest.json");
  for (const auto& f : m.files) {
    if (f != "manifest.json" && !fs::exists(dir / f)) throw IoError("expected output missing: " + (dir / f).string());
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - m.started).count();
  json doc = {{"command", m.command},
              {"config", m.config},
              {"seed", m.seed},
              {"versions", {{"csivc", version}, {"simd", std::string(simd::isa_name(simd::active_isa()))}}},
              {"files", m.files},
              {"wall_clock_seconds", seconds}};
  io::write_text(dir / "manifest.json", doc.dump(2) + "\n");
}

svg::Series series(const std::vector<double>& x, const std::vector<std::optional<double>>& y) { return {x, y}; }

svg::Series truth_series(const std::vector<double>& x, auto&& f) {
  svg::Series s{x, {}};
  for (double v : x) s.y.emplace_back(f(v));
  return s;
}

int cmd_fit(const fs::path& data_path, const fs::path& config_path, const fs::path& out_dir, std::ostream& out) {
  Manifest m;
  m.command = "fit";
  const auto rc = io::read_config(config_path);
  const auto raw = io::read_observations_csv(data_path);
  Dataset data = [&] {
    try {
      return validate_dataset(raw);
    } catch (const ValidationError& e) {
      throw ValidationError(data_path.string() + ": " + e.what());
    }
  }();
  prepare_out_dir(out_dir);
  const auto fit = fit_model(data, rc.fit);
  io::write_curves_csv(out_dir / "curves.csv", fit.curves);
  io::write_link_csv(out_dir / "link.csv", fit.link);
  io::write_text(out_dir / "diagnostics.json", io::diagnostics_json(fit).dump(2) + "\n");
  m.files = {"curves.csv", "link.csv", "diagnostics.json"};
  m.config = {{"fit", io::to_json(rc.fit)}, {"data", data_path.string()}, {"rows", data.size()}};
  finish_manifest(m, out_dir);
  out << "fit: " << data.size() << " rows, " << fit.curves.grid.size() << " grid points -> " << out_dir.string() << '\n';
  return success;
}

void report(const SimSummary& summary, std::ostream& out) {
  const std::size_t ok = summary.censoring_rates.size();
  double rate = 0.0;
  for (double r : summary.censoring_rates) rate += r;
  out << "replications: " << ok << " of " << summary.replications.size() << " succeeded";
  if (ok > 0) out << ", mean censoring " << rate / static_cast<double>(ok);
  out << '\n';
  if (summary.degraded) out << "WARNING: degraded summary (more than 20% of replications failed)\n";
}

int cmd_simulate(const fs::path& config_path, const fs::path& out_dir, bool raw, std::ostream& out) {
  Manifest m;
  m.command = "simulate";
  const auto rc = io::read_config(config_path);
  prepare_out_dir(out_dir);
  const auto summary = run_monte_carlo(rc.sim, rc.fit);
  io::write_summary_csv(out_dir / "summary.csv", summary);
  io::write_link_summary_csv(out_dir / "link_summary.csv", summary);
  m.files = {"summary.csv", "link_summary.csv"};
  if (raw) {
    io::write_replications_csv(out_dir / "replications.csv", summary);
    m.files.push_back("replications.csv");
  }
  m.seed = rc.sim.seed;
  m.config = {{"fit", io::to_json(rc.fit)}, {"simulation", io::to_json(rc.sim)}, {"censor_bound", summary.censor_bound},
              {"degraded", summary.degraded}, {"failures", summary.failures}};
  finish_manifest(m, out_dir);
  report(summary, out);
  return summary.degraded ? estimation_failure : success;
}

int cmd_reproduce(const fs::path& out_dir, std::size_t reps, std::uint64_t seed, unsigned threads, std::ostream& out) {
  Manifest m;
  m.command = "reproduce-figures";
  SimConfig sim;
  sim.reps = reps;
  sim.seed = seed;
  sim.threads = threads;
  FitConfig fit;
  prepare_out_dir(out_dir);
  const auto summary = run_monte_carlo(sim, fit);
  io::write_summary_csv(out_dir / "summary.csv", summary);
  io::write_link_summary_csv(out_dir / "link_summary.csv", summary);

  std::vector<svg::Panel> fig1;
  for (std::size_t j = 0; j < 2; ++j) {
    const auto& band = summary.coefficients[j];
    svg::Panel p;
    p.title = "beta_" + std::to_string(j + 1) + "(t)";
    p.x_label = "t";
    p.median = series(summary.t_grid, band.median);
    p.lower = series(summary.t_grid, band.q05);
    p.upper = series(summary.t_grid, band.q95);
    p.truth = truth_series(summary.t_grid, [&](double t) { return true_direction(sim, t)[j]; });
    fig1.push_back(std::move(p));
  }
  io::write_text(out_dir / "fig1.svg", svg::render(fig1, "Varying coefficient components: median, 5%-95% band, truth (dashed)"));

  svg::Panel link;
  link.title = "m(u)";
  link.x_label = "u";
  link.median = series(summary.u_grid, summary.link.median);
  link.lower = series(summary.u_grid, summary.link.q05);
  link.upper = series(summary.u_grid, summary.link.q95);
  link.truth = truth_series(summary.u_grid, [&](double u) { return true_link(sim, u); });
  io::write_text(out_dir / "fig2.svg", svg::render({link}, "Link function: median, 5%-95% band, truth u^2 (dashed)"));

  m.files = {"fig1.svg", "fig2.svg", "summary.csv", "link_summary.csv"};
  m.seed = seed;
  m.config = {{"fit", io::to_json(fit)}, {"simulation", io::to_json(sim)}, {"reps", reps},
              {"censor_bound", summary.censor_bound}, {"degraded", summary.degraded}, {"failures", summary.failures}};
  finish_manifest(m, out_dir);
  report(summary, out);
  return summary.degraded ? estimation_failure : success;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Censored single-index varying-coefficient models"};
  app.require_subcommand(1);
  std::string data_path, config_path, out_dir;
  bool raw = false;
  std::size_t reps = 100;
  std::uint64_t seed = SimConfig{}.seed;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());

  auto* fit = app.add_subcommand("fit", "Fit a model to a CSV file (y,delta,t,x1,...,xd)");
  fit->add_option("--data", data_path, "Input CSV")->required();
  fit->add_option("--config", config_path, "JSON config")->required();
  fit->add_option("--out", out_dir, "Output directory")->required();

  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo study from a JSON config");
  simulate->add_option("--config", config_path, "JSON config")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_flag("--raw", raw, "Also write per-replication estimates");

  auto* reproduce = app.add_subcommand("reproduce-figures", "Run the reference study and draw both figures");
  reproduce->add_option("--out", out_dir, "Output directory")->required();
  reproduce->add_option("--reps", reps, "Replications")->check(CLI::PositiveNumber);
  reproduce->add_option("--seed", seed, "Master seed");
  reproduce->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return success;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return validation_error;
  }

  try {
    if (*fit) return cmd_fit(data_path, config_path, out_dir, out);
    if (*simulate) return cmd_simulate(config_path, out_dir, raw, out);
    return cmd_reproduce(out_dir, reps, seed, threads, out);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return validation_error;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return io_error;
  } catch (const Error& e) {
    err << "estimation failure: " << e.what() << '\n';
    return estimation_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return estimation_failure;
  }
}

}  // namespace csivc::cli
