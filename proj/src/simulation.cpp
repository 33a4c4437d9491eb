#include "csivc/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "csivc/censoring.hpp"
#include "csivc/errors.hpp"

namespace csivc {

namespace {

constexpr std::uint64_t data_tag = 0x64617461;   // "data"
constexpr std::uint64_t probe_tag = 0x70726f62;  // "prob"

}  // namespace

void check_sim_config(const SimConfig& config) {
  if (config.n < 10) throw ValidationError("sim config: n must be >= 10");
  if (config.reps < 1) throw ValidationError("sim config: reps must be >= 1");
  if (!(config.censor_target >= 0.0 && config.censor_target < 1.0)) {
    throw ValidationError("sim config: censor_target must lie in [0,1)");
  }
  if (!(config.noise_sd > 0.0 && std::isfinite(config.noise_sd))) {
    throw ValidationError("sim config: noise_sd must be positive");
  }
  if (config.preset == Preset::reference && config.d != 2) throw ValidationError("sim config: reference preset needs d = 2");
  if (config.preset == Preset::constant) {
    if (config.constant_direction.size() != config.d) {
      throw ValidationError("sim config: constant_direction must have d components");
    }
    normalize_direction(config.constant_direction);
  }
}

std::string_view to_string(Preset preset) { return preset == Preset::reference ? "reference" : "constant"; }

Preset parse_preset(std::string_view name) {
  if (name == "reference") return Preset::reference;
  if (name == "constant") return Preset::constant;
  throw ValidationError("unknown preset '" + std::string(name) + "'");
}

double true_link(const SimConfig& config, double index) {
  return config.preset == Preset::reference ? index * index : index;
}

std::vector<double> true_direction(const SimConfig& config, double t) {
  if (config.preset == Preset::reference) return {std::cos(t), std::sin(t)};
  const auto dir = normalize_direction(config.constant_direction);
  return {dir.components().begin(), dir.components().end()};
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

namespace {

// One latent draw: covariates, modifier, response; consumes d + 2 variates.
struct LatentDraw {
  std::vector<double> x;
  double t = 0.0;
  double latent = 0.0;
};

LatentDraw draw_latent(const SimConfig& config, const std::vector<double>& fixed_direction, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LatentDraw out;
  out.x.resize(config.d);
  for (double& v : out.x) v = normal(rng);
  out.t = unit(rng);
  const double eps = config.noise_sd * normal(rng);
  double index = 0.0;
  if (config.preset == Preset::reference) {
    index = std::cos(out.t) * out.x[0] + std::sin(out.t) * out.x[1];
  } else {
    for (std::size_t j = 0; j < config.d; ++j) index += fixed_direction[j] * out.x[j];
  }
  out.latent = true_link(config, index) + eps;
  return out;
}

std::vector<double> fixed_direction(const SimConfig& config) {
  return config.preset == Preset::constant ? true_direction(config, 0.0) : std::vector<double>{};
}

}  // namespace

LatentProbe draw_latent_probe(const SimConfig& config, std::size_t count, std::uint64_t seed) {
  check_sim_config(config);
  auto rng = make_stream(seed, 0, probe_tag);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto dir = fixed_direction(config);
  LatentProbe probe;
  probe.latent.reserve(count);
  probe.censor_uniform.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    probe.latent.push_back(draw_latent(config, dir, rng).latent);
    probe.censor_uniform.push_back(unit(rng));
  }
  return probe;
}

GeneratedData generate_dataset(const SimConfig& config, double censor_bound, std::size_t rep) {
  check_sim_config(config);
  if (!(censor_bound > 0.0)) throw ValidationError("generate_dataset: censor bound must be positive");
  auto rng = make_stream(config.seed, rep, data_tag);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto dir = fixed_direction(config);
  std::vector<RawRow> rows;
  rows.reserve(config.n);
  std::vector<double> latent, censor;
  for (std::size_t i = 0; i < config.n; ++i) {
    auto draw = draw_latent(config, dir, rng);
    const double v = unit(rng);
    const double c = std::isinf(censor_bound) ? censor_bound : censor_bound * v;
    const bool observed = draw.latent < c;
    rows.push_back({observed ? draw.latent : c, observed ? 1 : 0, std::move(draw.x), draw.t});
    latent.push_back(draw.latent);
    censor.push_back(c);
  }
  return {validate_dataset(std::move(rows)), std::move(latent), std::move(censor)};
}

double censoring_bound(const SimConfig& config) {
  check_sim_config(config);
  if (config.censor_target == 0.0) return std::numeric_limits<double>::infinity();
  return calibrate_censoring(config.censor_target, config, config.probe_n, config.seed).c;
}

double pointwise_quantile(std::span<const double> values, double p) {
  if (values.empty()) throw ValidationError("pointwise_quantile: empty input");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("pointwise_quantile: p outside [0,1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // The slack keeps products such as 0.95 * 100 on their intended rank.
  auto rank = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

ReplicationResult run_replication(const SimConfig& sim, const FitConfig& fit, double censor_bound, std::size_t rep) {
  ReplicationResult out;
  out.rep = rep;
  try {
    const auto generated = generate_dataset(sim, censor_bound, rep);
    out.censoring_rate = censoring_rate(generated.data);
    const auto model = fit_model(generated.data, fit);
    out.coefficients.resize(sim.d);
    for (std::size_t j = 0; j < sim.d; ++j) out.coefficients[j] = model.curves.component(j);
    out.link = model.link.m_hat;
    out.nonconverged_points = static_cast<std::size_t>(
        std::count_if(model.diagnostics.begin(), model.diagnostics.end(), [](const auto& p) { return !p.converged; }));
    out.undefined_link_points =
        static_cast<std::size_t>(std::count(out.link.begin(), out.link.end(), std::nullopt));
    out.ok = true;
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

namespace {

void add_point(Band& band, std::vector<double>& values) {
  band.defined.push_back(values.size());
  if (values.empty()) {
    band.median.emplace_back();
    band.q05.emplace_back();
    band.q95.emplace_back();
    return;
  }
  band.median.emplace_back(pointwise_quantile(values, 0.5));
  band.q05.emplace_back(pointwise_quantile(values, 0.05));
  band.q95.emplace_back(pointwise_quantile(values, 0.95));
}

}  // namespace

SimSummary summarize(const SimConfig& sim, const FitConfig& fit, double censor_bound,
                     std::vector<ReplicationResult> replications) {
  std::sort(replications.begin(), replications.end(), [](const auto& a, const auto& b) { return a.rep < b.rep; });
  SimSummary summary;
  summary.censor_bound = censor_bound;
  summary.t_grid = linspace(0.0, 1.0, fit.t_grid_size);
  summary.u_grid = linspace(fit.link_grid.min, fit.link_grid.max, fit.link_grid.count);
  summary.coefficients.resize(sim.d);

  std::size_t failed = 0;
  for (const auto& r : replications) {
    if (r.ok) {
      summary.censoring_rates.push_back(r.censoring_rate);
      if (r.nonconverged_points > 0) {
        summary.failures.push_back("replication " + std::to_string(r.rep) + ": " +
                                   std::to_string(r.nonconverged_points) + " grid point(s) did not converge");
      }
      if (r.undefined_link_points > 0) {
        summary.failures.push_back("replication " + std::to_string(r.rep) + ": " +
                                   std::to_string(r.undefined_link_points) + " link grid point(s) with no local data");
      }
    } else {
      ++failed;
      summary.failures.push_back("replication " + std::to_string(r.rep) + " failed: " + r.error);
    }
  }
  summary.degraded = replications.empty() || 5 * failed > replications.size();

  std::vector<double> values;
  for (std::size_t j = 0; j < sim.d; ++j) {
    for (std::size_t k = 0; k < summary.t_grid.size(); ++k) {
      values.clear();
      for (const auto& r : replications) {
        if (r.ok) values.push_back(r.coefficients[j][k]);
      }
      add_point(summary.coefficients[j], values);
    }
  }
  for (std::size_t k = 0; k < summary.u_grid.size(); ++k) {
    values.clear();
    for (const auto& r : replications) {
      if (r.ok && r.link[k]) values.push_back(*r.link[k]);
    }
    add_point(summary.link, values);
  }
  summary.replications = std::move(replications);
  return summary;
}

SimSummary run_monte_carlo(const SimConfig& sim, const FitConfig& fit) {
  check_sim_config(sim);
  check_fit_config(fit);
  const double bound = censoring_bound(sim);

  std::vector<ReplicationResult> results(sim.reps);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t rep; (rep = next.fetch_add(1)) < sim.reps;) {
      results[rep] = run_replication(sim, fit, bound, rep);
    }
  };
  const unsigned workers =
      std::max(1u, std::min<unsigned>(sim.threads, static_cast<unsigned>(sim.reps)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  return summarize(sim, fit, bound, std::move(results));
}

}  // namespace csivc
