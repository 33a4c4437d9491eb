#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "csivc/estimator.hpp"
#include "csivc/model.hpp"

namespace csivc {

enum class Preset {
  reference,  // m(u) = u^2, beta(t) = (cos t, sin t), d = 2
  constant,   // m(u) = u, beta(t) = constant_direction
};

struct SimConfig {
  std::size_t n = 500;
  std::size_t d = 2;
  std::size_t reps = 100;
  double censor_target = 0.3;  // 0 disables censoring
  double noise_sd = 0.2;
  std::uint64_t seed = 20240601;
  Preset preset = Preset::reference;
  std::vector<double> constant_direction{0.6, 0.8};
  std::size_t probe_n = 100000;  // calibration sample size
  unsigned threads = 1;
};

void check_sim_config(const SimConfig& config);

std::string_view to_string(Preset preset);
Preset parse_preset(std::string_view name);

// True link and coefficient curves of the preset.
double true_link(const SimConfig& config, double index);
std::vector<double> true_direction(const SimConfig& config, double t);

// Independent engine for (seed, stream, tag); the tag separates purposes
// (data, calibration probe, ...) so streams never overlap.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag);

struct LatentProbe {
  std::vector<double> latent;          // Y*
  std::vector<double> censor_uniform;  // V ~ U(0,1); C = c V
};

LatentProbe draw_latent_probe(const SimConfig& config, std::size_t count, std::uint64_t seed);

struct GeneratedData {
  Dataset data;
  std::vector<double> latent;
  std::vector<double> censor;
};

// Replication `rep` of the preset DGP with C ~ Uniform(0, censor_bound);
// an infinite bound means no censoring.
GeneratedData generate_dataset(const SimConfig& config, double censor_bound, std::size_t rep);

// Censoring bound for the config: calibrated, or +inf when censor_target is 0.
double censoring_bound(const SimConfig& config);

// Nearest-rank quantile: the ceil(p n)-th smallest value, minimum for p = 0.
double pointwise_quantile(std::span<const double> values, double p);

struct Band {
  std::vector<std::optional<double>> median;
  std::vector<std::optional<double>> q05;
  std::vector<std::optional<double>> q95;
  std::vector<std::size_t> defined;  // replications contributing per grid point
};

struct ReplicationResult {
  std::size_t rep = 0;
  bool ok = false;
  std::string error;
  double censoring_rate = 0.0;
  std::vector<std::vector<double>> coefficients;  // [j][grid point]
  std::vector<std::optional<double>> link;
  std::size_t nonconverged_points = 0;
  std::size_t undefined_link_points = 0;
};

struct SimSummary {
  std::vector<double> t_grid;
  std::vector<Band> coefficients;  // one per covariate
  std::vector<double> u_grid;
  Band link;
  double censor_bound = 0.0;
  std::vector<double> censoring_rates;  // per successful replication
  std::vector<std::string> failures;
  bool degraded = false;  // more than 20% of replications failed
  std::vector<ReplicationResult> replications;
};

ReplicationResult run_replication(const SimConfig& sim, const FitConfig& fit, double censor_bound, std::size_t rep);

// Aggregates pointwise bands over the successful replications.
SimSummary summarize(const SimConfig& sim, const FitConfig& fit, double censor_bound,
                     std::vector<ReplicationResult> replications);

SimSummary run_monte_carlo(const SimConfig& sim, const FitConfig& fit);

}  // namespace csivc
