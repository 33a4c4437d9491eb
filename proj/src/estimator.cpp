#include "csivc/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "csivc/errors.hpp"
#include "csivc/nelder_mead.hpp"
#include "csivc/simd.hpp"

namespace csivc {

void check_fit_config(const FitConfig& config) {
  if (config.t_grid_size < 2) throw ValidationError("fit config: t_grid_size must be >= 2");
  if (config.link_grid.count < 2) throw ValidationError("fit config: link grid count must be >= 2");
  if (!(config.link_grid.min < config.link_grid.max)) {
    throw ValidationError("fit config: link grid min must be below max");
  }
  if (!(config.optimizer.tolerance > 0.0)) throw ValidationError("fit config: optimizer tolerance must be > 0");
  if (config.optimizer.restarts < 1) throw ValidationError("fit config: restarts must be >= 1");
  if (config.optimizer.max_iterations < 1) throw ValidationError("fit config: max_iterations must be >= 1");
  if (config.bandwidths) check_bandwidths(*config.bandwidths);
}

LocalObjective::LocalObjective(const DesignMatrix& design, double t0, const Bandwidths& bw, KernelSpec spec)
    : n_total_(design.n),
      d_(design.d),
      inv_h1_(1.0 / bw.h1),
      scale_(1.0 / (static_cast<double>(design.n) * bw.h2)),
      spec_(spec) {
  check_bandwidths(bw);
  for (std::size_t i = 0; i < design.n; ++i) {
    const double w = kernel_weight(spec, (design.t[i] - t0) / bw.h2);
    if (!(w > 0.0)) continue;
    const auto row = design.row(i);
    x_.insert(x_.end(), row.begin(), row.end());
    y_.push_back(design.y[i]);
    w_.push_back(w);
  }
  if (y_.size() < 2) {
    throw EstimationError("insufficient local sample at t0=" + std::to_string(t0) + " (" +
                          std::to_string(y_.size()) + " rows with positive modifier weight)");
  }
}

ObjectiveValue LocalObjective::operator()(const UnitDirection& theta) const {
  if (theta.dim() != d_) throw ValidationError("local objective: dimension mismatch");
  std::vector<double> index(y_.size());
  simd::project(x_, theta.components(), index);
  ObjectiveValue out;
  double acc = 0.0;
  for (std::size_t i = 0; i < y_.size(); ++i) {
    const auto s = simd::weighted_sums({spec_.family, index, y_, w_, index[i], inv_h1_, i});
    if (!(s.denominator >= min_weight_sum)) {
      ++out.empty_neighbourhoods;
      continue;
    }
    const double r = y_[i] - s.numerator / s.denominator;
    acc += r * r * w_[i];
  }
  out.value = acc * scale_;
  return out;
}

ObjectiveValue local_objective(const Dataset& data, double t0, const UnitDirection& theta, const Bandwidths& bw,
                               KernelSpec spec) {
  if (!(t0 >= 0.0 && t0 <= 1.0)) throw ValidationError("local_objective: t0 outside [0,1]");
  return LocalObjective(DesignMatrix(data), t0, bw, spec)(theta);
}

std::vector<double> direction_from_angles(std::span<const double> angles) {
  const std::size_t d = angles.size() + 1;
  std::vector<double> v(d);
  double sin_prod = 1.0;
  for (std::size_t k = 0; k + 1 < d; ++k) {
    v[k] = sin_prod * std::cos(angles[k]);
    sin_prod *= std::sin(angles[k]);
  }
  v[d - 1] = sin_prod;
  return v;
}

namespace {

std::vector<double> angles_from_direction(const UnitDirection& dir) {
  const std::size_t d = dir.dim();
  std::vector<double> a(d - 1);
  for (std::size_t k = 0; k + 2 < d; ++k) {
    double tail = 0.0;
    for (std::size_t j = k + 1; j < d; ++j) tail = std::hypot(tail, dir[j]);
    a[k] = std::atan2(tail, dir[k]);
  }
  a[d - 2] = std::atan2(dir[d - 1], dir[d - 2]);
  return a;
}

// Cold start k of `count`: first angle spread over the open hemisphere,
// remaining angles on a golden-ratio sequence.
std::vector<double> spread_start(std::size_t dim, int k, int count) {
  std::vector<double> a(dim - 1, 0.0);
  a[0] = -std::numbers::pi / 2 + std::numbers::pi * (k + 0.5) / count;
  for (std::size_t j = 1; j < a.size(); ++j) {
    const double frac = std::fmod(std::numbers::phi * (k + 1) * j, 1.0);
    a[j] = 2.0 * std::numbers::pi * frac - std::numbers::pi;
  }
  return a;
}

bool smaller_angle(const UnitDirection& a, const UnitDirection& b) {
  for (std::size_t j = 1; j < a.dim(); ++j) {
    if (a[j] != b[j]) return a[j] < b[j];
  }
  return false;
}

}  // namespace

DirectionFit fit_direction_at(const DesignMatrix& design, double t0, const Bandwidths& bw, const FitConfig& config,
                              const std::optional<UnitDirection>& warm_start, int restarts) {
  if (design.d < 1) throw ValidationError("fit_direction_at: no covariates");
  const LocalObjective objective(design, t0, bw, config.kernel);

  if (design.d == 1) {
    // The hemisphere in one dimension is the single point (1).
    auto dir = normalize_direction(std::vector<double>{1.0});
    const auto value = objective(dir);
    DirectionFit fit{dir, value.value, 0, 1, true, value.empty_neighbourhoods, objective.local_rows(), {value.value}};
    return fit;
  }

  const auto in_angles = [&](const std::vector<double>& angles) {
    const auto raw = direction_from_angles(angles);
    if (raw[0] == 0.0) return std::numeric_limits<double>::infinity();
    return objective(normalize_direction(raw)).value;
  };

  struct Start {
    std::vector<double> angles;
    double step;
  };
  std::vector<Start> starts;
  if (warm_start) {
    if (warm_start->dim() != design.d) throw ValidationError("fit_direction_at: warm start dimension mismatch");
    starts.push_back({angles_from_direction(*warm_start), 0.05});
  }
  for (int k = 0; k < restarts; ++k) {
    starts.push_back({spread_start(design.d, k, restarts), 0.5 * std::numbers::pi / restarts});
  }
  if (starts.empty()) throw ValidationError("fit_direction_at: no warm start and no restarts");

  NelderMeadOptions nm;
  nm.max_iterations = config.optimizer.max_iterations;
  nm.f_tolerance = config.optimizer.tolerance;

  struct Candidate {
    UnitDirection direction;
    NelderMeadResult result;
  };
  std::vector<Candidate> candidates;
  std::vector<double> start_values;
  int total_evals = 0;
  for (const auto& s : starts) {
    start_values.push_back(in_angles(s.angles));
    nm.initial_step = s.step;
    auto res = nelder_mead(in_angles, s.angles, nm);
    total_evals += res.evaluations;
    auto raw = direction_from_angles(res.x);
    if (raw[0] == 0.0) continue;
    candidates.push_back({normalize_direction(raw), std::move(res)});
  }
  if (candidates.empty()) throw EstimationError("fit_direction_at: every start ended on the hemisphere boundary");

  double best_f = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) best_f = std::min(best_f, c.result.f);
  const Candidate* chosen = nullptr;
  for (const auto& c : candidates) {
    if (!(c.result.f <= best_f + config.optimizer.tolerance)) continue;
    if (chosen == nullptr || smaller_angle(c.direction, chosen->direction)) chosen = &c;
  }

  const auto final_value = objective(chosen->direction);
  DirectionFit fit{chosen->direction,
                   final_value.value,
                   chosen->result.iterations,
                   total_evals,
                   chosen->result.converged,
                   final_value.empty_neighbourhoods,
                   objective.local_rows(),
                   std::move(start_values)};
  return fit;
}

DirectionFit fit_direction_at(const Dataset& data, double t0, const FitConfig& config,
                              const std::optional<UnitDirection>& warm_start) {
  check_fit_config(config);
  if (data.size() < 10) throw ValidationError("fit_direction_at: need n >= 10");
  if (!(t0 >= 0.0 && t0 <= 1.0)) throw ValidationError("fit_direction_at: t0 outside [0,1]");
  const Bandwidths bw = config.bandwidths ? *config.bandwidths : select_bandwidths(data, config.kernel);
  return fit_direction_at(DesignMatrix(data), t0, bw, config, warm_start, config.optimizer.restarts);
}

CurveFit fit_coefficient_curves(const Dataset& data, const FitConfig& config, const Bandwidths& bw) {
  check_fit_config(config);
  check_bandwidths(bw);
  if (data.size() < 10) throw ValidationError("fit_coefficient_curves: need n >= 10");
  const DesignMatrix design(data);
  const auto grid = linspace(0.0, 1.0, config.t_grid_size);
  const auto at = [&](std::size_t k, const std::optional<UnitDirection>& warm, int restarts) {
    try {
      return fit_direction_at(design, grid[k], bw, config, warm, restarts);
    } catch (const Error& e) {
      throw EstimationError("grid point " + std::to_string(k) + " (t0=" + std::to_string(grid[k]) + "): " + e.what());
    }
  };

  std::vector<std::optional<DirectionFit>> points(grid.size());
  if (!config.independent_grid) {
    std::optional<UnitDirection> warm;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      points[k] = at(k, warm, k == 0 ? config.optimizer.restarts : 0);
      warm = points[k]->direction;
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(grid.size());
    const auto work = [&] {
      for (std::size_t k; (k = next.fetch_add(1)) < grid.size();) {
        try {
          points[k] = at(k, std::nullopt, config.optimizer.restarts);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(grid.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  CurveFit out;
  out.bandwidths = bw;
  out.curves.grid = grid;
  for (auto& p : points) {
    out.curves.directions.push_back(p->direction);
    out.points.push_back(std::move(*p));
  }
  return out;
}

CurveFit fit_coefficient_curves(const Dataset& data, const FitConfig& config) {
  const Bandwidths bw = config.bandwidths ? *config.bandwidths : select_bandwidths(data, config.kernel);
  return fit_coefficient_curves(data, config, bw);
}

std::vector<double> compute_index(const Dataset& data, const CoefficientCurves& curves) {
  check_curves(curves);
  if (curves.dim() != data.dim()) throw ValidationError("compute_index: dimension mismatch");
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = evaluate_curves(curves, data[i].t).dot(data[i].x);
  }
  return out;
}

LinkEstimate fit_link(std::span<const double> index, std::span<const double> synthetic, const FitConfig& config,
                      double h_link) {
  if (index.size() != synthetic.size() || index.empty()) {
    throw ValidationError("fit_link: index and synthetic responses must be non-empty and of equal length");
  }
  if (!(std::isfinite(h_link) && h_link > 0.0)) throw ValidationError("fit_link: bandwidth must be positive");
  LinkEstimate out;
  out.bandwidth = h_link;
  out.u_grid = linspace(config.link_grid.min, config.link_grid.max, config.link_grid.count);
  out.m_hat.reserve(out.u_grid.size());
  for (double u : out.u_grid) {
    try {
      out.m_hat.emplace_back(nw_estimate(index, synthetic, u, h_link, config.kernel));
    } catch (const NoLocalData&) {
      out.m_hat.emplace_back(std::nullopt);
    }
  }
  return out;
}

ModelFit fit_model(const Dataset& data, const FitConfig& config) {
  check_fit_config(config);
  ModelFit fit;
  fit.config = config;
  try {
    fit.bandwidths = config.bandwidths ? *config.bandwidths : select_bandwidths(data, config.kernel);
    auto stage1 = fit_coefficient_curves(data, config, fit.bandwidths);
    fit.curves = std::move(stage1.curves);
    fit.diagnostics = std::move(stage1.points);
  } catch (const Error& e) {
    throw EstimationError(std::string("stage 1 (coefficient curves): ") + e.what());
  }
  try {
    fit.censoring_survival = estimate_censoring_survival(data);
    fit.synthetic = synthetic_responses(data, fit.censoring_survival);
    fit.index = compute_index(data, fit.curves);
    if (config.link_bandwidth_cv) {
      const auto candidates = log_spaced(0.25 * fit.bandwidths.h_link, 4.0 * fit.bandwidths.h_link, 17);
      fit.bandwidths.h_link = cv_bandwidth(fit.index, fit.synthetic, candidates, config.kernel).bandwidth;
    }
    fit.link = fit_link(fit.index, fit.synthetic, config, fit.bandwidths.h_link);
  } catch (const Error& e) {
    throw EstimationError(std::string("stage 2 (link): ") + e.what());
  }
  return fit;
}

}  // namespace csivc
