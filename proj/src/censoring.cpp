#include "csivc/censoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "csivc/errors.hpp"
#include "csivc/simulation.hpp"

namespace csivc {

SurvivalCurve estimate_censoring_survival(std::span<const double> y, std::span<const int> delta) {
  if (y.empty()) throw ValidationError("estimate_censoring_survival: empty dataset");
  if (y.size() != delta.size()) throw ValidationError("estimate_censoring_survival: length mismatch");
  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });

  SurvivalCurve curve;
  double surv = 1.0;
  std::size_t at_risk = y.size();
  for (std::size_t k = 0; k < order.size();) {
    const double time = y[order[k]];
    std::size_t ties = 0;
    std::size_t censored = 0;
    for (; k + ties < order.size() && y[order[k + ties]] == time; ++ties) {
      if (delta[order[k + ties]] == 0) ++censored;
    }
    if (censored > 0) {
      surv *= 1.0 - static_cast<double>(censored) / static_cast<double>(at_risk);
      curve.jump_times.push_back(time);
      curve.values.push_back(surv);
    }
    at_risk -= ties;
    k += ties;
  }
  return curve;
}

SurvivalCurve estimate_censoring_survival(const Dataset& data) {
  std::vector<int> delta(data.size());
  std::transform(data.rows().begin(), data.rows().end(), delta.begin(), [](const auto& r) { return r.delta; });
  return estimate_censoring_survival(data.responses(), delta);
}

double survival_at(const SurvivalCurve& curve, double s) {
  const auto it = std::lower_bound(curve.jump_times.begin(), curve.jump_times.end(), s);
  if (it == curve.jump_times.begin()) return 1.0;
  return curve.values[static_cast<std::size_t>(it - curve.jump_times.begin()) - 1];
}

std::vector<double> synthetic_responses(std::span<const double> y, const SurvivalCurve& curve) {
  // Breakpoints 0 = p_0 < p_1 < ... of the curve on (0, inf), the curve's
  // level on (p_k, p_{k+1}], and the integral of 1/G up to each p_k.
  std::vector<double> points{0.0};
  std::vector<double> level{survival_at(curve, std::nextafter(0.0, 1.0))};
  for (std::size_t k = 0; k < curve.jump_times.size(); ++k) {
    if (curve.jump_times[k] > 0.0) {
      points.push_back(curve.jump_times[k]);
      level.push_back(curve.values[k]);
    }
  }
  std::vector<double> cumulative(points.size(), 0.0);
  for (std::size_t k = 1; k < points.size(); ++k) {
    cumulative[k] = level[k - 1] > 0.0 ? cumulative[k - 1] + (points[k] - points[k - 1]) / level[k - 1]
                                       : INFINITY;
  }

  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0)) {
      out[i] = 0.0;
      continue;
    }
    // Last breakpoint strictly below y_i.
    const auto k = static_cast<std::size_t>(std::lower_bound(points.begin(), points.end(), y[i]) - points.begin()) - 1;
    if (!(level[k] > 0.0) || !std::isfinite(cumulative[k])) {
      throw EstimationError("unbounded synthetic weight at row " + std::to_string(i));
    }
    out[i] = cumulative[k] + (y[i] - points[k]) / level[k];
  }
  return out;
}

std::vector<double> synthetic_responses(const Dataset& data, const SurvivalCurve& curve) {
  return synthetic_responses(data.responses(), curve);
}

CensoringCalibration calibrate_censoring(double target_rate, const SimConfig& dgp, std::size_t probe_n,
                                         std::uint64_t seed) {
  if (!(target_rate > 0.0 && target_rate < 1.0)) {
    throw ValidationError("calibrate_censoring: target rate must lie in (0,1)");
  }
  if (probe_n < 10000) throw ValidationError("calibrate_censoring: probe_n must be >= 10000");

  // Common random numbers: C_k = c * V_k, so the rate is monotone in c.
  const auto probe = draw_latent_probe(dgp, probe_n, seed);
  const auto rate = [&](double c) {
    std::size_t censored = 0;
    for (std::size_t k = 0; k < probe_n; ++k) {
      if (probe.latent[k] >= c * probe.censor_uniform[k]) ++censored;
    }
    return static_cast<double>(censored) / static_cast<double>(probe_n);
  };

  double lo = std::log(1e-6);
  double hi = std::log(1e6);
  const double rate_lo = rate(std::exp(lo));
  const double rate_hi = rate(std::exp(hi));
  if (!(rate_lo >= target_rate && rate_hi <= target_rate)) {
    throw EstimationError("calibrate_censoring: no bracket in c in [1e-6, 1e6] for target " +
                          std::to_string(target_rate) + " (achievable range [" + std::to_string(rate_hi) +
                          ", " + std::to_string(rate_lo) + "])");
  }
  CensoringCalibration best{std::exp(lo), rate_lo};
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double r = rate(std::exp(mid));
    if (std::abs(r - target_rate) < std::abs(best.achieved_rate - target_rate)) best = {std::exp(mid), r};
    if (r > target_rate) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-12) break;
  }
  if (std::abs(best.achieved_rate - target_rate) > 0.01) {
    throw EstimationError("calibrate_censoring: achieved rate " + std::to_string(best.achieved_rate) +
                          " not within 0.01 of target");
  }
  return best;
}

}  // namespace csivc
