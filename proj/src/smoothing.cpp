#include "csivc/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "csivc/errors.hpp"

namespace csivc {

std::string_view to_string(KernelFamily family) {
  return family == KernelFamily::epanechnikov ? "epanechnikov" : "gaussian";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "epanechnikov") return KernelFamily::epanechnikov;
  if (name == "gaussian") return KernelFamily::gaussian;
  throw ValidationError("unknown kernel family '" + std::string(name) + "'");
}

void check_bandwidths(const Bandwidths& bw) {
  for (double h : {bw.h1, bw.h2, bw.h_link}) {
    if (!(std::isfinite(h) && h > 0.0)) {
      throw ValidationError("bandwidths must be positive and finite");
    }
  }
}

namespace {

void check_h(double h) {
  if (!(std::isfinite(h) && h > 0.0)) throw ValidationError("bandwidth must be positive and finite");
}

double sample_sd(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : xs) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

}  // namespace

double nw_estimate(std::span<const double> xs, std::span<const double> ys, double x0, double h,
                   KernelSpec spec, std::size_t exclude) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw ValidationError("nw_estimate: xs and ys must be non-empty and of equal length");
  }
  check_h(h);
  const auto s = simd::weighted_sums({spec.family, xs, ys, {}, x0, 1.0 / h, exclude});
  if (!(s.denominator >= min_weight_sum)) throw NoLocalData(x0);
  return s.numerator / s.denominator;
}

double density_estimate(std::span<const double> xs, double x0, double h, KernelSpec spec) {
  if (xs.empty()) throw ValidationError("density_estimate: empty sample");
  check_h(h);
  const auto s = simd::weighted_sums({spec.family, xs, {}, {}, x0, 1.0 / h, no_exclusion});
  return s.denominator / (static_cast<double>(xs.size()) * h);
}

DesignMatrix::DesignMatrix(const Dataset& data) : n(data.size()), d(data.dim()) {
  x.reserve(n * d);
  y.reserve(n);
  t.reserve(n);
  for (const auto& r : data.rows()) {
    x.insert(x.end(), r.x.begin(), r.x.end());
    y.push_back(r.y);
    t.push_back(r.t);
  }
}

double profile_smoother(const Dataset& data, const UnitDirection& theta, double t0, double u,
                        const Bandwidths& bw, KernelSpec spec, std::size_t exclude) {
  check_bandwidths(bw);
  if (!(t0 >= 0.0 && t0 <= 1.0)) throw ValidationError("profile_smoother: t0 outside [0,1]");
  if (theta.dim() != data.dim()) throw ValidationError("profile_smoother: dimension mismatch");
  const DesignMatrix design(data);
  std::vector<double> index(design.n);
  simd::project(design.x, theta.components(), index);
  std::vector<double> modifier_weight(design.n);
  for (std::size_t i = 0; i < design.n; ++i) {
    modifier_weight[i] = kernel_weight(spec, (t0 - design.t[i]) / bw.h2);
  }
  const auto s = simd::weighted_sums({spec.family, index, design.y, modifier_weight, u, 1.0 / bw.h1, exclude});
  if (!(s.denominator >= min_weight_sum)) throw NoLocalData(u);
  return s.numerator / s.denominator;
}

double rule_of_thumb_bandwidth(std::span<const double> xs) {
  if (xs.size() < 2) throw ValidationError("degenerate predictor: fewer than 2 values");
  const double sd = sample_sd(xs);
  if (!(sd > 0.0) || !std::isfinite(sd)) throw ValidationError("degenerate predictor");
  return 1.06 * sd * std::pow(static_cast<double>(xs.size()), -0.2);
}

double loo_cv_score(std::span<const double> xs, std::span<const double> ys, double h, KernelSpec spec) {
  double sse = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    try {
      const double r = ys[i] - nw_estimate(xs, ys, xs[i], h, spec, i);
      sse += r * r;
      ++used;
    } catch (const NoLocalData&) {
    }
  }
  return used == 0 ? std::numeric_limits<double>::infinity() : sse / static_cast<double>(used);
}

CvChoice cv_bandwidth(std::span<const double> xs, std::span<const double> ys,
                      std::span<const double> candidates, KernelSpec spec) {
  if (candidates.empty()) throw ValidationError("cv_bandwidth: empty candidate grid");
  if (xs.size() != ys.size() || xs.size() < 2) throw ValidationError("cv_bandwidth: need >= 2 paired points");
  CvChoice choice;
  choice.scores.reserve(candidates.size());
  for (double h : candidates) {
    check_h(h);
    choice.scores.push_back(loo_cv_score(xs, ys, h, spec));
  }
  choice.index = static_cast<std::size_t>(std::min_element(choice.scores.begin(), choice.scores.end()) -
                                          choice.scores.begin());
  choice.bandwidth = candidates[choice.index];
  return choice;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi >= lo)) throw ValidationError("log_spaced: need 0 < lo <= hi");
  auto out = linspace(std::log(lo), std::log(hi), count);
  for (double& v : out) v = std::exp(v);
  return out;
}

Bandwidths select_bandwidths(const Dataset& data, KernelSpec spec, const std::optional<BandwidthGrid>& grid) {
  if (data.size() < 10) throw ValidationError("select_bandwidths: need n >= 10");
  double pooled_var = 0.0;
  for (std::size_t j = 0; j < data.dim(); ++j) {
    const auto col = data.covariate(j);
    const double sd = sample_sd(col);
    if (!(sd > 0.0)) throw ValidationError("degenerate predictor: covariate x" + std::to_string(j + 1));
    pooled_var += sd * sd;
  }
  pooled_var /= static_cast<double>(data.dim());
  const double shrink = std::pow(static_cast<double>(data.size()), -0.2);
  Bandwidths bw;
  bw.h1 = 1.06 * std::sqrt(pooled_var) * shrink;
  bw.h_link = bw.h1;
  bw.h2 = rule_of_thumb_bandwidth(data.modifiers());
  if (!grid || grid->multipliers.empty()) return bw;

  std::vector<double> e1(data.dim(), 0.0);
  e1[0] = 1.0;
  const UnitDirection pilot = grid->pilot.value_or(normalize_direction(e1));
  const DesignMatrix design(data);
  std::vector<double> index(design.n);
  simd::project(design.x, pilot.components(), index);
  std::vector<double> modifier_weight(design.n);

  double best_score = std::numeric_limits<double>::infinity();
  double best_mult = 1.0;
  for (double mult : grid->multipliers) {
    if (!(mult > 0.0)) throw ValidationError("select_bandwidths: multipliers must be positive");
    const double h1 = bw.h1 * mult;
    const double h2 = bw.h2 * mult;
    double sse = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < design.n; ++i) {
      for (std::size_t k = 0; k < design.n; ++k) {
        modifier_weight[k] = kernel_weight(spec, (design.t[i] - design.t[k]) / h2);
      }
      const auto s = simd::weighted_sums({spec.family, index, design.y, modifier_weight, index[i], 1.0 / h1, i});
      if (!(s.denominator >= min_weight_sum)) continue;
      const double r = design.y[i] - s.numerator / s.denominator;
      sse += r * r;
      ++used;
    }
    const double score = used == 0 ? std::numeric_limits<double>::infinity() : sse / static_cast<double>(used);
    if (score < best_score) {
      best_score = score;
      best_mult = mult;
    }
  }
  bw.h1 *= best_mult;
  bw.h2 *= best_mult;
  return bw;
}

}  // namespace csivc
