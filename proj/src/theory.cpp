#include "csivc/theory.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "csivc/errors.hpp"

namespace csivc {

NoiseModel gaussian_noise(double sd) {
  if (!(sd > 0.0)) throw ValidationError("gaussian_noise: sd must be positive");
  NoiseModel m;
  m.cdf = [sd](double e) { return 0.5 * std::erfc(-e / (sd * std::numbers::sqrt2)); };
  m.density = [sd](double e) {
    const double z = e / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
  };
  m.sample = [sd](std::mt19937_64& rng) { return std::normal_distribution<double>(0.0, sd)(rng); };
  return m;
}

NoiseModel no_noise() {
  NoiseModel m;
  m.sample = [](std::mt19937_64&) { return 0.0; };
  return m;
}

CensorModel uniform_censor(double lower, double upper) {
  if (!(upper > lower)) throw ValidationError("uniform_censor: need lower < upper");
  CensorModel m;
  const double height = 1.0 / (upper - lower);
  m.density = [=](double c) { return c >= lower && c <= upper ? height : 0.0; };
  m.lower = lower;
  m.upper = upper;
  m.sample = [=](std::mt19937_64& rng) { return std::uniform_real_distribution<double>(lower, upper)(rng); };
  return m;
}

CensorModel fixed_censor(double at) {
  CensorModel m;
  m.lower = at;
  m.upper = at;
  m.sample = [at](std::mt19937_64&) { return at; };
  return m;
}

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr unsigned max_depth = 15;

template <class F>
double integrate(F f, double a, double b, double tol, const char* what) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  const double value = Kronrod::integrate(f, a, b, max_depth, 1e-12, &err);
  if (!std::isfinite(value) || err > tol) {
    throw EstimationError(std::string("quadrature did not converge (") + what + "): error estimate " +
                          std::to_string(err));
  }
  return value;
}

// Point where a monotone cdf crosses `level`, by bracket expansion and bisection.
double quantile(const std::function<double(double)>& cdf, double level) {
  double lo = -1.0, hi = 1.0;
  while (cdf(lo) > level) {
    lo *= 2.0;
    if (lo < -1e12) throw EstimationError("noise quantile not bracketed");
  }
  while (cdf(hi) < level) {
    hi *= 2.0;
    if (hi > 1e12) throw EstimationError("noise quantile not bracketed");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double theoretical_mean_response(double m_value, const NoiseModel& noise, const CensorModel& censor,
                                 const QuadratureTolerances& tol) {
  if (!noise.cdf) throw ValidationError("theoretical_mean_response: noise model needs a cdf");
  if (!censor.density || !(censor.upper > censor.lower)) {
    throw ValidationError("theoretical_mean_response: censor model needs a density with lower < upper");
  }
  // Outside [lo, hi] the cdf is 0 or 1 to within the tail probability, so
  // integral_{-inf}^{a} F = integral_{lo}^{min(a,hi)} F + max(a - hi, 0).
  const double lo = quantile(noise.cdf, tol.tail_probability);
  const double hi = quantile(noise.cdf, 1.0 - tol.tail_probability);
  const double body = integrate(noise.cdf, lo, hi, tol.inner, "noise cdf");
  const auto cdf_integral = [&](double a) {
    if (a <= lo) return 0.0;
    if (a >= hi) return body + (a - hi);
    return integrate(noise.cdf, lo, a, tol.inner, "noise cdf");
  };
  // c - integral F is O(1) even when c is huge; integrate that difference.
  const auto integrand = [&](double c) {
    const double a = c - m_value;
    const double kept = a >= hi ? (m_value + hi) - body : c - cdf_integral(a);
    return kept * censor.density(c);
  };
  // Split where the integrand has kinks so every piece is smooth.
  std::vector<double> cuts{censor.lower};
  for (double kink : {m_value + lo, m_value + hi}) {
    if (kink > cuts.back() && kink < censor.upper) cuts.push_back(kink);
  }
  cuts.push_back(censor.upper);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    total += integrate(integrand, cuts[k], cuts[k + 1], tol.outer, "censoring density");
  }
  return total;
}

MonteCarloMean mc_conditional_mean(double m_value, const NoiseModel& noise, const CensorModel& censor,
                                   std::size_t draws, std::uint64_t seed) {
  if (draws < 1000) throw ValidationError("mc_conditional_mean: need at least 1000 draws");
  std::mt19937_64 rng(seed);
  // Welford update keeps the variance exact for constant samples.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < draws; ++k) {
    const double e = noise.sample(rng);
    const double c = censor.sample(rng);
    const double v = std::min(m_value + e, c);
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  const double n = static_cast<double>(draws);
  return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

}  // namespace csivc
