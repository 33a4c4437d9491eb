#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace csivc {

// Error distribution: symmetric about zero with lim e F(e) = 0 as e -> -inf.
struct NoiseModel {
  std::function<double(double)> cdf;
  std::function<double(double)> density;
  std::function<double(std::mt19937_64&)> sample;
};

struct CensorModel {
  std::function<double(double)> density;
  double lower = 0.0;  // quadrature support
  double upper = 0.0;
  std::function<double(std::mt19937_64&)> sample;
};

NoiseModel gaussian_noise(double sd);
// Point mass at zero; sampler only (no cdf/density).
NoiseModel no_noise();
CensorModel uniform_censor(double lower, double upper);
// Point mass at `at`; sampler only.
CensorModel fixed_censor(double at);

struct QuadratureTolerances {
  double inner = 1e-8;           // absolute, on the integral of F
  double outer = 1e-6;           // absolute, over the censoring density
  double tail_probability = 1e-12;  // where the noise integral is truncated
};

// w(t) = E[min(t + e, C)] = integral over c of { c - integral_{-inf}^{c-t} F(e) de } f_C(c) dc,
// by nested adaptive Gauss-Kronrod quadrature. Throws EstimationError when a
// quadrature misses its tolerance.
double theoretical_mean_response(double m_value, const NoiseModel& noise, const CensorModel& censor,
                                 const QuadratureTolerances& tol = {});

struct MonteCarloMean {
  double mean = 0.0;
  double standard_error = 0.0;
};

// Sample mean and standard error of min(m_value + e_k, C_k).
MonteCarloMean mc_conditional_mean(double m_value, const NoiseModel& noise, const CensorModel& censor,
                                   std::size_t draws, std::uint64_t seed);

}  // namespace csivc
