#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "csivc/model.hpp"

namespace csivc {

// Step estimate of G(s) = P(C >= s). values[k] is the survival just after
// jump_times[k]; before the first jump the curve is 1.
struct SurvivalCurve {
  std::vector<double> jump_times;
  std::vector<double> values;
};

// Kaplan-Meier product limit with censoring (delta == 0) as the event.
// Uncensored rows tied with a censoring time stay in its risk set.
SurvivalCurve estimate_censoring_survival(const Dataset& data);
SurvivalCurve estimate_censoring_survival(std::span<const double> y, std::span<const int> delta);

// Left limit: product over jumps strictly before s.
double survival_at(const SurvivalCurve& curve, double s);

// T*_i = integral over [0, max(y_i, 0)] of 1 / G(s) ds, computed exactly over
// the steps of the curve. Throws EstimationError("unbounded synthetic weight")
// naming the row when G vanishes on a stretch inside [0, y_i).
std::vector<double> synthetic_responses(std::span<const double> y, const SurvivalCurve& curve);
std::vector<double> synthetic_responses(const Dataset& data, const SurvivalCurve& curve);

struct SimConfig;

struct CensoringCalibration {
  double c = 0.0;              // C ~ Uniform(0, c)
  double achieved_rate = 0.0;  // on the probe sample
};

// Bisection (in log c) for the Uniform(0, c) censoring bound giving the
// target censoring fraction on probe_n latent responses drawn from the DGP.
CensoringCalibration calibrate_censoring(double target_rate, const SimConfig& dgp, std::size_t probe_n,
                                         std::uint64_t seed);

}  // namespace csivc
