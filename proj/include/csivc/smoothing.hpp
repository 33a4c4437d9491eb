#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "csivc/kernel.hpp"
#include "csivc/model.hpp"
#include "csivc/simd.hpp"

namespace csivc {

struct Bandwidths {
  double h1 = 0.0;      // index direction of the profile smoother
  double h2 = 0.0;      // modifier direction
  double h_link = 0.0;  // link regression on the fitted index
};

// Throws ValidationError unless all three are finite and positive.
void check_bandwidths(const Bandwidths& bw);

inline constexpr std::size_t no_exclusion = simd::no_exclusion;

// Weights summing below this are treated as an empty neighbourhood.
inline constexpr double min_weight_sum = 1e-300;

// Nadaraya-Watson regression of ys on xs at x0. Throws NoLocalData(x0) when
// no non-excluded point carries weight.
double nw_estimate(std::span<const double> xs, std::span<const double> ys, double x0, double h,
                   KernelSpec spec, std::size_t exclude = no_exclusion);

// Rosenblatt-Parzen density estimate n^-1 h^-1 sum K((x0 - x_i)/h).
double density_estimate(std::span<const double> xs, double x0, double h, KernelSpec spec);

// Column-major view of a dataset, laid out for the kernel loops.
struct DesignMatrix {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> x;  // row-major n x d
  std::vector<double> y;
  std::vector<double> t;

  explicit DesignMatrix(const Dataset& data);
  std::span<const double> row(std::size_t i) const { return {x.data() + i * d, d}; }
};

// Local product-kernel estimate g_{t0}(u; theta) of E[Y | theta'X = u, T = t0].
double profile_smoother(const Dataset& data, const UnitDirection& theta, double t0, double u,
                        const Bandwidths& bw, KernelSpec spec, std::size_t exclude = no_exclusion);

// 1.06 * sd(xs) * n^(-1/5). Throws ValidationError("degenerate predictor")
// for zero variance.
double rule_of_thumb_bandwidth(std::span<const double> xs);

// Leave-one-out squared prediction error of nw_estimate at bandwidth h.
// Points with no local data are skipped; returns +inf when all are.
double loo_cv_score(std::span<const double> xs, std::span<const double> ys, double h, KernelSpec spec);

struct CvChoice {
  double bandwidth = 0.0;
  std::size_t index = 0;  // position in the candidate list
  std::vector<double> scores;
};

// Minimizes loo_cv_score over the candidates (first minimum wins).
CvChoice cv_bandwidth(std::span<const double> xs, std::span<const double> ys,
                      std::span<const double> candidates, KernelSpec spec);

// count values log-spaced over [lo, hi].
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

struct BandwidthGrid {
  // Candidate multipliers applied jointly to the rule-of-thumb h1 and h2.
  std::vector<double> multipliers;
  // Pilot direction for the cross-validated profile smoother (default e_1).
  std::optional<UnitDirection> pilot;
};

// Rule-of-thumb bandwidths: h2 from the modifier, h1 and h_link from the
// pooled covariate scale sqrt(mean_j var(X_j)), which is the spread of a unit
// index for standardized uncorrelated covariates. With a grid, (h1, h2) are
// scaled by the multiplier minimizing the leave-one-out error of the profile
// smoother at the pilot direction. Requires n >= 10.
Bandwidths select_bandwidths(const Dataset& data, KernelSpec spec,
                             const std::optional<BandwidthGrid>& grid = std::nullopt);

}  // namespace csivc
