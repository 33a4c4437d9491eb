#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "csivc/censoring.hpp"
#include "csivc/kernel.hpp"
#include "csivc/model.hpp"
#include "csivc/smoothing.hpp"

namespace csivc {

struct OptimizerOptions {
  int restarts = 4;  // spread cold starts (in addition to any warm start)
  int max_iterations = 200;
  double tolerance = 1e-10;
};

struct LinkGrid {
  double min = -0.5;
  double max = 0.5;
  std::size_t count = 100;
};

struct FitConfig {
  std::size_t t_grid_size = 21;
  LinkGrid link_grid;
  std::optional<Bandwidths> bandwidths;  // nullopt: select_bandwidths rule of thumb
  bool link_bandwidth_cv = false;        // refine h_link by leave-one-out CV on (U, T*)
  KernelSpec kernel;
  OptimizerOptions optimizer;
  // false: warm-start sweep; true: cold multi-restart at every grid point,
  // evaluated on up to `threads` threads.
  bool independent_grid = false;
  unsigned threads = 1;
};

// Throws ValidationError on sizes < 2, non-positive tolerance, empty link range.
void check_fit_config(const FitConfig& config);

struct ObjectiveValue {
  double value = 0.0;
  std::size_t empty_neighbourhoods = 0;  // rows skipped for lack of local data
};

// Profile least-squares criterion at modifier value t0:
//   (n h2)^-1 sum_i {Y_i - g_{t0,-i}(theta'X_i; theta)}^2 K((T_i - t0)/h2)
// with the leave-one-out product-kernel smoother. Rows with zero modifier
// weight are dropped once at construction.
class LocalObjective {
 public:
  LocalObjective(const DesignMatrix& design, double t0, const Bandwidths& bw, KernelSpec spec);

  ObjectiveValue operator()(const UnitDirection& theta) const;
  std::size_t local_rows() const noexcept { return y_.size(); }

 private:
  std::size_t n_total_;
  std::size_t d_;
  double inv_h1_;
  double scale_;
  KernelSpec spec_;
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> w_;
};

ObjectiveValue local_objective(const Dataset& data, double t0, const UnitDirection& theta, const Bandwidths& bw,
                               KernelSpec spec);

// Hyperspherical parameterization. angles.size() == d - 1; the first angle
// controls the first component (cos a_1), so the hemisphere is |a_1| < pi/2.
std::vector<double> direction_from_angles(std::span<const double> angles);

struct DirectionFit {
  UnitDirection direction;
  double objective = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::size_t empty_neighbourhoods = 0;
  std::size_t local_rows = 0;
  // Objective at each start actually used (warm start first, if any).
  std::vector<double> start_objectives;
};

// Minimizes the local objective over the unit hemisphere with Nelder-Mead on
// the angles, from the warm start plus `restarts` evenly spread starts.
// Results within the objective tolerance of the best count as ties; among
// ties the smaller angle wins (compared on components 2..d, in order).
DirectionFit fit_direction_at(const Dataset& data, double t0, const FitConfig& config,
                              const std::optional<UnitDirection>& warm_start = std::nullopt);
DirectionFit fit_direction_at(const DesignMatrix& design, double t0, const Bandwidths& bw, const FitConfig& config,
                              const std::optional<UnitDirection>& warm_start, int restarts);

struct CurveFit {
  CoefficientCurves curves;
  std::vector<DirectionFit> points;
  Bandwidths bandwidths;
};

CurveFit fit_coefficient_curves(const Dataset& data, const FitConfig& config);
CurveFit fit_coefficient_curves(const Dataset& data, const FitConfig& config, const Bandwidths& bw);

std::vector<double> compute_index(const Dataset& data, const CoefficientCurves& curves);

struct LinkEstimate {
  std::vector<double> u_grid;
  std::vector<std::optional<double>> m_hat;  // nullopt: no local data
  double bandwidth = 0.0;
};

LinkEstimate fit_link(std::span<const double> index, std::span<const double> synthetic, const FitConfig& config,
                      double h_link);

struct ModelFit {
  CoefficientCurves curves;
  LinkEstimate link;
  std::vector<double> index;
  std::vector<double> synthetic;
  SurvivalCurve censoring_survival;
  Bandwidths bandwidths;
  std::vector<DirectionFit> diagnostics;
  FitConfig config;
};

// Stage 1 on the observed responses, then Kaplan-Meier synthetic responses
// and the link regression on the fitted index. Failures are rethrown as
// EstimationError prefixed with the stage.
ModelFit fit_model(const Dataset& data, const FitConfig& config);

}  // namespace csivc
