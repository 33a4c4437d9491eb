#include "csivc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "csivc/errors.hpp"

namespace csivc {

std::vector<double> Dataset::responses() const {
  std::vector<double> out(rows_.size());
  std::transform(rows_.begin(), rows_.end(), out.begin(), [](const auto& r) { return r.y; });
  return out;
}

std::vector<double> Dataset::modifiers() const {
  std::vector<double> out(rows_.size());
  std::transform(rows_.begin(), rows_.end(), out.begin(), [](const auto& r) { return r.t; });
  return out;
}

std::vector<double> Dataset::covariate(std::size_t j) const {
  std::vector<double> out(rows_.size());
  std::transform(rows_.begin(), rows_.end(), out.begin(), [j](const auto& r) { return r.x.at(j); });
  return out;
}

Dataset validate_dataset(std::vector<RawRow> rows) {
  if (rows.size() < 2) {
    throw ValidationError("dataset needs at least 2 rows, got " + std::to_string(rows.size()));
  }
  const std::size_t d = rows.front().x.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const auto where = "row " + std::to_string(i) + ": ";
    if (r.delta != 0 && r.delta != 1) {
      throw ValidationError(where + "delta must be 0 or 1, got " + std::to_string(r.delta));
    }
    if (!std::isfinite(r.y)) throw ValidationError(where + "non-finite y");
    if (!std::isfinite(r.t)) throw ValidationError(where + "non-finite t");
    if (r.t < 0.0 || r.t > 1.0) {
      throw ValidationError(where + "t outside [0,1]: " + std::to_string(r.t));
    }
    if (r.x.empty()) throw ValidationError(where + "empty covariate vector");
    if (r.x.size() != d) {
      throw ValidationError(where + "ragged covariates (expected " + std::to_string(d) +
                            ", got " + std::to_string(r.x.size()) + ")");
    }
    if (!std::all_of(r.x.begin(), r.x.end(), [](double v) { return std::isfinite(v); })) {
      throw ValidationError(where + "non-finite covariate");
    }
  }
  return Dataset(std::move(rows));
}

double UnitDirection::dot(std::span<const double> x) const {
  return std::inner_product(v_.begin(), v_.end(), x.begin(), 0.0);
}

UnitDirection normalize_direction(std::span<const double> v) {
  if (v.empty()) throw ValidationError("degenerate direction: empty vector");
  double norm = 0.0;
  for (double c : v) {
    if (!std::isfinite(c)) throw ValidationError("degenerate direction: non-finite component");
    norm = std::hypot(norm, c);
  }
  if (norm == 0.0) throw ValidationError("degenerate direction");
  if (v[0] == 0.0) throw ValidationError("unidentifiable sign");
  const double sign = v[0] > 0.0 ? 1.0 : -1.0;
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [=](double c) { return sign * c / norm; });
  return UnitDirection(std::move(out));
}

double angular_distance(const UnitDirection& a, const UnitDirection& b) {
  const double c = std::clamp(a.dot(b.components()), -1.0, 1.0);
  // acos loses precision near 1; use the chord length instead.
  double chord = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) chord = std::hypot(chord, a[i] - b[i]);
  return c > 0.9 ? 2.0 * std::asin(std::min(1.0, chord / 2.0)) : std::acos(c);
}

std::vector<double> CoefficientCurves::component(std::size_t j) const {
  std::vector<double> out(directions.size());
  std::transform(directions.begin(), directions.end(), out.begin(),
                 [j](const UnitDirection& u) { return u[j]; });
  return out;
}

void check_curves(const CoefficientCurves& curves) {
  if (curves.grid.empty()) throw ValidationError("coefficient curves: empty grid");
  if (curves.grid.size() != curves.directions.size()) {
    throw ValidationError("coefficient curves: grid and direction counts differ");
  }
  for (std::size_t k = 0; k < curves.grid.size(); ++k) {
    const double g = curves.grid[k];
    if (!(g >= 0.0 && g <= 1.0)) throw ValidationError("coefficient curves: grid outside [0,1]");
    if (k > 0 && !(g > curves.grid[k - 1])) {
      throw ValidationError("coefficient curves: grid not ascending");
    }
    if (curves.directions[k].dim() != curves.directions.front().dim()) {
      throw ValidationError("coefficient curves: mixed dimensions");
    }
  }
}

UnitDirection evaluate_curves(const CoefficientCurves& curves, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw ValidationError("evaluate_curves: t outside [0,1]: " + std::to_string(t));
  }
  const auto& grid = curves.grid;
  if (grid.empty()) throw ValidationError("coefficient curves: empty grid");
  if (t <= grid.front()) return curves.directions.front();
  if (t >= grid.back()) return curves.directions.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), t) - grid.begin());
  const std::size_t lo = hi - 1;
  if (grid[lo] == t) return curves.directions[lo];
  const double w = (t - grid[lo]) / (grid[hi] - grid[lo]);
  const auto& a = curves.directions[lo];
  const auto& b = curves.directions[hi];
  std::vector<double> mix(a.dim());
  for (std::size_t j = 0; j < mix.size(); ++j) mix[j] = (1.0 - w) * a[j] + w * b[j];
  return normalize_direction(mix);
}

double censoring_rate(const Dataset& data) {
  if (data.size() == 0) throw ValidationError("censoring_rate: empty dataset");
  const auto censored = std::count_if(data.rows().begin(), data.rows().end(),
                                      [](const auto& r) { return r.delta == 0; });
  return static_cast<double>(censored) / static_cast<double>(data.size());
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) out[k] = lo + step * static_cast<double>(k);
  out.back() = hi;
  return out;
}

}  // namespace csivc
