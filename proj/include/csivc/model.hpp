#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace csivc {

// One censored record: y = min(latent, censoring time), delta = 1 when the
// latent response was observed.
struct CensoredObservation {
  double y = 0.0;
  int delta = 1;
  std::vector<double> x;
  double t = 0.0;
};

// Unchecked input row, as parsed from a file or built in memory.
using RawRow = CensoredObservation;

class Dataset {
 public:
  const std::vector<CensoredObservation>& rows() const noexcept { return rows_; }
  const CensoredObservation& operator[](std::size_t i) const { return rows_[i]; }
  std::size_t size() const noexcept { return rows_.size(); }
  std::size_t dim() const noexcept { return rows_.empty() ? 0 : rows_.front().x.size(); }

  std::vector<double> responses() const;
  std::vector<double> modifiers() const;
  std::vector<double> covariate(std::size_t j) const;

 private:
  friend Dataset validate_dataset(std::vector<RawRow> rows);
  explicit Dataset(std::vector<CensoredObservation> rows) : rows_(std::move(rows)) {}

  std::vector<CensoredObservation> rows_;
};

// Throws ValidationError naming the first offending row and invariant.
Dataset validate_dataset(std::vector<RawRow> rows);

// Unit vector with strictly positive first component.
class UnitDirection {
 public:
  std::span<const double> components() const noexcept { return v_; }
  std::size_t dim() const noexcept { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  double dot(std::span<const double> x) const;

  friend bool operator==(const UnitDirection&, const UnitDirection&) = default;

 private:
  friend UnitDirection normalize_direction(std::span<const double> v);
  explicit UnitDirection(std::vector<double> v) : v_(std::move(v)) {}

  std::vector<double> v_;
};

// v / |v| * sign(v_1). Throws ValidationError on a zero vector
// ("degenerate direction") or v_1 == 0 ("unidentifiable sign").
UnitDirection normalize_direction(std::span<const double> v);

// Angle between two unit directions, in radians.
double angular_distance(const UnitDirection& a, const UnitDirection& b);

struct CoefficientCurves {
  std::vector<double> grid;
  std::vector<UnitDirection> directions;

  std::size_t dim() const noexcept { return directions.empty() ? 0 : directions.front().dim(); }
  // Values of coefficient j across the grid.
  std::vector<double> component(std::size_t j) const;
};

// Checks grid ordering/range and matching direction count.
void check_curves(const CoefficientCurves& curves);

// Linear interpolation between bracketing grid directions, re-normalized.
// Outside the grid span the nearest end direction is used.
UnitDirection evaluate_curves(const CoefficientCurves& curves, double t);

double censoring_rate(const Dataset& data);

// Uniformly spaced points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t count);

}  // namespace csivc
