#include <cmath>
#include <random>

#include "csivc/errors.hpp"
#include "csivc/model.hpp"
#include "doctest.h"

using namespace csivc;

namespace {

RawRow row(double y, int delta, double t, std::vector<double> x) { return {y, delta, std::move(x), t}; }

double norm(const UnitDirection& u) {
  double s = 0.0;
  for (double c : u.components()) s += c * c;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("normalize_direction") {
  const auto a = normalize_direction(std::vector<double>{3, 4});
  CHECK(a[0] == 0.6);
  CHECK(a[1] == 0.8);
  const auto b = normalize_direction(std::vector<double>{-3, -4});
  CHECK(b[0] == 0.6);
  CHECK(b[1] == 0.8);
  CHECK_THROWS_WITH_AS(normalize_direction(std::vector<double>{0, 0}), "degenerate direction", ValidationError);
  CHECK_THROWS_WITH_AS(normalize_direction(std::vector<double>{0, 1}), "unidentifiable sign", ValidationError);
}

TEST_CASE("normalize_direction is idempotent and scale invariant") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> scale(-50.0, 50.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(1 + trial % 5);
    for (double& c : v) c = normal(rng);
    const auto once = normalize_direction(v);
    const auto twice = normalize_direction(once.components());
    double c = scale(rng);
    if (c == 0.0) c = 1.0;
    std::vector<double> scaled(v);
    for (double& s : scaled) s *= c;
    const auto from_scaled = normalize_direction(scaled);
    CHECK(std::abs(norm(once) - 1.0) < 1e-12);
    CHECK(once[0] > 0.0);
    for (std::size_t j = 0; j < v.size(); ++j) {
      CHECK(twice[j] == doctest::Approx(once[j]).epsilon(1e-15));
      CHECK(from_scaled[j] == doctest::Approx(once[j]).epsilon(1e-14));
    }
  }
}

TEST_CASE("validate_dataset") {
  const auto ok = validate_dataset({row(1, 1, 0.1, {1, 2}), row(2, 0, 0.5, {3, 4}), row(3, 1, 1.0, {5, 6})});
  CHECK(ok.size() == 3);
  CHECK(ok.dim() == 2);

  CHECK_THROWS_WITH_AS(validate_dataset({row(1, 1, 0.1, {1, 2}), row(2, 2, 0.5, {3, 4})}),
                       doctest::Contains("row 1"), ValidationError);
  CHECK_THROWS_WITH_AS(validate_dataset({row(1, 1, 0.1, {1, 2}), row(2, 1, 0.5, {3, 4, 5})}),
                       doctest::Contains("ragged covariates"), ValidationError);
  CHECK_THROWS_WITH_AS(validate_dataset({row(1, 1, 1.5, {1}), row(2, 1, 0.5, {3})}), doctest::Contains("t outside"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(validate_dataset({row(NAN, 1, 0.5, {1}), row(2, 1, 0.5, {3})}), doctest::Contains("row 0"),
                       ValidationError);
  CHECK_THROWS_AS(validate_dataset({row(1, 1, 0.5, {INFINITY}), row(2, 1, 0.5, {3})}), ValidationError);
  CHECK_THROWS_AS(validate_dataset({row(1, 1, 0.5, {1})}), ValidationError);
}

TEST_CASE("evaluate_curves") {
  CoefficientCurves c;
  c.grid = {0.0, 1.0};
  c.directions = {normalize_direction(std::vector<double>{1, 0}), normalize_direction(std::vector<double>{0.6, 0.8})};
  CHECK(evaluate_curves(c, 0.0) == c.directions[0]);
  CHECK(evaluate_curves(c, 1.0) == c.directions[1]);
  CHECK_THROWS_AS(evaluate_curves(c, 1.2), ValidationError);
  CHECK_THROWS_AS(evaluate_curves(c, -0.1), ValidationError);

  c.directions = {normalize_direction(std::vector<double>{1, 0}), normalize_direction(std::vector<double>{1, 0})};
  const auto flat = evaluate_curves(c, 0.37);
  CHECK(flat[0] == 1.0);
  CHECK(flat[1] == 0.0);

  // Midpoint of (1,0) and (eps, sqrt(1-eps^2)), normalized by hand.
  const double eps = 0.01;
  c.directions = {normalize_direction(std::vector<double>{1, 0}),
                  normalize_direction(std::vector<double>{eps, std::sqrt(1 - eps * eps)})};
  const auto mid = evaluate_curves(c, 0.5);
  CHECK(mid[0] == doctest::Approx(0.71063352).epsilon(1e-8));
  CHECK(mid[1] == doctest::Approx(0.70356236).epsilon(1e-8));
  CHECK(std::abs(norm(mid) - 1.0) < 1e-12);
}

TEST_CASE("evaluate_curves output is always a unit direction") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CoefficientCurves c;
  c.grid = linspace(0.0, 1.0, 6);
  for (std::size_t k = 0; k < c.grid.size(); ++k) {
    c.directions.push_back(normalize_direction(std::vector<double>{std::abs(normal(rng)) + 0.1, normal(rng), normal(rng)}));
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const auto d = evaluate_curves(c, unit(rng));
    CHECK(std::abs(norm(d) - 1.0) < 1e-12);
    CHECK(d[0] > 0.0);
  }
}

TEST_CASE("censoring_rate") {
  std::vector<RawRow> rows;
  for (int delta : {1, 0, 1, 0, 1, 1, 0, 1, 1, 1}) rows.push_back(row(1, delta, 0.5, {1}));
  const auto data = validate_dataset(rows);
  CHECK(censoring_rate(data) == doctest::Approx(0.3));
  const double events =
      static_cast<double>(std::count_if(data.rows().begin(), data.rows().end(), [](auto& r) { return r.delta == 1; })) /
      static_cast<double>(data.size());
  CHECK(censoring_rate(data) + events == 1.0);

  CHECK(censoring_rate(validate_dataset({row(1, 1, 0, {1}), row(2, 1, 0, {1})})) == 0.0);
  CHECK(censoring_rate(validate_dataset({row(1, 0, 0, {1}), row(2, 0, 0, {1})})) == 1.0);
}
