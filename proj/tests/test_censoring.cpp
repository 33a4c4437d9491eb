#include <cmath>
#include <random>

#include "csivc/censoring.hpp"
#include "csivc/errors.hpp"
#include "csivc/simulation.hpp"
#include "doctest.h"

using namespace csivc;

namespace {

Dataset survival_rows(std::vector<double> y, std::vector<int> delta) {
  std::vector<RawRow> rows;
  for (std::size_t i = 0; i < y.size(); ++i) rows.push_back({y[i], delta[i], {1.0}, 0.5});
  return validate_dataset(rows);
}

}  // namespace

TEST_CASE("Kaplan-Meier censoring survival: hand fixtures") {
  const auto curve = estimate_censoring_survival(survival_rows({1, 2, 3}, {1, 0, 1}));
  REQUIRE(curve.jump_times == std::vector<double>{2.0});
  CHECK(curve.values == std::vector<double>{0.5});
  CHECK(survival_at(curve, 1.0) == 1.0);
  CHECK(survival_at(curve, 2.0) == 1.0);
  CHECK(survival_at(curve, 2.5) == 0.5);
  CHECK(survival_at(curve, 7.0) == 0.5);
  CHECK(survival_at(curve, -10.0) == 1.0);

  const auto none = estimate_censoring_survival(survival_rows({1, 2, 3}, {1, 1, 1}));
  CHECK(none.jump_times.empty());
  CHECK(survival_at(none, 3.0) == 1.0);

  const auto all = estimate_censoring_survival(survival_rows({1, 2}, {0, 0}));
  CHECK(survival_at(all, 1.0) == 1.0);
  CHECK(survival_at(all, 1.5) == 0.5);
  CHECK(survival_at(all, 2.0) == 0.5);
  CHECK(survival_at(all, 2.5) == 0.0);
}

TEST_CASE("Kaplan-Meier ties: events stay in the censoring risk set") {
  // At time 2 the risk set is {2 (event), 2 (censored), 3}: factor 1 - 1/3.
  const auto curve = estimate_censoring_survival(survival_rows({2, 2, 3, 1}, {1, 0, 1, 1}));
  REQUIRE(curve.values.size() == 1);
  CHECK(curve.values[0] == 1.0 - 1.0 / 3.0);
}

TEST_CASE("censoring survival is non-increasing and within [0,1]") {
  std::mt19937_64 rng(17);
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> y(40);
    std::vector<int> delta(40);
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = std::round(expo(rng) * 4.0) / 4.0;  // rounding forces ties
      delta[i] = coin(rng) ? 0 : 1;
    }
    const auto curve = estimate_censoring_survival(survival_rows(y, delta));
    double prev = 1.0;
    for (double v : curve.values) {
      CHECK(v <= prev);
      CHECK(v >= 0.0);
      prev = v;
    }
  }
}

TEST_CASE("synthetic_responses") {
  SurvivalCurve identity;
  CHECK(synthetic_responses(std::vector<double>{2.0}, identity)[0] == 2.0);
  CHECK(synthetic_responses(std::vector<double>{-0.3}, identity)[0] == 0.0);

  const SurvivalCurve step{{1.0}, {0.5}};
  CHECK(synthetic_responses(std::vector<double>{2.0}, step)[0] == 3.0);
  CHECK(synthetic_responses(std::vector<double>{1.0}, step)[0] == 1.0);
  CHECK(synthetic_responses(std::vector<double>{0.5}, step)[0] == 0.5);

  const auto data = survival_rows({1, 2, 3}, {1, 0, 1});
  const auto ts = synthetic_responses(data, estimate_censoring_survival(data));
  CHECK(ts == std::vector<double>{1.0, 2.0, 4.0});

  // A jump below zero lowers the level on all of (0, y].
  const SurvivalCurve negative{{-1.0, 1.0}, {0.5, 0.25}};
  CHECK(synthetic_responses(std::vector<double>{2.0}, negative)[0] == 2.0 + 4.0);

  const SurvivalCurve dead{{1.0}, {0.0}};
  CHECK(synthetic_responses(std::vector<double>{1.0}, dead)[0] == 1.0);
  CHECK_THROWS_WITH_AS(synthetic_responses(std::vector<double>{0.5, 1.5}, dead), doctest::Contains("row 1"),
                       EstimationError);
}

TEST_CASE("synthetic_responses: identity without censoring, permutation equivariance") {
  std::mt19937_64 rng(23);
  std::exponential_distribution<double> expo(0.5);
  std::vector<double> y(200);
  for (double& v : y) v = expo(rng);
  const auto none = estimate_censoring_survival(survival_rows(y, std::vector<int>(y.size(), 1)));
  CHECK(synthetic_responses(y, none) == y);

  std::vector<int> delta(y.size());
  std::bernoulli_distribution coin(0.3);
  for (int& d : delta) d = coin(rng) ? 0 : 1;
  const auto data = survival_rows(y, delta);
  const auto ts = synthetic_responses(data, estimate_censoring_survival(data));
  std::vector<std::size_t> perm(y.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> py(y.size());
  std::vector<int> pd(y.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    py[i] = y[perm[i]];
    pd[i] = delta[perm[i]];
  }
  const auto pdata = survival_rows(py, pd);
  const auto pts = synthetic_responses(pdata, estimate_censoring_survival(pdata));
  for (std::size_t i = 0; i < perm.size(); ++i) CHECK(pts[i] == ts[perm[i]]);
}

TEST_CASE("synthetic transform with the true G is unbiased") {
  // Y* = (V+1)^2, V ~ U(0,1): E[Y*] = 7/3. C ~ U(0, c): G(s) = 1 - s/c.
  const double c = 6.0;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit;
  const std::size_t n = 20000;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double latent = std::pow(unit(rng) + 1.0, 2);
    const double y = std::min(latent, c * unit(rng));
    const double t = -c * std::log(1.0 - y / c);  // integral_0^y ds / (1 - s/c)
    sum += t;
    sum2 += t * t;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1));
  CHECK(std::abs(mean - 7.0 / 3.0) < 3.0 * se);
}

TEST_CASE("calibrate_censoring") {
  SimConfig dgp;
  const auto cal = calibrate_censoring(0.3, dgp, 20000, 5);
  CHECK(std::abs(cal.achieved_rate - 0.3) <= 0.01);
  CHECK(cal.c > 0.0);

  // Monotone: a larger bound censors less on the same probe.
  const auto probe = draw_latent_probe(dgp, 20000, 5);
  const auto rate = [&](double c) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < probe.latent.size(); ++i) k += probe.latent[i] >= c * probe.censor_uniform[i];
    return static_cast<double>(k) / static_cast<double>(probe.latent.size());
  };
  CHECK(rate(cal.c * 1.5) < rate(cal.c));
  CHECK(rate(cal.c / 1.5) > rate(cal.c));

  CHECK_THROWS_AS(calibrate_censoring(1.0, dgp, 20000, 5), ValidationError);
  CHECK_THROWS_AS(calibrate_censoring(0.99, dgp, 20000, 5), EstimationError);
  CHECK_THROWS_AS(calibrate_censoring(0.3, dgp, 500, 5), ValidationError);
}
