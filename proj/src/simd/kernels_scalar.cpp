#include "csivc/simd.hpp"

namespace csivc::simd::scalar {

namespace {

template <class Kernel>
WeightedSums accumulate(const SumRequest& req, Kernel kernel) {
  WeightedSums s;
  const bool has_y = !req.y.empty();
  const bool has_prior = !req.prior.empty();
  for (std::size_t i = 0; i < req.x.size(); ++i) {
    if (i == req.exclude) continue;
    double w = kernel((req.x0 - req.x[i]) * req.inv_h);
    if (has_prior) w *= req.prior[i];
    s.denominator += w;
    if (has_y) s.numerator += w * req.y[i];
  }
  return s;
}

}  // namespace

WeightedSums weighted_sums(const SumRequest& req) {
  if (req.family == KernelFamily::epanechnikov) return accumulate(req, epanechnikov);
  return accumulate(req, gaussian);
}

void project(std::span<const double> rows, std::span<const double> direction, std::span<double> out) {
  const std::size_t d = direction.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += rows[i * d + j] * direction[j];
    out[i] = acc;
  }
}

}  // namespace csivc::simd::scalar
