// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "csivc/simd.hpp"

namespace csivc::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

struct Accumulators {
  __m256d num = _mm256_setzero_pd();
  __m256d den = _mm256_setzero_pd();
  double num_tail = 0.0;
  double den_tail = 0.0;
};

// Epanechnikov over [begin, end). max(0, .75 (1 - z^2)) equals the branchy
// scalar form bit for bit, so only the summation order differs.
void epanechnikov_segment(const SumRequest& req, std::size_t begin, std::size_t end, Accumulators& acc) {
  const bool has_y = !req.y.empty();
  const bool has_prior = !req.prior.empty();
  const __m256d x0 = _mm256_set1_pd(req.x0);
  const __m256d inv_h = _mm256_set1_pd(req.inv_h);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d c075 = _mm256_set1_pd(0.75);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = begin;
  for (; i + 4 <= end; i += 4) {
    const __m256d z = _mm256_mul_pd(_mm256_sub_pd(x0, _mm256_loadu_pd(req.x.data() + i)), inv_h);
    __m256d w = _mm256_max_pd(zero, _mm256_mul_pd(c075, _mm256_sub_pd(one, _mm256_mul_pd(z, z))));
    if (has_prior) w = _mm256_mul_pd(w, _mm256_loadu_pd(req.prior.data() + i));
    acc.den = _mm256_add_pd(acc.den, w);
    if (has_y) acc.num = _mm256_add_pd(acc.num, _mm256_mul_pd(w, _mm256_loadu_pd(req.y.data() + i)));
  }
  for (; i < end; ++i) {
    double w = epanechnikov((req.x0 - req.x[i]) * req.inv_h);
    if (has_prior) w *= req.prior[i];
    acc.den_tail += w;
    if (has_y) acc.num_tail += w * req.y[i];
  }
}

}  // namespace

WeightedSums weighted_sums(const SumRequest& req) {
  // No vector exp here; the gaussian kernel stays on the reference path.
  if (req.family != KernelFamily::epanechnikov) return scalar::weighted_sums(req);
  Accumulators acc;
  const std::size_t n = req.x.size();
  if (req.exclude < n) {
    epanechnikov_segment(req, 0, req.exclude, acc);
    epanechnikov_segment(req, req.exclude + 1, n, acc);
  } else {
    epanechnikov_segment(req, 0, n, acc);
  }
  return {hsum(acc.num) + acc.num_tail, hsum(acc.den) + acc.den_tail};
}

void project(std::span<const double> rows, std::span<const double> direction, std::span<double> out) {
  const std::size_t d = direction.size();
  if (d != 2) {
    scalar::project(rows, direction, out);
    return;
  }
  // Two interleaved columns: load (x0 y0 x1 y1), multiply by (a b a b),
  // then add adjacent pairs.
  const __m256d dir = _mm256_setr_pd(direction[0], direction[1], direction[0], direction[1]);
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(rows.data() + 2 * i), dir);
    const __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(rows.data() + 2 * i + 4), dir);
    // hadd gives (p0[0]+p0[1], p1[0]+p1[1], p0[2]+p0[3], p1[2]+p1[3])
    const __m256d h = _mm256_hadd_pd(p0, p1);
    _mm256_storeu_pd(out.data() + i, _mm256_permute4x64_pd(h, 0b11011000));
  }
  for (; i < n; ++i) out[i] = rows[2 * i] * direction[0] + rows[2 * i + 1] * direction[1];
}

}  // namespace csivc::simd::avx2
