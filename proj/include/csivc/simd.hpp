#pragma once

// Kernel-weighted sums used by every smoother in the library.
//
// Each entry point has a scalar reference implementation and, on x86-64, an
// AVX2 variant. The dispatching functions pick the widest variant the CPU
// supports unless CSIVC_SIMD=scalar is set or set_active_isa() overrides it.
// Variants agree up to summation order.

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>

#include "csivc/kernel.hpp"

namespace csivc::simd {

enum class Isa { scalar, avx2 };

inline constexpr std::size_t no_exclusion = std::numeric_limits<std::size_t>::max();

struct WeightedSums {
  double numerator = 0.0;    // sum_i y_i * p_i * K((x0 - x_i) * inv_h)
  double denominator = 0.0;  // sum_i       p_i * K((x0 - x_i) * inv_h)
};

// `y` empty: numerator stays 0. `prior` empty: p_i = 1.
// Index `exclude` is skipped entirely.
struct SumRequest {
  KernelFamily family = KernelFamily::epanechnikov;
  std::span<const double> x;
  std::span<const double> y;
  std::span<const double> prior;
  double x0 = 0.0;
  double inv_h = 1.0;
  std::size_t exclude = no_exclusion;
};

WeightedSums weighted_sums(const SumRequest& req);

// out[i] = sum_j rows[i * dim + j] * direction[j]
void project(std::span<const double> rows, std::span<const double> direction,
             std::span<double> out);

Isa detected_isa();
Isa active_isa();
// Throws ValidationError when the CPU lacks the requested ISA.
void set_active_isa(Isa isa);
std::string_view isa_name(Isa isa);

namespace scalar {
WeightedSums weighted_sums(const SumRequest& req);
void project(std::span<const double> rows, std::span<const double> direction, std::span<double> out);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define CSIVC_HAVE_AVX2_PATH 1
namespace avx2 {
WeightedSums weighted_sums(const SumRequest& req);
void project(std::span<const double> rows, std::span<const double> direction, std::span<double> out);
}  // namespace avx2
#endif

}  // namespace csivc::simd
