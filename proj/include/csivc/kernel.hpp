#pragma once

#include <cmath>
#include <numbers>
#include <string_view>

namespace csivc {

enum class KernelFamily { epanechnikov, gaussian };

struct KernelSpec {
  KernelFamily family = KernelFamily::epanechnikov;
};

inline double epanechnikov(double u) {
  return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
}

inline double gaussian(double u) {
  return std::exp(-0.5 * u * u) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

inline double kernel_weight(KernelSpec spec, double u) {
  return spec.family == KernelFamily::epanechnikov ? epanechnikov(u) : gaussian(u);
}

// Half-width of the kernel support in bandwidth units (infinite for gaussian).
inline double support_radius(KernelSpec spec) {
  return spec.family == KernelFamily::epanechnikov ? 1.0 : INFINITY;
}

std::string_view to_string(KernelFamily family);
// Accepts "epanechnikov" or "gaussian"; throws ValidationError otherwise.
KernelFamily parse_kernel_family(std::string_view name);

}  // namespace csivc
