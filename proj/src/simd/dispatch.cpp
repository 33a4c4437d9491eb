#include <atomic>
#include <cstdlib>
#include <string>

#include "csivc/errors.hpp"
#include "csivc/simd.hpp"

namespace csivc::simd {

namespace {

Isa probe() {
#ifdef CSIVC_HAVE_AVX2_PATH
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::avx2;
#endif
  return Isa::scalar;
}

Isa initial() {
  const char* env = std::getenv("CSIVC_SIMD");
  if (env != nullptr && std::string(env) == "scalar") return Isa::scalar;
  return probe();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial()};
  return isa;
}

}  // namespace

Isa detected_isa() {
  static const Isa isa = probe();
  return isa;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2) {
    throw ValidationError("AVX2 requested but not supported by this CPU");
  }
  active().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

WeightedSums weighted_sums(const SumRequest& req) {
#ifdef CSIVC_HAVE_AVX2_PATH
  if (active_isa() == Isa::avx2) return avx2::weighted_sums(req);
#endif
  return scalar::weighted_sums(req);
}

void project(std::span<const double> rows, std::span<const double> direction, std::span<double> out) {
#ifdef CSIVC_HAVE_AVX2_PATH
  if (active_isa() == Isa::avx2) return avx2::project(rows, direction, out);
#endif
  scalar::project(rows, direction, out);
}

}  // namespace csivc::simd
