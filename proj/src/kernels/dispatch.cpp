#include <atomic>
#include <cstdlib>
#include <string>

#include "coco/errors.hpp"
#include "coco/kernels.hpp"

namespace coco::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(COCO_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() {
  Isa best = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
  if (const char* env = std::getenv("COCO_KERNELS")) {
    const std::string_view name(env);
    if (name == "scalar") return Isa::scalar;
    if (name == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
  }
  return best;
}

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{initial_isa()};
  return slot;
}

void require_same_size(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw InputDomainError("kernel span sizes differ: " +
                           std::to_string(expected) + " vs " +
                           std::to_string(got));
  }
}

[[noreturn]] void throw_unavailable(Isa isa);

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return cpu_has_avx2();
  }
  return false;
}

Isa active_isa() { return active_slot().load(std::memory_order_relaxed); }

namespace {
void throw_unavailable(Isa isa) {
  throw InputDomainError("kernel variant " + std::string(isa_name(isa)) +
                         " is not available on this machine");
}
}  // namespace

void set_active_isa(Isa isa) {
  if (!isa_available(isa)) throw_unavailable(isa);
  active_slot().store(isa, std::memory_order_relaxed);
}

void relative_luminance(Isa isa, std::span<const double> r,
                        std::span<const double> g, std::span<const double> b,
                        std::span<double> out) {
  require_same_size(out.size(), r.size());
  require_same_size(out.size(), g.size());
  require_same_size(out.size(), b.size());
#if defined(COCO_BUILD_AVX2)
  if (isa == Isa::avx2 && cpu_has_avx2()) {
    avx2::relative_luminance(r.data(), g.data(), b.data(), out.data(),
                             out.size());
    return;
  }
#endif
  if (isa != Isa::scalar) throw_unavailable(isa);
  scalar::relative_luminance(r.data(), g.data(), b.data(), out.data(),
                             out.size());
}

void contrast_ratio(Isa isa, std::span<const double> lum_a,
                    std::span<const double> lum_b, std::span<double> value,
                    std::span<double> lighter, std::span<double> darker) {
  require_same_size(value.size(), lum_a.size());
  require_same_size(value.size(), lum_b.size());
  require_same_size(value.size(), lighter.size());
  require_same_size(value.size(), darker.size());
#if defined(COCO_BUILD_AVX2)
  if (isa == Isa::avx2 && cpu_has_avx2()) {
    avx2::contrast_ratio(lum_a.data(), lum_b.data(), value.data(),
                         lighter.data(), darker.data(), value.size());
    return;
  }
#endif
  if (isa != Isa::scalar) throw_unavailable(isa);
  scalar::contrast_ratio(lum_a.data(), lum_b.data(), value.data(),
                         lighter.data(), darker.data(), value.size());
}

void relative_luminance(std::span<const double> r, std::span<const double> g,
                        std::span<const double> b, std::span<double> out) {
  relative_luminance(active_isa(), r, g, b, out);
}

void contrast_ratio(std::span<const double> lum_a, std::span<const double> lum_b,
                    std::span<double> value, std::span<double> lighter,
                    std::span<double> darker) {
  contrast_ratio(active_isa(), lum_a, lum_b, value, lighter, darker);
}

}  // namespace coco::kernels
