#include <atomic>
#include <cassert>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "qnash/kernels.hpp"

namespace qnash::kernels {

#if defined(QNASH_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(QNASH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  Isa isa = detected_isa();
  if (const char* env = std::getenv("QNASH_ISA")) {
    const std::string want{env};
    if (want == "scalar") {
      isa = Isa::kScalar;
    } else if (want == "avx2" && isa_available(Isa::kAvx2)) {
      isa = Isa::kAvx2;
    }
  }
  return isa;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

const KernelTable* avx2_table() {
#if defined(QNASH_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &avx2_kernels() : nullptr;
#else
  return nullptr;
#endif
}

bool isa_available(Isa isa) {
  return isa == Isa::kScalar || avx2_table() != nullptr;
}

Isa detected_isa() {
  return isa_available(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("instruction set not available: " +
                                std::string{to_string(isa)});
  }
  active().store(isa, std::memory_order_relaxed);
}

const KernelTable& table(Isa isa) {
  if (isa == Isa::kAvx2) {
    if (const KernelTable* t = avx2_table()) return *t;
    throw std::invalid_argument("avx2 kernels not available");
  }
  return scalar_table();
}

namespace {
const KernelTable& current() { return table(active_isa()); }
}  // namespace

double norm_squared(std::span<const cplx> z) {
  return current().norm_squared(z.data(), z.size());
}

double weighted_norm_squared(std::span<const double> w, std::span<const cplx> z) {
  assert(w.size() == z.size());
  return current().weighted_norm_squared(w.data(), z.data(), z.size());
}

void squared_moduli(std::span<const cplx> z, std::span<double> out) {
  assert(out.size() == z.size());
  current().squared_moduli(z.data(), out.data(), z.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return current().dot(a.data(), b.data(), a.size());
}

void scale(std::span<cplx> z, double s) { current().scale(z.data(), s, z.size()); }

}  // namespace qnash::kernels
