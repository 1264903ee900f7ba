#pragma once

// Data-parallel inner loops shared by the game, lottery and securities code.
// Each kernel has a portable scalar reference and, on x86-64, an AVX2+FMA
// variant. The variant is chosen once at startup from CPUID and can be pinned
// with QNASH_ISA=scalar|avx2 or set_active_isa().

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace qnash::kernels {

using cplx = std::complex<double>;

enum class Isa { kScalar, kAvx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  // sum |z|^2
  double (*norm_squared)(const cplx* z, std::size_t n);
  // sum w[k] |z[k]|^2
  double (*weighted_norm_squared)(const double* w, const cplx* z, std::size_t n);
  // out[k] = |z[k]|^2
  void (*squared_moduli)(const cplx* z, double* out, std::size_t n);
  // sum a[k] b[k]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // z[k] *= s
  void (*scale)(cplx* z, double s, std::size_t n);
};

const KernelTable& scalar_table();
// Null when the build or the host CPU lacks the instruction set.
const KernelTable* avx2_table();

bool isa_available(Isa isa);
Isa detected_isa();
Isa active_isa();
// Throws std::invalid_argument when the requested ISA is unavailable.
void set_active_isa(Isa isa);
const KernelTable& table(Isa isa);

double norm_squared(std::span<const cplx> z);
double weighted_norm_squared(std::span<const double> w, std::span<const cplx> z);
void squared_moduli(std::span<const cplx> z, std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
void scale(std::span<cplx> z, double s);

}  // namespace qnash::kernels
