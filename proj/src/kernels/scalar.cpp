#include "qnash/kernels.hpp"

namespace qnash::kernels {
namespace {

double norm_squared_scalar(const cplx* z, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += std::norm(z[k]);
  return acc;
}

double weighted_norm_squared_scalar(const double* w, const cplx* z, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += w[k] * std::norm(z[k]);
  return acc;
}

void squared_moduli_scalar(const cplx* z, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = std::norm(z[k]);
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += a[k] * b[k];
  return acc;
}

void scale_scalar(cplx* z, double s, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) z[k] *= s;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable kTable{
      norm_squared_scalar, weighted_norm_squared_scalar, squared_moduli_scalar,
      dot_scalar, scale_scalar};
  return kTable;
}

}  // namespace qnash::kernels
