#include <cmath>

#include "lao/kernels.hpp"

namespace lao::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_squares_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double abs_sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i]);
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void scaled_difference_scalar(const double* a, const double* b, double alpha, double* out,
                              std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (a[i] - b[i]) * alpha;
}

}  // namespace

const KernelTable kScalarTable{Isa::Scalar,      dot_scalar,   sum_squares_scalar,
                               abs_sum_scalar,   axpy_scalar,  scale_scalar,
                               scaled_difference_scalar};

}  // namespace lao::kernels::detail
