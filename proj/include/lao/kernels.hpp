#pragma once

// Dense double-precision vector kernels used by the solvers' inner loops.
//
// Each kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The variant is
// chosen once at runtime from CPU capabilities; LAO_KERNELS=scalar|avx2|neon
// overrides the choice.
//
// Elementwise kernels (axpy, scale, scaled_difference) are bit-identical
// across variants: the vector paths use separate multiply and add, never FMA.
// Reductions (dot, sum_squares, abs_sum) reassociate and agree with the
// scalar reference to rounding.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lao::kernels {

enum class Isa { Scalar, Avx2, Neon };

const char* to_string(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  double (*abs_sum)(const double* a, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  // out = (a - b) * alpha
  void (*scaled_difference)(const double* a, const double* b, double alpha, double* out,
                            std::size_t n);
};

/// Variants compiled in and supported by the running CPU, scalar first.
std::vector<Isa> available();

/// Table for one variant. Throws std::invalid_argument if unavailable.
const KernelTable& table(Isa isa);

/// The runtime-selected table.
const KernelTable& active();

// Span front-ends over the active table. Sizes must match.
double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);
double abs_sum(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
void scaled_difference(std::span<const double> a, std::span<const double> b, double alpha,
                       std::span<double> out);

namespace detail {
extern const KernelTable kScalarTable;
#if defined(LAO_HAVE_AVX2_KERNELS)
extern const KernelTable kAvx2Table;
#endif
#if defined(LAO_HAVE_NEON_KERNELS)
extern const KernelTable kNeonTable;
#endif
}  // namespace detail

}  // namespace lao::kernels
