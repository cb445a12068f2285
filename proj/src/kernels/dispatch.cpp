#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "lao/kernels.hpp"

namespace lao::kernels {
namespace {

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(LAO_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(LAO_HAVE_NEON_KERNELS)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* compiled_table(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return &detail::kScalarTable;
    case Isa::Avx2:
#if defined(LAO_HAVE_AVX2_KERNELS)
      return &detail::kAvx2Table;
#else
      return nullptr;
#endif
    case Isa::Neon:
#if defined(LAO_HAVE_NEON_KERNELS)
      return &detail::kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& select() {
  const auto isas = available();
  if (const char* forced = std::getenv("LAO_KERNELS"); forced != nullptr && *forced != '\0') {
    const std::string_view name(forced);
    for (Isa isa : isas) {
      if (name == to_string(isa)) return table(isa);
    }
    // Unknown or unsupported request: fall back to the reference path.
    return detail::kScalarTable;
  }
  return table(isas.back());
}

}  // namespace

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

std::vector<Isa> available() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
    if (compiled_table(isa) != nullptr && cpu_supports(isa)) out.push_back(isa);
  }
  return out;
}

const KernelTable& table(Isa isa) {
  const KernelTable* t = compiled_table(isa);
  if (t == nullptr || !cpu_supports(isa)) {
    throw std::invalid_argument(std::string("kernel variant unavailable: ") + to_string(isa));
  }
  return *t;
}

const KernelTable& active() {
  static const KernelTable& chosen = select();
  return chosen;
}

namespace {
void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel operands differ in length");
}
}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> a) { return active().sum_squares(a.data(), a.size()); }

double abs_sum(std::span<const double> a) { return active().abs_sum(a.data(), a.size()); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_size(x.size(), y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void scale(double alpha, std::span<double> x) { active().scale(alpha, x.data(), x.size()); }

void scaled_difference(std::span<const double> a, std::span<const double> b, double alpha,
                       std::span<double> out) {
  require_same_size(a.size(), b.size());
  require_same_size(a.size(), out.size());
  active().scaled_difference(a.data(), b.data(), alpha, out.data(), a.size());
}

}  // namespace lao::kernels
