#include "lao/losses.hpp"

#include <cmath>
#include <numbers>

namespace lao {

namespace {
constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;
constexpr double kTwoOverSqrtPi = 2.0 * std::numbers::inv_sqrtpi;
}  // namespace

double rho(double x) {
  const double a = std::fabs(x);
  return a * std::erf(a) + kInvSqrtPi * std::exp(-a * a);
}

double SmoothedLoss::value(double x) const {
  const double half_eps = 0.5 * epsilon;
  return half_eps * rho((x - delta) / epsilon) + half_eps * rho((x + delta) / epsilon) - delta;
}

double SmoothedLoss::derivative(double z) const {
  return 0.5 * (std::erf((z - delta) / epsilon) + std::erf((z + delta) / epsilon));
}

double f_eps(const SmoothedLoss& s, double x) { return s.value(x); }

double f_eps_grad_scalar(const SmoothedLoss& s, double z) { return s.derivative(z); }

double delta_insensitive(double x, double delta) { return std::fmax(std::fabs(x) - delta, 0.0); }

double LogCoefficient::value() const {
  if (sign == 0) return 0.0;
  return sign > 0 ? std::exp(log_abs) : -std::exp(log_abs);
}

LogCoefficient erf_series_log_coeff(std::size_t n) {
  if (n % 2 == 0) return {};
  const std::size_t j = (n - 1) / 2;
  const double jd = static_cast<double>(j);
  LogCoefficient c;
  c.sign = (j % 2 == 0) ? 1 : -1;
  c.log_abs = std::log(kTwoOverSqrtPi) - std::lgamma(jd + 1.0) - std::log(2.0 * jd + 1.0);
  return c;
}

double erf_series_coeff(std::size_t n) {
  if (n % 2 == 0) return 0.0;
  const std::size_t j = (n - 1) / 2;
  // Direct product is exact enough while j! is representable.
  if (j <= 20) {
    double factorial = 1.0;
    for (std::size_t i = 2; i <= j; ++i) factorial *= static_cast<double>(i);
    const double mag = kTwoOverSqrtPi / (factorial * static_cast<double>(2 * j + 1));
    return (j % 2 == 0) ? mag : -mag;
  }
  return erf_series_log_coeff(n).value();
}

AnalyticSeries erf_series() {
  return AnalyticSeries{[](std::size_t n) { return erf_series_log_coeff(n); },
                        "erf: a_{2j+1} = (2/sqrt(pi)) (-1)^j / (j! (2j+1))"};
}

}  // namespace lao
