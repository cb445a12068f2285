#pragma once

// Analytic smoothing of the δ-insensitive absolute loss and the Taylor series
// of erf that drives the analytic-gradient estimator.

#include <cstddef>
#include <functional>
#include <string>

namespace lao {

/// ρ(x) = x·erf(x) + e^{-x²}/√π. Smooth, even, ρ′ = erf, ρ(x) − |x| → 0.
double rho(double x);

/// Smoothed δ-insensitive loss f_ε, a convex analytic ε-approximation of
/// |x|_δ = max{|x| − δ, 0}.
struct SmoothedLoss {
  double delta = 0.0;
  double epsilon = 1.0;

  double value(double x) const;
  /// f_ε′(z) = ½[erf((z−δ)/ε) + erf((z+δ)/ε)]
  double derivative(double z) const;
};

double f_eps(const SmoothedLoss& s, double x);
double f_eps_grad_scalar(const SmoothedLoss& s, double z);

/// |x|_δ
double delta_insensitive(double x, double delta);

/// A Taylor coefficient held as sign and log-magnitude so large indices do
/// not overflow factorials. sign == 0 means the coefficient is exactly zero.
struct LogCoefficient {
  int sign = 0;
  double log_abs = 0.0;

  double value() const;
};

/// Taylor coefficients {a_n} of an analytic f′.
struct AnalyticSeries {
  std::function<LogCoefficient(std::size_t)> log_coeff;
  std::string description;

  double coeff(std::size_t n) const { return log_coeff(n).value(); }
};

/// a_n for erf: zero at even n, (2/√π)(−1)^j / (j!(2j+1)) at n = 2j+1.
double erf_series_coeff(std::size_t n);
LogCoefficient erf_series_log_coeff(std::size_t n);

/// The series of ρ′ = erf.
AnalyticSeries erf_series();

}  // namespace lao
