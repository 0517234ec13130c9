#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace rdtf {

/// Ordinary least squares of log y on log x.
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;   // log of the fitted constant
  double std_error = 0.0;   // standard error of the slope
  double residual = 0.0;    // RMS of the log residuals
  std::size_t samples = 0;
  double x_min = 0.0, x_max = 0.0;
  double decades() const;
};

inline constexpr std::size_t kMinFitSamples = 8;
inline constexpr double kMinFitDecades = 1.5;

/// Throws InsufficientRange unless there are ≥ 8 positive samples spanning
/// ≥ 1.5 decades in x.
LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

struct FitReport {
  std::string quantity;
  double predicted = 0.0;
  double fitted = 0.0;
  double std_error = 0.0;
  double constant = 0.0;
  double t_min = 0.0, t_max = 0.0;
  std::size_t samples = 0;
  double tolerance = 0.15;
  bool pass = false;
  std::string note;
  double decades() const;
};

/// Fits y ~ C t^s and passes when |s - predicted| ≤ tolerance.
FitReport exponent_report(const std::string& quantity, double predicted, const std::vector<double>& t,
                          const std::vector<double>& y, double tolerance = 0.15);

/// As exponent_report, but a quantity that is at most `zero` at every sample
/// passes without a fit ("identically zero"). The sample-count and range
/// rules are enforced in both cases.
FitReport decay_report(const std::string& quantity, double predicted, const std::vector<double>& t,
                       const std::vector<double>& y, double tolerance = 0.15, double zero = 1e-9);

/// Simple linear least squares y = a + b x; returns {a, b}.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rdtf
