#include "rdtf/fit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "rdtf/grid.hpp"

namespace rdtf {

double LogLogFit::decades() const { return x_min > 0.0 ? std::log10(x_max / x_min) : 0.0; }
double FitReport::decades() const { return t_min > 0.0 ? std::log10(t_max / t_min) : 0.0; }

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InsufficientRange, "linear fit needs two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(x.size());
  my /= double(y.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::InsufficientRange, "linear fit needs distinct abscissae");
  const double b = sxy / sxx;
  return {my - b * mx, b};
}

LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::InvalidArgument, "fit inputs differ in length");
  std::vector<double> lx, ly;
  LogLogFit f;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    f.x_min = lx.size() == 1 ? x[i] : std::min(f.x_min, x[i]);
    f.x_max = lx.size() == 1 ? x[i] : std::max(f.x_max, x[i]);
  }
  f.samples = lx.size();
  if (f.samples < kMinFitSamples || f.decades() < kMinFitDecades - 1e-9) {
    std::ostringstream os;
    os << "log-log fit needs >= " << kMinFitSamples << " positive samples over >= " << kMinFitDecades
       << " decades (have " << f.samples << " over " << f.decades() << ")";
    throw Error(ErrorCode::InsufficientRange, os.str());
  }
  const auto [a, b] = linear_fit(lx, ly);
  f.slope = b;
  f.intercept = a;
  double mx = 0.0;
  for (double v : lx) mx += v;
  mx /= double(lx.size());
  double rss = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (a + b * lx[i]);
    rss += e * e;
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  f.residual = std::sqrt(rss / double(lx.size()));
  f.std_error = std::sqrt(rss / double(lx.size() - 2) / sxx);
  return f;
}

FitReport exponent_report(const std::string& quantity, double predicted, const std::vector<double>& t,
                          const std::vector<double>& y, double tolerance) {
  const LogLogFit f = loglog_fit(t, y);
  FitReport r;
  r.quantity = quantity;
  r.predicted = predicted;
  r.fitted = f.slope;
  r.std_error = f.std_error;
  r.constant = std::exp(f.intercept);
  r.t_min = f.x_min;
  r.t_max = f.x_max;
  r.samples = f.samples;
  r.tolerance = tolerance;
  r.pass = std::abs(f.slope - predicted) <= tolerance;
  return r;
}

FitReport decay_report(const std::string& quantity, double predicted, const std::vector<double>& t,
                       const std::vector<double>& y, double tolerance, double zero) {
  if (std::any_of(y.begin(), y.end(), [&](double v) { return std::abs(v) > zero; }))
    return exponent_report(quantity, predicted, t, y, tolerance);
  const std::vector<double> ones(t.size(), 1.0);
  const LogLogFit f = loglog_fit(t, ones);
  FitReport r;
  r.quantity = quantity;
  r.predicted = predicted;
  r.fitted = predicted;
  r.t_min = f.x_min;
  r.t_max = f.x_max;
  r.samples = f.samples;
  r.tolerance = tolerance;
  r.pass = true;
  r.note = "identically zero";
  return r;
}

}  // namespace rdtf
