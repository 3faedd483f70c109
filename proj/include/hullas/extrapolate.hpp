#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hullas/types.hpp"

namespace hullas::extrapolate {

struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;

  std::size_t size() const { return times.size(); }
  /// Strictly increasing finite times, equal lengths, finite values.
  void validate() const;
};

TimeSeries read_series_csv(const std::filesystem::path& path);

/// Centred moving average; near the ends the window shrinks symmetrically.
TimeSeries smooth(const TimeSeries& series, int window = 5);

struct Extrema {
  std::vector<std::size_t> maxima;
  std::vector<std::size_t> minima;
  std::vector<std::string> warnings;
};

/// Strict interior local extrema; a plateau counts once, at its midpoint.
Extrema find_extrema(const TimeSeries& series);

/// y(t) = sign * a * exp(-b t) + c
struct EnvelopeFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  int sign = 1;
  double residual_rms = 0.0;
  int iterations = 0;
  std::vector<std::string> warnings;

  double evaluate(double t) const;
};

struct FitOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-12;
};

/// Damped Gauss-Newton (Levenberg-Marquardt) fit of the exponential envelope.
EnvelopeFit fit_envelope(const std::vector<std::pair<double, double>>& points, int sign,
                         const FitOptions& options = {});

struct SteadyResult {
  double value = 0.0;
  EnvelopeFit upper;
  EnvelopeFit lower;
  std::size_t maxima = 0;
  std::size_t minima = 0;
};

/// Smooths to locate extrema, fits the envelopes through the raw values at
/// those samples and returns the mean of the two asymptotes.
SteadyResult steady_state(const TimeSeries& series, int window = 5);
double steady_value(const TimeSeries& series, int window = 5);

std::string steady_result_json(const SteadyResult& result);

}  // namespace hullas::extrapolate
