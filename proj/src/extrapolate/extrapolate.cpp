#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <json.hpp>

#include "hullas/csv.hpp"
#include "hullas/error.hpp"
#include "hullas/extrapolate.hpp"

namespace hullas::extrapolate {

void TimeSeries::validate() const {
  if (times.size() != values.size()) throw ValidationError("time series: times and values differ in length");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i])) {
      throw ValidationError("time series: non-finite entry at sample " + std::to_string(i));
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw ValidationError("time series: times must be strictly increasing (sample " + std::to_string(i) + ")");
    }
  }
}

TimeSeries read_series_csv(const std::filesystem::path& path) {
  const csv::Table table = csv::read(path);
  TimeSeries s;
  for (const auto& row : table.rows) {
    if (row.size() < 2) throw ValidationError("time-series CSV needs two columns (t, value)");
    s.times.push_back(row[0]);
    s.values.push_back(row[1]);
  }
  s.validate();
  return s;
}

TimeSeries smooth(const TimeSeries& series, int window) {
  series.validate();
  const auto n = static_cast<int>(series.size());
  if (window < 1 || window % 2 == 0) throw ValidationError("smoothing window must be a positive odd count");
  if (window > n) throw ValidationError("smoothing window longer than the series");

  TimeSeries out{series.times, std::vector<double>(series.values.size())};
  const auto& v = series.values;
  for (int i = 0; i < n; ++i) {
    const int h = std::min({window / 2, i, n - 1 - i});
    // Averaging deviations from the centre keeps constant stretches exact.
    double dev = 0.0;
    for (int j = i - h; j <= i + h; ++j) dev += v[j] - v[i];
    out.values[i] = v[i] + dev / (2 * h + 1);
  }
  return out;
}

Extrema find_extrema(const TimeSeries& series) {
  series.validate();
  Extrema out;
  const auto& v = series.values;
  if (v.size() < 3) {
    out.warnings.push_back("series shorter than 3 samples has no interior extrema");
    return out;
  }
  struct Run {
    std::size_t begin, end;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
    runs.push_back({i, j});
    i = j + 1;
  }
  for (std::size_t k = 1; k + 1 < runs.size(); ++k) {
    const double here = v[runs[k].begin];
    const double prev = v[runs[k - 1].begin];
    const double next = v[runs[k + 1].begin];
    const std::size_t mid = (runs[k].begin + runs[k].end) / 2;
    if (here > prev && here > next) out.maxima.push_back(mid);
    if (here < prev && here < next) out.minima.push_back(mid);
  }
  if (out.maxima.size() < 3) out.warnings.push_back("fewer than 3 maxima; envelope fit will fail");
  if (out.minima.size() < 3) out.warnings.push_back("fewer than 3 minima; envelope fit will fail");
  return out;
}

double EnvelopeFit::evaluate(double t) const { return sign * a * std::exp(-b * t) + c; }

namespace {

struct Model {
  int sign;
  double t0;
  const std::vector<std::pair<double, double>>& pts;

  // Parameters (a0, b, c) with a0 the amplitude at t0.
  double cost(const Eigen::Vector3d& p, Eigen::VectorXd* residual = nullptr, Eigen::MatrixXd* jac = nullptr) const {
    const auto n = static_cast<Eigen::Index>(pts.size());
    if (residual) residual->resize(n);
    if (jac) jac->resize(n, 3);
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double tau = pts[static_cast<std::size_t>(i)].first - t0;
      const double e = std::exp(-p(1) * tau);
      const double r = sign * p(0) * e + p(2) - pts[static_cast<std::size_t>(i)].second;
      s += r * r;
      if (residual) (*residual)(i) = r;
      if (jac) {
        (*jac)(i, 0) = sign * e;
        (*jac)(i, 1) = -sign * p(0) * tau * e;
        (*jac)(i, 2) = 1.0;
      }
    }
    return s;
  }
};

}  // namespace

EnvelopeFit fit_envelope(const std::vector<std::pair<double, double>>& points, int sign, const FitOptions& options) {
  if (sign != 1 && sign != -1) throw ValidationError("envelope sign must be +1 or -1");
  if (points.size() < 3) throw ValidationError("envelope fit needs at least 3 points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second)) {
      throw ValidationError("envelope fit: non-finite point " + std::to_string(i));
    }
    if (i > 0 && !(points[i].first > points[i - 1].first)) {
      throw ValidationError("envelope fit: times must be strictly increasing");
    }
  }

  EnvelopeFit fit;
  fit.sign = sign;
  const double t0 = points.front().first;
  const Model model{sign, t0, points};

  if (sign * (points.back().second - points.front().second) > 0.0) {
    fit.warnings.push_back("envelope points do not decay towards the asymptote");
  }

  // Initial guess: asymptote at the last point, amplitude from the first,
  // rate from the log-ratio of the first two deviations.
  const double c0 = points.back().second;
  const double d0 = sign * (points[0].second - c0);
  const double d1 = sign * (points[1].second - c0);
  double b0 = (d0 > 0.0 && d1 > 0.0) ? std::log(d0 / d1) / (points[1].first - points[0].first) : 0.0;
  if (!(b0 > 0.0) || !std::isfinite(b0)) b0 = 1.0 / (points.back().first - t0);
  Eigen::Vector3d p(d0, b0, c0);

  bool clamped = false;
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  double cost = model.cost(p, &r, &j);
  double lambda = 1e-3;
  bool converged = cost == 0.0;
  int it = 0;
  for (; it < options.max_iterations && !converged; ++it) {
    const Eigen::Matrix3d jtj = j.transpose() * j;
    const Eigen::Vector3d grad = j.transpose() * r;
    if (grad.isZero(0.0)) {
      converged = true;
      break;
    }
    const double diag_floor = 1e-12 * jtj.diagonal().maxCoeff();
    bool accepted = false;
    while (!accepted) {
      Eigen::Matrix3d damped = jtj;
      for (int k = 0; k < 3; ++k) damped(k, k) += lambda * std::max(jtj(k, k), diag_floor);
      Eigen::Vector3d step = damped.ldlt().solve(-grad);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      Eigen::Vector3d trial = p + step;
      if (trial(1) < 0.0) {
        trial(1) = 0.0;
        clamped = true;
      }
      const double step_norm = (trial - p).norm();
      const double trial_cost = model.cost(trial);
      if (trial_cost <= cost) {
        p = trial;
        cost = model.cost(p, &r, &j);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
      } else {
        lambda *= 10.0;
      }
      if (step_norm <= options.step_tolerance * (1.0 + p.norm()) || cost == 0.0) {
        converged = true;
        break;
      }
      if (lambda > 1e30) break;
    }
    if (!accepted && !converged) break;
  }

  fit.iterations = it;
  fit.residual_rms = std::sqrt(cost / static_cast<double>(points.size()));
  if (!converged) {
    throw ConvergenceError("envelope fit did not converge in " + std::to_string(options.max_iterations) +
                               " iterations",
                           fit.residual_rms);
  }
  if (clamped) fit.warnings.push_back("decay rate driven negative and clamped to 0");
  fit.b = p(1);
  fit.c = p(2);
  fit.a = p(0) * std::exp(p(1) * t0);
  return fit;
}

SteadyResult steady_state(const TimeSeries& series, int window) {
  series.validate();
  if (series.size() == 0) throw ValidationError("empty time series");

  SteadyResult out;
  const auto [lo, hi] = std::minmax_element(series.values.begin(), series.values.end());
  if (*lo == *hi) {
    out.value = *lo;
    out.upper.c = out.lower.c = *lo;
    out.lower.sign = -1;
    return out;
  }

  const TimeSeries smoothed = smooth(series, window);
  const Extrema ext = find_extrema(smoothed);
  out.maxima = ext.maxima.size();
  out.minima = ext.minima.size();
  if (ext.maxima.size() < 3 || ext.minima.size() < 3) {
    throw ValidationError("steady value needs at least 3 maxima and 3 minima after smoothing (found " +
                          std::to_string(ext.maxima.size()) + " and " + std::to_string(ext.minima.size()) +
                          "); provide a longer series");
  }
  auto points = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::pair<double, double>> pts;
    for (auto i : idx) pts.emplace_back(series.times[i], series.values[i]);
    return pts;
  };
  out.upper = fit_envelope(points(ext.maxima), +1);
  out.lower = fit_envelope(points(ext.minima), -1);
  out.value = 0.5 * (out.upper.c + out.lower.c);
  return out;
}

double steady_value(const TimeSeries& series, int window) { return steady_state(series, window).value; }

std::string steady_result_json(const SteadyResult& result) {
  auto env = [](const EnvelopeFit& f) {
    return nlohmann::json{{"a", f.a}, {"b", f.b}, {"c", f.c}, {"sign", f.sign}, {"residual_rms", f.residual_rms}};
  };
  nlohmann::json j{{"steady_value", result.value},
                   {"maxima", env(result.upper)},
                   {"minima", env(result.lower)},
                   {"maxima_count", result.maxima},
                   {"minima_count", result.minima}};
  return j.dump(2) + "\n";
}

}  // namespace hullas::extrapolate
