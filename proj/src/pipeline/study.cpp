#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hullas/csv.hpp"
#include "hullas/error.hpp"
#include "hullas/pipeline.hpp"

namespace hullas::pipeline {

using nlohmann::json;

void StudyConfig::validate() const {
  if (sample_count < 2) throw ValidationError("sample_count must be at least 2");
  if (!(split > 0.0 && split < 1.0)) throw ValidationError("split must lie in (0, 1)");
  if (k_neighbors < 1) throw ValidationError("k_neighbors must be positive");
  if (!exact_gradients && sample_count < static_cast<std::size_t>(k_neighbors) + 1) {
    throw ValidationError("sample_count " + std::to_string(sample_count) + " is below k+1 = " +
                          std::to_string(k_neighbors + 1));
  }
  if (bootstrap_replicates < 1) throw ValidationError("bootstrap_replicates must be positive");
  if (repetitions < 1) throw ValidationError("repetitions must be positive");
  if (dims.empty() || degrees.empty()) throw ValidationError("error matrix needs dims and degrees");
  for (int d : dims) {
    if (d < 1) throw ValidationError("active dimensions must be positive");
  }
  for (int d : degrees) {
    if (d < 0) throw ValidationError("polynomial degrees must be non-negative");
  }
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open study configuration '" + path.string() + "'");
  StudyConfig c;
  try {
    const json j = json::parse(in);
    c.seed = j.value("seed", c.seed);
    c.sample_count = j.value("sample_count", c.sample_count);
    c.split = j.value("split", c.split);
    c.k_neighbors = j.value("k_neighbors", c.k_neighbors);
    c.bootstrap_replicates = j.value("bootstrap_replicates", c.bootstrap_replicates);
    const auto interval = j.value("interval", std::string("minmax"));
    if (interval == "minmax") {
      c.interval = subspace::IntervalKind::MinMax;
    } else if (interval == "percentile") {
      c.interval = subspace::IntervalKind::Percentile;
    } else {
      throw ValidationError("interval must be 'minmax' or 'percentile'");
    }
    c.dims = j.value("dims", c.dims);
    c.degrees = j.value("degrees", c.degrees);
    c.repetitions = j.value("repetitions", c.repetitions);
    c.exact_gradients = j.value("exact_gradients", c.exact_gradients);
    c.report_timing = j.value("report_timing", c.report_timing);
  } catch (const json::exception& e) {
    throw ValidationError("invalid study configuration '" + path.string() + "': " + e.what());
  }
  c.validate();
  return c;
}

namespace {

void write_bootstrap(const subspace::BootstrapSummary& b, const std::filesystem::path& path) {
  csv::Table t;
  t.header = {"index", "eigenvalue", "lower", "upper", "subspace_distance"};
  for (Eigen::Index i = 0; i < b.estimate.size(); ++i) {
    const double dist = i < b.subspace_distance.size() ? b.subspace_distance(i)
                                                       : std::numeric_limits<double>::quiet_NaN();
    t.rows.push_back({double(i + 1), b.estimate(i), b.lower(i), b.upper(i), dist});
  }
  csv::write(path, t);
}

std::string vec_str(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + csv::format_double(v(i));
  return s;
}

}  // namespace

StudyReport run_study(const StudyConfig& config, const DesignSpace& space, const OracleSpec& spec,
                      const std::filesystem::path& out_dir) {
  config.validate();
  space.validate();
  spec.validate(space.dimension());
  const std::size_t m = space.dimension();
  if (m < 2) throw ValidationError("an active subspace study needs at least 2 parameters");
  for (int d : config.dims) {
    if (static_cast<std::size_t>(d) >= m) throw ValidationError("active dimension " + std::to_string(d) + " must be below m");
  }
  if (config.exact_gradients && spec.kind != OracleKind::AnalyticRidge && spec.kind != OracleKind::AnalyticQuadratic) {
    throw ValidationError("exact_gradients requires an analytic oracle");
  }
  std::filesystem::create_directories(out_dir);

  StudyReport report;
  auto record = [&](const std::string& name) {
    report.artifacts.push_back(out_dir / name);
    return out_dir / name;
  };

  const auto designs = sample_designs(space, config.sample_count, config.seed);
  const Evaluation eval = evaluate_oracle(spec, designs, space);
  report.evaluated = eval.samples.size();
  report.failures = eval.failures;
  report.seconds_per_evaluation = eval.seconds_per_row;

  subspace::write_dataset(eval.samples, record("dataset.csv"), space.names);
  report.artifacts.push_back(subspace::meta_path(out_dir / "dataset.csv"));
  if (!eval.failures.empty()) {
    std::ofstream f(record("failures.csv"));
    f << "row,message\n";
    for (const auto& r : eval.failures) {
      std::string msg = r.message;
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      std::replace(msg.begin(), msg.end(), ',', ';');
      f << r.row << ',' << msg << '\n';
    }
  }

  const std::size_t kept = eval.samples.size();
  auto [train_idx, test_idx] = subspace::split_indices(kept, config.split, config.seed);
  if (!config.exact_gradients && train_idx.size() < static_cast<std::size_t>(config.k_neighbors) + 1) {
    throw ValidationError("only " + std::to_string(train_idx.size()) + " training rows survive; need k+1 = " +
                          std::to_string(config.k_neighbors + 1));
  }
  const auto normalized = subspace::normalize(eval.samples);
  const auto train = normalized.rows(train_idx);

  const subspace::GradientSet grads = config.exact_gradients
                                          ? subspace::gradients_from_matrix(oracle_gradients(spec, train.inputs))
                                          : subspace::local_linear_gradients(train, config.k_neighbors);
  if (grads.size() == 0) throw NumericalError("no usable gradient estimates");

  const auto full = subspace::eigendecompose(subspace::covariance(grads));
  report.suggested_dim = subspace::suggest_dim(full.eigenvalues);
  report.subspace = subspace::partition(full, report.suggested_dim);
  subspace::write_subspace(report.subspace, record("subspace.json"));

  report.bootstrap =
      subspace::bootstrap_eigenvalues(grads, config.bootstrap_replicates, config.seed, config.interval);
  write_bootstrap(report.bootstrap, record("bootstrap.csv"));

  const Matrix active = train.inputs * full.eigenvectors.leftCols(2);
  surface::write_sufficient_summary(active.leftCols(1), train.outputs, record("ssp_1d.csv"));
  surface::write_sufficient_summary(active, train.outputs, record("ssp_2d.csv"));

  surface::ErrorMatrixOptions opts;
  opts.dims = config.dims;
  opts.degrees = config.degrees;
  opts.repetitions = config.repetitions;
  opts.split = config.split;
  opts.seed = config.seed;
  opts.k_neighbors = config.k_neighbors;
  std::optional<Matrix> exact;
  if (config.exact_gradients) exact = oracle_gradients(spec, normalized.inputs);
  report.errors = surface::error_matrix(eval.samples, opts, exact);
  surface::write_error_matrix(report.errors, record("error_matrix.csv"), record("error_matrix_long.csv"));

  // Ratio of consecutive eigenvalues; infinite where the next one is zero.
  Vector gaps(full.eigenvalues.size() - 1);
  for (Eigen::Index i = 0; i < gaps.size(); ++i) {
    gaps(i) = full.eigenvalues(i + 1) > 0.0 ? full.eigenvalues(i) / full.eigenvalues(i + 1)
                                             : std::numeric_limits<double>::infinity();
  }

  {
    std::ofstream r(record("report.txt"));
    r << "samples requested: " << config.sample_count << '\n';
    r << "samples evaluated: " << report.evaluated << '\n';
    r << "failed rows: " << report.failures.size() << '\n';
    r << "training rows: " << train_idx.size() << '\n';
    r << "gradients: " << (config.exact_gradients ? "exact" : "local linear, k = " + std::to_string(config.k_neighbors))
      << " (" << grads.size() << " rows, " << grads.excluded.size() << " excluded)\n";
    for (const auto& w : grads.warnings) r << "warning: " << w << '\n';
    r << "eigenvalues: " << vec_str(full.eigenvalues) << '\n';
    r << "eigenvalue ratios lambda_i/lambda_(i+1): " << vec_str(gaps) << '\n';
    r << "suggested active dimension: " << report.suggested_dim << '\n';
    r << "first eigenvector: " << vec_str(full.eigenvectors.col(0)) << '\n';
    r << "bootstrap replicates: " << config.bootstrap_replicates << '\n';
    r << "error matrix (rows = dims, cols = degrees):\n";
    for (Eigen::Index i = 0; i < report.errors.values.rows(); ++i) {
      r << "  " << report.errors.dims[static_cast<std::size_t>(i)] << ":";
      for (Eigen::Index j = 0; j < report.errors.values.cols(); ++j) r << ' ' << csv::format_double(report.errors.values(i, j));
      r << '\n';
    }
    if (config.report_timing) r << "seconds per evaluation: " << csv::format_double(eval.seconds_per_row) << '\n';
  }

  {
    json s;
    s["seed"] = config.seed;
    s["samples_requested"] = config.sample_count;
    s["samples_evaluated"] = report.evaluated;
    s["failed_rows"] = report.failures.size();
    s["train_rows"] = train_idx.size();
    s["test_rows"] = test_idx.size();
    s["eigenvalues"] = std::vector<double>(full.eigenvalues.data(), full.eigenvalues.data() + full.eigenvalues.size());
    json jg = json::array();
    for (Eigen::Index i = 0; i < gaps.size(); ++i) jg.push_back(std::isfinite(gaps(i)) ? json(gaps(i)) : json(nullptr));
    s["eigenvalue_ratios"] = jg;
    s["suggested_dim"] = report.suggested_dim;
    json em = json::array();
    for (Eigen::Index i = 0; i < report.errors.values.rows(); ++i) {
      std::vector<double> row;
      for (Eigen::Index j = 0; j < report.errors.values.cols(); ++j) row.push_back(report.errors.values(i, j));
      em.push_back(row);
    }
    s["error_matrix"] = {{"dims", report.errors.dims}, {"degrees", report.errors.degrees}, {"values", em}};
    if (config.report_timing) s["seconds_per_evaluation"] = eval.seconds_per_row;
    std::ofstream f(record("summary.json"));
    f << s.dump(2) << '\n';
  }
  return report;
}

}  // namespace hullas::pipeline
