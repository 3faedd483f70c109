#include <cmath>
#include <fstream>
#include <functional>
#include <string>

#include <Eigen/QR>
#include <json.hpp>

#include "hullas/csv.hpp"
#include "hullas/error.hpp"
#include "hullas/surface.hpp"

namespace hullas::surface {

std::vector<Exponent> graded_exponents(int dims, int degree) {
  if (dims < 1) throw ValidationError("polynomial needs at least one variable");
  if (degree < 0) throw ValidationError("polynomial degree must be non-negative");
  std::vector<Exponent> out;
  Exponent e(static_cast<std::size_t>(dims), 0);
  // Within a total degree, emit tuples with larger leading exponents first.
  std::function<void(int, int)> emit = [&](int pos, int remaining) {
    if (pos == dims - 1) {
      e[static_cast<std::size_t>(pos)] = remaining;
      out.push_back(e);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      e[static_cast<std::size_t>(pos)] = k;
      emit(pos + 1, remaining - k);
    }
  };
  for (int total = 0; total <= degree; ++total) emit(0, total);
  return out;
}

Matrix design_matrix(const Matrix& inputs, const std::vector<Exponent>& exponents) {
  Matrix v(inputs.rows(), static_cast<Eigen::Index>(exponents.size()));
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    for (std::size_t k = 0; k < exponents.size(); ++k) {
      double term = 1.0;
      for (Eigen::Index j = 0; j < inputs.cols(); ++j) {
        for (int p = 0; p < exponents[k][static_cast<std::size_t>(j)]; ++p) term *= inputs(i, j);
      }
      v(i, static_cast<Eigen::Index>(k)) = term;
    }
  }
  return v;
}

PolySurface fit(const Matrix& active_inputs, const Vector& outputs, int degree) {
  if (active_inputs.rows() != outputs.size()) throw ValidationError("fit: inputs/outputs length mismatch");
  if (active_inputs.rows() == 0) throw ValidationError("fit: no data");
  if (!active_inputs.allFinite() || !outputs.allFinite()) throw ValidationError("fit: non-finite data");

  PolySurface s;
  s.active_dim = static_cast<int>(active_inputs.cols());
  s.degree = degree;
  s.exponents = graded_exponents(s.active_dim, degree);
  const Matrix v = design_matrix(active_inputs, s.exponents);
  if (v.rows() < v.cols()) {
    s.warnings.push_back("only " + std::to_string(v.rows()) + " samples for " + std::to_string(v.cols()) +
                         " coefficients; using the minimum-norm solution");
  }
  s.coefficients = Eigen::CompleteOrthogonalDecomposition<Matrix>(v).solve(outputs);
  return s;
}

double predict(const PolySurface& surface, const Vector& x) {
  if (x.size() != surface.active_dim) {
    throw ValidationError("predict: expected " + std::to_string(surface.active_dim) + " active variables, got " +
                          std::to_string(x.size()));
  }
  double y = 0.0;
  for (std::size_t k = 0; k < surface.exponents.size(); ++k) {
    double term = surface.coefficients(static_cast<Eigen::Index>(k));
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      for (int p = 0; p < surface.exponents[k][static_cast<std::size_t>(j)]; ++p) term *= x(j);
    }
    y += term;
  }
  return y;
}

Vector predict_rows(const PolySurface& surface, const Matrix& inputs) {
  Vector out(inputs.rows());
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) out(i) = predict(surface, inputs.row(i).transpose());
  return out;
}

double relative_rmse(const PolySurface& surface, const Matrix& test_active, const Vector& test_outputs) {
  if (test_active.rows() != test_outputs.size()) throw ValidationError("relative_rmse: length mismatch");
  if (test_outputs.size() < 2) throw ValidationError("relative_rmse needs at least two test points");
  const double range = test_outputs.maxCoeff() - test_outputs.minCoeff();
  if (!(range > 0.0)) throw ValidationError("relative_rmse: test outputs have zero range");
  const Vector residual = predict_rows(surface, test_active) - test_outputs;
  return std::sqrt(residual.squaredNorm() / static_cast<double>(residual.size())) / range;
}

ErrorMatrix error_matrix(const subspace::SampleSet& samples, const ErrorMatrixOptions& options,
                         const std::optional<Matrix>& exact_gradients) {
  if (options.repetitions < 1) throw ValidationError("error matrix needs at least one repetition");
  if (options.dims.empty() || options.degrees.empty()) throw ValidationError("error matrix needs dims and degrees");
  samples.validate();
  if (!samples.outputs.allFinite()) throw ValidationError("error matrix: every sample needs an output");
  if (exact_gradients && (exact_gradients->rows() != samples.inputs.rows() ||
                          exact_gradients->cols() != samples.inputs.cols())) {
    throw ValidationError("exact gradients must have one row per sample");
  }
  const auto m = static_cast<int>(samples.dimension());
  for (int d : options.dims) {
    if (d < 1 || d >= m) throw ValidationError("error matrix dimension " + std::to_string(d) + " outside [1, m-1]");
  }

  const subspace::SampleSet normalized = subspace::normalize(samples);
  ErrorMatrix em;
  em.dims = options.dims;
  em.degrees = options.degrees;
  em.repetitions = options.repetitions;
  em.values = Matrix::Zero(static_cast<Eigen::Index>(options.dims.size()),
                           static_cast<Eigen::Index>(options.degrees.size()));

  for (int rep = 0; rep < options.repetitions; ++rep) {
    const auto [train_idx, test_idx] =
        subspace::split_indices(samples.size(), options.split, options.seed + static_cast<std::uint64_t>(rep));
    const subspace::SampleSet train = normalized.rows(train_idx);
    const subspace::SampleSet test = normalized.rows(test_idx);

    subspace::GradientSet grads;
    if (exact_gradients) {
      Matrix g(static_cast<Eigen::Index>(train_idx.size()), m);
      for (std::size_t r = 0; r < train_idx.size(); ++r) {
        g.row(static_cast<Eigen::Index>(r)) = exact_gradients->row(static_cast<Eigen::Index>(train_idx[r]));
      }
      grads = subspace::gradients_from_matrix(std::move(g));
    } else {
      grads = subspace::local_linear_gradients(train, options.k_neighbors);
    }
    const auto full = subspace::eigendecompose(subspace::covariance(grads));

    for (std::size_t a = 0; a < options.dims.size(); ++a) {
      const auto as = subspace::partition(full, options.dims[a]);
      const Matrix train_active = subspace::project_rows(as, train.inputs);
      const Matrix test_active = subspace::project_rows(as, test.inputs);
      for (std::size_t b = 0; b < options.degrees.size(); ++b) {
        const auto poly = fit(train_active, train.outputs, options.degrees[b]);
        em.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
            relative_rmse(poly, test_active, test.outputs);
      }
    }
  }
  em.values /= static_cast<double>(options.repetitions);
  return em;
}

void write_error_matrix(const ErrorMatrix& em, const std::filesystem::path& wide,
                        const std::filesystem::path& long_form) {
  csv::Table w;
  w.header.push_back("dim");
  for (int d : em.degrees) w.header.push_back("degree_" + std::to_string(d));
  csv::Table l;
  l.header = {"dim", "degree", "error"};
  for (std::size_t a = 0; a < em.dims.size(); ++a) {
    std::vector<double> row{static_cast<double>(em.dims[a])};
    for (std::size_t b = 0; b < em.degrees.size(); ++b) {
      const double v = em.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      row.push_back(v);
      l.rows.push_back({static_cast<double>(em.dims[a]), static_cast<double>(em.degrees[b]), v});
    }
    w.rows.push_back(std::move(row));
  }
  csv::write(wide, w);
  csv::write(long_form, l);
}

void write_sufficient_summary(const Matrix& active, const Vector& outputs, const std::filesystem::path& path) {
  if (active.rows() != outputs.size()) throw ValidationError("sufficient summary: length mismatch");
  csv::Table t;
  for (Eigen::Index j = 0; j < active.cols(); ++j) t.header.push_back("active_" + std::to_string(j + 1));
  t.header.push_back("f");
  for (Eigen::Index i = 0; i < active.rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index j = 0; j < active.cols(); ++j) row.push_back(active(i, j));
    row.push_back(outputs(i));
    t.rows.push_back(std::move(row));
  }
  csv::write(path, t);
}

void write_surface(const PolySurface& surface, const std::filesystem::path& path) {
  nlohmann::json j;
  j["active_dim"] = surface.active_dim;
  j["degree"] = surface.degree;
  j["exponents"] = surface.exponents;
  j["coefficients"] = std::vector<double>(surface.coefficients.data(),
                                          surface.coefficients.data() + surface.coefficients.size());
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write surface '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

}  // namespace hullas::surface
