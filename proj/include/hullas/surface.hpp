#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hullas/subspace.hpp"
#include "hullas/types.hpp"

namespace hullas::surface {

using Exponent = std::vector<int>;

/// Exponent tuples of total degree <= d in graded-lexicographic order:
/// by total degree, then lexicographically descending within a degree.
std::vector<Exponent> graded_exponents(int dims, int degree);

/// Global multivariate polynomial g(x) = sum_k c_k x^alpha_k.
struct PolySurface {
  int active_dim = 0;
  int degree = 0;
  std::vector<Exponent> exponents;
  Vector coefficients;
  std::vector<std::string> warnings;
};

/// Monomial design matrix, one row per input row.
Matrix design_matrix(const Matrix& inputs, const std::vector<Exponent>& exponents);

/// Least squares via complete orthogonal decomposition (minimum-norm when
/// there are fewer rows than monomials).
PolySurface fit(const Matrix& active_inputs, const Vector& outputs, int degree);

double predict(const PolySurface& surface, const Vector& x);
Vector predict_rows(const PolySurface& surface, const Matrix& inputs);

/// RMSE over the test set divided by the range of the test outputs.
double relative_rmse(const PolySurface& surface, const Matrix& test_active, const Vector& test_outputs);

struct ErrorMatrix {
  std::vector<int> dims;
  std::vector<int> degrees;
  Matrix values;          // dims x degrees, mean over repetitions
  int repetitions = 0;
};

struct ErrorMatrixOptions {
  std::vector<int> dims{1, 2, 3};
  std::vector<int> degrees{1, 2, 3, 4};
  int repetitions = 20;
  double split = 0.8;
  std::uint64_t seed = 0;
  int k_neighbors = 14;
};

/**
 * For each repetition: reshuffle the train/test split, re-estimate gradients
 * and the active subspace on the training rows, then fit and score every
 * (dimension, degree) cell on the test rows. Samples are normalized to
 * [-1, 1]^m first. When `exact_gradients` is given (rows aligned with the
 * samples, normalized coordinates) it replaces the local linear estimate.
 */
ErrorMatrix error_matrix(const subspace::SampleSet& samples, const ErrorMatrixOptions& options,
                         const std::optional<Matrix>& exact_gradients = std::nullopt);

/// Wide CSV (rows = dims, columns = degrees) and long form (dim,degree,error).
void write_error_matrix(const ErrorMatrix& em, const std::filesystem::path& wide,
                        const std::filesystem::path& long_form);

/// Sufficient-summary data: active coordinates of each row followed by f.
void write_sufficient_summary(const Matrix& active, const Vector& outputs, const std::filesystem::path& path);

void write_surface(const PolySurface& surface, const std::filesystem::path& path);

}  // namespace hullas::surface
