#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hullas/types.hpp"

namespace hullas::subspace {

struct Bounds {
  double lower = 0.0;
  double upper = 1.0;
};

/**
 * N input/output pairs over the box D. Outputs may be NaN while designs are
 * still waiting for an oracle evaluation.
 */
struct SampleSet {
  Matrix inputs;                 // N x m
  Vector outputs;                // N
  std::vector<Bounds> box;       // m

  std::size_t size() const { return static_cast<std::size_t>(inputs.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(inputs.cols()); }

  /// Checks shapes, box validity and that every row lies inside the box.
  void validate() const;
  SampleSet rows(const std::vector<std::size_t>& indices) const;
};

/// Box of [-1, 1]^m.
std::vector<Bounds> unit_box(std::size_t m);

/// Affine map of every input coordinate onto [-1, 1]; outputs untouched.
SampleSet normalize(const SampleSet& samples);
SampleSet denormalize(const SampleSet& normalized, const std::vector<Bounds>& box);
Vector normalize_point(const Vector& x, const std::vector<Bounds>& box);
Vector denormalize_point(const Vector& x, const std::vector<Bounds>& box);

struct GradientSet {
  Matrix gradients;                          // rows are gradient estimates
  std::vector<std::size_t> source_indices;   // evaluation point each row belongs to
  std::vector<std::size_t> excluded;         // evaluation points dropped as degenerate
  std::vector<std::string> warnings;

  std::size_t size() const { return static_cast<std::size_t>(gradients.rows()); }
};

/**
 * Gradients from local linear least-squares fits: for each evaluation point
 * the k nearest samples (Euclidean, ties by sample index) are fitted with
 * f ~ c + g^T x and g is kept. Evaluation points default to the samples.
 */
GradientSet local_linear_gradients(const SampleSet& normalized, int k = 14,
                                   const std::optional<Matrix>& evaluation_points = std::nullopt);

/// Wraps precomputed gradients (e.g. analytic) as a GradientSet.
GradientSet gradients_from_matrix(Matrix gradients);

/// Uncentered covariance (1/N) sum g g^T.
Matrix covariance(const GradientSet& grads);
Matrix covariance(const Matrix& gradients);

struct ActiveSubspace {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // columns, orthonormal
  int active_dim = 0;   // 0 until partitioned

  std::size_t dimension() const { return static_cast<std::size_t>(eigenvalues.size()); }
  Matrix w1() const;
  Matrix w2() const;
};

struct EigenOptions {
  double tolerance = 1e-13;  // off-diagonal Frobenius norm relative to ||Sigma||_F
  int max_sweeps = 100;
};

/// Full symmetric eigendecomposition by cyclic Jacobi rotations, eigenvalues
/// descending, tiny negative eigenvalues clipped to 0 and each eigenvector
/// signed so that its largest-magnitude entry is positive.
ActiveSubspace eigendecompose(const Matrix& sigma, const EigenOptions& options = {});

ActiveSubspace partition(const ActiveSubspace& as, int active_dim);

/// M in [1, m-1] maximizing lambda_M / lambda_{M+1}; ties go to the smaller M.
/// Eigenvalues below 1e-12 lambda_1 are treated as zero (an infinite gap).
int suggest_dim(const Vector& eigenvalues);

/// (W1^T mu, W2^T mu)
std::pair<Vector, Vector> project(const ActiveSubspace& as, const Vector& mu);
/// Active coordinates of every row: X W1.
Matrix project_rows(const ActiveSubspace& as, const Matrix& inputs);

enum class IntervalKind { MinMax, Percentile };

struct BootstrapSummary {
  int replicates = 0;
  Vector estimate;            // eigenvalues of the full gradient set
  Vector lower;
  Vector upper;
  Vector subspace_distance;   // mean over replicates, per M = 1..m-1
};

/**
 * Resamples gradient rows with replacement. Replicate r uses its own engine
 * seeded from (seed, r) so results do not depend on evaluation order.
 */
BootstrapSummary bootstrap_eigenvalues(const GradientSet& grads, int replicates = 1000,
                                       std::uint64_t seed = 0,
                                       IntervalKind kind = IntervalKind::MinMax);

/// Spectral norm of the difference of the two M-dimensional projectors,
/// i.e. the sine of the largest principal angle.
double subspace_distance(const Matrix& w1_a, const Matrix& w1_b);

/// Seeded uniform permutation split: the first round(fraction * n) indices train.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n, double fraction,
                                                                            std::uint64_t seed);

// ---- persistence ------------------------------------------------------------

/// Dataset CSV `mu_1,...,mu_m[,f]`; the box lives in `<csv>.meta.json`.
void write_dataset(const SampleSet& samples, const std::filesystem::path& csv,
                   const std::vector<std::string>& names = {});
SampleSet read_dataset(const std::filesystem::path& csv);
std::filesystem::path meta_path(const std::filesystem::path& csv);

void write_subspace(const ActiveSubspace& as, const std::filesystem::path& path);
ActiveSubspace read_subspace(const std::filesystem::path& path);

}  // namespace hullas::subspace
