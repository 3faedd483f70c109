#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include <Eigen/QR>

#include "hullas/error.hpp"
#include "hullas/subspace.hpp"

namespace hullas::subspace {

namespace {

std::vector<std::size_t> nearest(const Matrix& points, const Vector& x, std::size_t k) {
  const auto n = static_cast<std::size_t>(points.rows());
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = (points.row(static_cast<Eigen::Index>(i)).transpose() - x).squaredNorm();
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
  order.resize(k);
  return order;
}

std::size_t distinct_rows(const Matrix& points, const std::vector<std::size_t>& rows) {
  std::set<std::vector<double>> seen;
  for (auto r : rows) {
    const auto row = points.row(static_cast<Eigen::Index>(r));
    std::vector<double> key(static_cast<std::size_t>(row.size()));
    for (Eigen::Index j = 0; j < row.size(); ++j) key[static_cast<std::size_t>(j)] = row(j);
    seen.insert(std::move(key));
  }
  return seen.size();
}

}  // namespace

GradientSet local_linear_gradients(const SampleSet& samples, int k, const std::optional<Matrix>& evaluation_points) {
  const auto n = samples.size();
  const auto m = samples.dimension();
  if (k < 1) throw ValidationError("neighbour count must be positive");
  if (samples.outputs.size() != samples.inputs.rows()) throw ValidationError("inputs/outputs length mismatch");
  if (n < static_cast<std::size_t>(k) + 1) {
    throw ValidationError("local linear gradients need at least k+1 = " + std::to_string(k + 1) +
                          " samples, got " + std::to_string(n));
  }
  if (!samples.outputs.allFinite()) throw ValidationError("sample outputs must be finite");

  const Matrix& eval = evaluation_points ? *evaluation_points : samples.inputs;
  if (static_cast<std::size_t>(eval.cols()) != m) throw ValidationError("evaluation points have the wrong dimension");

  GradientSet out;
  if (static_cast<std::size_t>(k) < m + 1) {
    out.warnings.push_back("k = " + std::to_string(k) + " is below m + 1 = " + std::to_string(m + 1) +
                           "; gradients come from minimum-norm fits");
  }

  std::vector<Vector> rows;
  rows.reserve(static_cast<std::size_t>(eval.rows()));
  for (Eigen::Index e = 0; e < eval.rows(); ++e) {
    const Vector x = eval.row(e).transpose();
    const auto nbrs = nearest(samples.inputs, x, static_cast<std::size_t>(k));
    if (distinct_rows(samples.inputs, nbrs) < m + 1) {
      out.excluded.push_back(static_cast<std::size_t>(e));
      out.warnings.push_back("evaluation point " + std::to_string(e) +
                             " has fewer than m + 1 distinct neighbours; gradient skipped");
      continue;
    }
    // Centre on the evaluation point so the intercept does not couple to g.
    Matrix design(k, static_cast<Eigen::Index>(m) + 1);
    Vector rhs(k);
    for (int r = 0; r < k; ++r) {
      const auto i = static_cast<Eigen::Index>(nbrs[static_cast<std::size_t>(r)]);
      design(r, 0) = 1.0;
      design.row(r).tail(static_cast<Eigen::Index>(m)) = samples.inputs.row(i) - x.transpose();
      rhs(r) = samples.outputs(i);
    }
    const Vector coef = Eigen::CompleteOrthogonalDecomposition<Matrix>(design).solve(rhs);
    rows.push_back(coef.tail(static_cast<Eigen::Index>(m)));
    out.source_indices.push_back(static_cast<std::size_t>(e));
  }

  out.gradients.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
  for (std::size_t r = 0; r < rows.size(); ++r) out.gradients.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return out;
}

GradientSet gradients_from_matrix(Matrix gradients) {
  if (!gradients.allFinite()) throw ValidationError("gradients must be finite");
  GradientSet out;
  out.source_indices.resize(static_cast<std::size_t>(gradients.rows()));
  std::iota(out.source_indices.begin(), out.source_indices.end(), std::size_t{0});
  out.gradients = std::move(gradients);
  return out;
}

Matrix covariance(const Matrix& g) {
  if (g.rows() == 0) throw ValidationError("covariance of an empty gradient set");
  Matrix sigma = (g.transpose() * g) / static_cast<double>(g.rows());
  // Exact symmetry regardless of how the product was blocked.
  return 0.5 * (sigma + sigma.transpose());
}

Matrix covariance(const GradientSet& grads) { return covariance(grads.gradients); }

}  // namespace hullas::subspace
