#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hullas/error.hpp"
#include "hullas/subspace.hpp"

namespace hullas::subspace {

namespace {

std::mt19937_64 replicate_engine(std::uint64_t seed, int replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate)};
  return std::mt19937_64(seq);
}

/// Linear-interpolated percentile of sorted data, p in [0, 100].
double percentile(const std::vector<double>& sorted, double p) {
  const double pos = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

BootstrapSummary bootstrap_eigenvalues(const GradientSet& grads, int replicates, std::uint64_t seed,
                                       IntervalKind kind) {
  const Eigen::Index n = grads.gradients.rows();
  const Eigen::Index m = grads.gradients.cols();
  if (n < 2) throw ValidationError("bootstrap needs at least two gradient rows");
  if (replicates < 1) throw ValidationError("bootstrap needs at least one replicate");

  const ActiveSubspace point = eigendecompose(covariance(grads.gradients));

  BootstrapSummary out;
  out.replicates = replicates;
  out.estimate = point.eigenvalues;
  out.subspace_distance = Vector::Zero(std::max<Eigen::Index>(m - 1, 0));

  std::vector<std::vector<double>> samples(static_cast<std::size_t>(m));
  Matrix resampled(n, m);
  for (int r = 0; r < replicates; ++r) {
    auto rng = replicate_engine(seed, r);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    for (Eigen::Index i = 0; i < n; ++i) resampled.row(i) = grads.gradients.row(pick(rng));
    const ActiveSubspace rep = eigendecompose(covariance(resampled));
    for (Eigen::Index j = 0; j < m; ++j) samples[static_cast<std::size_t>(j)].push_back(rep.eigenvalues(j));
    for (Eigen::Index d = 1; d < m; ++d) {
      out.subspace_distance(d - 1) +=
          subspace_distance(rep.eigenvectors.leftCols(d), point.eigenvectors.leftCols(d));
    }
  }
  out.subspace_distance /= static_cast<double>(replicates);

  out.lower.resize(m);
  out.upper.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    auto& s = samples[static_cast<std::size_t>(j)];
    std::sort(s.begin(), s.end());
    if (kind == IntervalKind::MinMax) {
      out.lower(j) = s.front();
      out.upper(j) = s.back();
    } else {
      out.lower(j) = percentile(s, 2.5);
      out.upper(j) = percentile(s, 97.5);
    }
  }
  return out;
}

}  // namespace hullas::subspace
