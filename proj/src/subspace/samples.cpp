#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "hullas/error.hpp"
#include "hullas/subspace.hpp"

namespace hullas::subspace {

void SampleSet::validate() const {
  if (inputs.rows() < 2) throw ValidationError("a sample set needs at least two rows");
  if (outputs.size() != inputs.rows()) {
    throw ValidationError("sample set has " + std::to_string(inputs.rows()) + " inputs but " +
                          std::to_string(outputs.size()) + " outputs");
  }
  if (box.size() != dimension()) {
    throw ValidationError("sample set box has " + std::to_string(box.size()) + " bounds for " +
                          std::to_string(dimension()) + " inputs");
  }
  for (std::size_t j = 0; j < box.size(); ++j) {
    if (!(box[j].lower < box[j].upper)) {
      throw ValidationError("degenerate bounds for input " + std::to_string(j + 1));
    }
  }
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    for (Eigen::Index j = 0; j < inputs.cols(); ++j) {
      const double x = inputs(i, j);
      if (!std::isfinite(x) || x < box[j].lower || x > box[j].upper) {
        throw ValidationError("sample " + std::to_string(i) + " input " + std::to_string(j + 1) +
                              " lies outside its bounds");
      }
    }
  }
}

SampleSet SampleSet::rows(const std::vector<std::size_t>& indices) const {
  SampleSet out;
  out.box = box;
  out.inputs.resize(static_cast<Eigen::Index>(indices.size()), inputs.cols());
  out.outputs.resize(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(indices[r]);
    if (i >= inputs.rows()) throw ValidationError("row index out of range");
    out.inputs.row(static_cast<Eigen::Index>(r)) = inputs.row(i);
    out.outputs(static_cast<Eigen::Index>(r)) = outputs(i);
  }
  return out;
}

std::vector<Bounds> unit_box(std::size_t m) { return std::vector<Bounds>(m, Bounds{-1.0, 1.0}); }

namespace {

void check_box(const std::vector<Bounds>& box) {
  for (std::size_t j = 0; j < box.size(); ++j) {
    if (!(box[j].lower < box[j].upper)) {
      throw ValidationError("degenerate bounds for input " + std::to_string(j + 1));
    }
  }
}

}  // namespace

Vector normalize_point(const Vector& x, const std::vector<Bounds>& box) {
  if (static_cast<std::size_t>(x.size()) != box.size()) throw ValidationError("point/box dimension mismatch");
  check_box(box);
  Vector y(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const auto& b = box[static_cast<std::size_t>(j)];
    y(j) = 2.0 * (x(j) - b.lower) / (b.upper - b.lower) - 1.0;
  }
  return y;
}

Vector denormalize_point(const Vector& y, const std::vector<Bounds>& box) {
  if (static_cast<std::size_t>(y.size()) != box.size()) throw ValidationError("point/box dimension mismatch");
  check_box(box);
  Vector x(y.size());
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    const auto& b = box[static_cast<std::size_t>(j)];
    x(j) = b.lower + 0.5 * (y(j) + 1.0) * (b.upper - b.lower);
  }
  return x;
}

SampleSet normalize(const SampleSet& samples) {
  if (samples.box.size() != samples.dimension()) throw ValidationError("sample set box/dimension mismatch");
  SampleSet out;
  out.inputs.resize(samples.inputs.rows(), samples.inputs.cols());
  for (Eigen::Index i = 0; i < samples.inputs.rows(); ++i) {
    out.inputs.row(i) = normalize_point(samples.inputs.row(i).transpose(), samples.box).transpose();
  }
  out.outputs = samples.outputs;
  out.box = unit_box(samples.dimension());
  return out;
}

SampleSet denormalize(const SampleSet& normalized, const std::vector<Bounds>& box) {
  SampleSet out;
  out.inputs.resize(normalized.inputs.rows(), normalized.inputs.cols());
  for (Eigen::Index i = 0; i < normalized.inputs.rows(); ++i) {
    out.inputs.row(i) = denormalize_point(normalized.inputs.row(i).transpose(), box).transpose();
  }
  out.outputs = normalized.outputs;
  out.box = box;
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n, double fraction,
                                                                            std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("split fraction must lie in (0, 1)");
  const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    throw ValidationError("split of " + std::to_string(n) + " samples leaves an empty train or test set");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  return {train, test};
}

}  // namespace hullas::subspace
