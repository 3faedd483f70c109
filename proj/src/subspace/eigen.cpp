#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "hullas/error.hpp"
#include "hullas/subspace.hpp"

namespace hullas::subspace {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

/// Rotates rows/columns p and q of the symmetric matrix a to zero a(p,q) and
/// accumulates the rotation into v.
void jacobi_rotate(Matrix& a, Matrix& v, Eigen::Index p, Eigen::Index q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

ActiveSubspace eigendecompose(const Matrix& sigma_in, const EigenOptions& options) {
  if (sigma_in.rows() != sigma_in.cols() || sigma_in.rows() == 0) {
    throw ValidationError("eigendecompose needs a non-empty square matrix");
  }
  if (!sigma_in.allFinite()) throw ValidationError("eigendecompose: matrix has non-finite entries");

  if ((sigma_in - sigma_in.transpose()).norm() > 1e-10 * std::max(1.0, sigma_in.norm())) {
    throw ValidationError("eigendecompose: matrix is not symmetric");
  }
  const Eigen::Index n = sigma_in.rows();
  Matrix a = 0.5 * (sigma_in + sigma_in.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double scale = a.norm();

  int sweep = 0;
  for (; sweep < options.max_sweeps; ++sweep) {
    if (off_diagonal_norm(a) <= options.tolerance * scale) break;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) jacobi_rotate(a, v, p, q);
    }
  }
  if (off_diagonal_norm(a) > options.tolerance * scale) {
    throw ConvergenceError("Jacobi eigensolver did not converge", off_diagonal_norm(a) / scale);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) > a(j, j); });

  ActiveSubspace out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  const double clip = 1e-12 * std::max(1.0, scale);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto src = order[static_cast<std::size_t>(c)];
    double lambda = a(src, src);
    if (lambda < 0.0 && lambda >= -clip) lambda = 0.0;
    out.eigenvalues(c) = lambda;

    Vector w = v.col(src);
    Eigen::Index big = 0;
    for (Eigen::Index k = 1; k < n; ++k) {
      if (std::abs(w(k)) > std::abs(w(big))) big = k;
    }
    if (w(big) < 0.0) w = -w;
    out.eigenvectors.col(c) = w;
  }
  return out;
}

Matrix ActiveSubspace::w1() const {
  if (active_dim < 1) throw ValidationError("active subspace is not partitioned");
  return eigenvectors.leftCols(active_dim);
}

Matrix ActiveSubspace::w2() const {
  if (active_dim < 1) throw ValidationError("active subspace is not partitioned");
  return eigenvectors.rightCols(eigenvectors.cols() - active_dim);
}

ActiveSubspace partition(const ActiveSubspace& as, int active_dim) {
  const auto m = static_cast<int>(as.dimension());
  if (active_dim < 1 || active_dim >= m) {
    throw ValidationError("active dimension " + std::to_string(active_dim) + " must lie in [1, " +
                          std::to_string(m - 1) + "]");
  }
  ActiveSubspace out = as;
  out.active_dim = active_dim;
  return out;
}

int suggest_dim(const Vector& eigenvalues) {
  const Eigen::Index m = eigenvalues.size();
  if (m < 2) throw ValidationError("suggest_dim needs at least two eigenvalues");
  Vector lam = eigenvalues.cwiseMax(0.0);
  const double top = lam.maxCoeff();
  if (top <= 0.0) throw NumericalError("all eigenvalues are zero; no active subspace to suggest");
  // Round-off below this floor is not a direction; it counts as an exact zero.
  for (Eigen::Index i = 0; i < m; ++i) {
    if (lam(i) <= 1e-12 * top) lam(i) = 0.0;
  }

  int best = 1;
  double best_ratio = -1.0;
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    double ratio = 0.0;
    if (lam(i + 1) > 0.0) {
      ratio = lam(i) / lam(i + 1);
    } else if (lam(i) > 0.0) {
      ratio = std::numeric_limits<double>::infinity();
    }
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = static_cast<int>(i) + 1;
    }
  }
  return best;
}

std::pair<Vector, Vector> project(const ActiveSubspace& as, const Vector& mu) {
  if (static_cast<std::size_t>(mu.size()) != as.dimension()) {
    throw ValidationError("project: point has dimension " + std::to_string(mu.size()) + ", subspace " +
                          std::to_string(as.dimension()));
  }
  return {as.w1().transpose() * mu, as.w2().transpose() * mu};
}

Matrix project_rows(const ActiveSubspace& as, const Matrix& inputs) {
  if (static_cast<std::size_t>(inputs.cols()) != as.dimension()) {
    throw ValidationError("project_rows: input dimension mismatch");
  }
  return inputs * as.w1();
}

double subspace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ValidationError("subspace_distance: shape mismatch");
  const Matrix diff = a * a.transpose() - b * b.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace hullas::subspace
