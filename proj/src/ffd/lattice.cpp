#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "hullas/error.hpp"
#include "hullas/ffd.hpp"

namespace hullas::ffd {

namespace {

constexpr int kMaxDegree = 20;

double int_pow(double base, int exp) {
  double r = 1.0;
  for (int k = 0; k < exp; ++k) r *= base;
  return r;
}

}  // namespace

double binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) throw ValidationError("binomial: need 0 <= k <= n");
  if (n > kMaxDegree) throw ValidationError("binomial: degree above 20 is not supported");
  k = std::min(k, n - k);
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;  // stays integral at every step
  return c;
}

double bernstein(int i, int n, double t) {
  if (i < 0 || n < 0 || i > n) {
    throw ValidationError("bernstein: index " + std::to_string(i) + " outside [0, " + std::to_string(n) + "]");
  }
  return binomial(n, i) * int_pow(t, i) * int_pow(1.0 - t, n - i);
}

Mat3 axis_angle_rotation(const Vec3& axis, double angle_deg) {
  const double len = axis.norm();
  if (!(len > 0.0)) throw ValidationError("rotation axis must be non-zero");
  const double angle = angle_deg * std::numbers::pi / 180.0;
  return Eigen::AngleAxisd(angle, axis / len).toRotationMatrix();
}

FfdLattice::FfdLattice(const Vec3& origin, const Mat3& rotation, const Vec3& edge_lengths,
                       const std::array<int, 3>& degrees)
    : origin_(origin), rotation_(rotation), lengths_(edge_lengths), degrees_(degrees) {
  if (!origin.allFinite() || !rotation.allFinite() || !edge_lengths.allFinite()) {
    throw ValidationError("lattice geometry must be finite");
  }
  if ((rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-12 ||
      std::abs(rotation.determinant() - 1.0) > 1e-12) {
    throw ValidationError("lattice rotation must be a proper orthogonal matrix");
  }
  if (!(edge_lengths.array() > 0.0).all()) throw ValidationError("lattice edge lengths must be positive");
  for (int d : degrees) {
    if (d < 1 || d > kMaxDegree) throw ValidationError("lattice degrees must lie in [1, 20]");
  }
  displacements_.assign(std::size_t(degrees[0] + 1) * (degrees[1] + 1) * (degrees[2] + 1), Vec3::Zero());
}

std::size_t FfdLattice::flat_index(int l, int m, int n) const {
  if (l < 0 || l > degrees_[0] || m < 0 || m > degrees_[1] || n < 0 || n > degrees_[2]) {
    throw ValidationError("control point (" + std::to_string(l) + "," + std::to_string(m) + "," +
                          std::to_string(n) + ") outside the lattice");
  }
  return (std::size_t(l) * (degrees_[1] + 1) + m) * (degrees_[2] + 1) + n;
}

Vec3& FfdLattice::displacement(int l, int m, int n) { return displacements_[flat_index(l, m, n)]; }

const Vec3& FfdLattice::displacement(int l, int m, int n) const {
  return displacements_[flat_index(l, m, n)];
}

bool FfdLattice::is_identity() const {
  for (const auto& d : displacements_) {
    if (!d.isZero(0.0)) return false;
  }
  return true;
}

Vec3 FfdLattice::reference_control_point(int l, int m, int n) const {
  flat_index(l, m, n);
  return {double(l) / degrees_[0], double(m) / degrees_[1], double(n) / degrees_[2]};
}

Vec3 FfdLattice::to_reference(const Vec3& x) const {
  return (rotation_.transpose() * (x - origin_)).cwiseQuotient(lengths_);
}

Vec3 FfdLattice::from_reference(const Vec3& y) const {
  return origin_ + rotation_ * y.cwiseProduct(lengths_);
}

bool FfdLattice::inside_reference_box(const Vec3& y) {
  return (y.array() >= 0.0).all() && (y.array() <= 1.0).all();
}

namespace {

/// Bernstein values b_0..b_n at t.
std::vector<double> basis_row(int n, double t) {
  std::vector<double> row(n + 1);
  for (int i = 0; i <= n; ++i) row[i] = bernstein(i, n, t);
  return row;
}

}  // namespace

Vec3 deform_point(const FfdLattice& lattice, const Vec3& x) {
  const Vec3 y = lattice.to_reference(x);
  if (!FfdLattice::inside_reference_box(y)) return x;

  const auto& deg = lattice.degrees();
  const auto bx = basis_row(deg[0], y.x());
  const auto by = basis_row(deg[1], y.y());
  const auto bz = basis_row(deg[2], y.z());

  // By linear precision sum b_lmn P_lmn = Y, so only the displacement part
  // needs summing; an undisplaced lattice leaves X bit-for-bit unchanged.
  Vec3 shift = Vec3::Zero();
  for (int l = 0; l <= deg[0]; ++l) {
    for (int m = 0; m <= deg[1]; ++m) {
      const double wlm = bx[l] * by[m];
      for (int n = 0; n <= deg[2]; ++n) {
        const Vec3& d = lattice.displacement(l, m, n);
        if (!d.isZero(0.0)) shift += (wlm * bz[n]) * d;
      }
    }
  }
  if (shift.isZero(0.0)) return x;
  return x + lattice.rotation() * shift.cwiseProduct(lattice.edge_lengths());
}

geometry::TriMesh deform_mesh(const FfdLattice& lattice, const geometry::TriMesh& mesh) {
  std::vector<Vec3> moved;
  moved.reserve(mesh.vertex_count());
  for (const auto& v : mesh.vertices()) moved.push_back(deform_point(lattice, v));
  return mesh.with_vertices(std::move(moved));
}

double basis_weight(const FfdLattice& lattice, const Vec3& x, int l, int m, int n) {
  const Vec3 y = lattice.to_reference(x);
  if (!FfdLattice::inside_reference_box(y)) return 0.0;
  const auto& deg = lattice.degrees();
  return bernstein(l, deg[0], y.x()) * bernstein(m, deg[1], y.y()) * bernstein(n, deg[2], y.z());
}

}  // namespace hullas::ffd
