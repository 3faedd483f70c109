#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "hullas/geometry.hpp"
#include "hullas/types.hpp"

namespace hullas::ffd {

/// b_i^n(t) = C(n,i) t^i (1-t)^(n-i). Degrees above 20 are rejected.
double bernstein(int i, int n, double t);

/// Exact binomial coefficient by multiplicative recurrence (n <= 20).
double binomial(int n, int k);

/**
 * Trivariate Bernstein lattice over a rotated box.
 *
 * The box is `origin + rotation * diag(edge_lengths) * [0,1]^3`. Control point
 * (l,m,n) sits at (l/L, m/M, n/N) in reference coordinates and is moved by a
 * displacement expressed in the same dimensionless reference units, i.e. as
 * fractions of the corresponding edge length.
 */
class FfdLattice {
 public:
  FfdLattice(const Vec3& origin, const Mat3& rotation, const Vec3& edge_lengths,
             const std::array<int, 3>& degrees);

  const Vec3& origin() const noexcept { return origin_; }
  const Mat3& rotation() const noexcept { return rotation_; }
  const Vec3& edge_lengths() const noexcept { return lengths_; }
  const std::array<int, 3>& degrees() const noexcept { return degrees_; }
  std::size_t control_point_count() const noexcept { return displacements_.size(); }

  Vec3& displacement(int l, int m, int n);
  const Vec3& displacement(int l, int m, int n) const;
  const std::vector<Vec3>& displacements() const noexcept { return displacements_; }
  bool is_identity() const;

  /// Undisplaced control point position in reference coordinates.
  Vec3 reference_control_point(int l, int m, int n) const;

  /// psi: physical -> reference, Y = diag(1/L) R^T (X - origin).
  Vec3 to_reference(const Vec3& x) const;
  /// psi^-1: reference -> physical.
  Vec3 from_reference(const Vec3& y) const;
  /// Closed unit box test in reference coordinates.
  static bool inside_reference_box(const Vec3& y);

 private:
  std::size_t flat_index(int l, int m, int n) const;

  Vec3 origin_;
  Mat3 rotation_;
  Vec3 lengths_;
  std::array<int, 3> degrees_;
  std::vector<Vec3> displacements_;
};

/// Lattice rotated by `angle_deg` about `axis` (right-hand rule).
Mat3 axis_angle_rotation(const Vec3& axis, double angle_deg);

/// T(X) = psi^-1(T_hat(psi(X))) for X inside the box (boundary included);
/// points outside the box are returned unchanged.
Vec3 deform_point(const FfdLattice& lattice, const Vec3& x);

/// Vertex-wise deformation, connectivity untouched.
geometry::TriMesh deform_mesh(const FfdLattice& lattice, const geometry::TriMesh& mesh);

/// b_lmn(psi(X)): derivative of the reference-space image of X with respect to
/// any component of the displacement of control point (l,m,n). Zero outside the box.
double basis_weight(const FfdLattice& lattice, const Vec3& x, int l, int m, int n);

// ---- hull design-space binding -------------------------------------------

/// One design parameter bound to one axis of one control point.
struct ParameterBinding {
  std::string name;
  std::array<int, 3> point{};  // (l, m, n)
  int axis = 0;                // 0 = x, 1 = y, 2 = z
  double lower = 0.0;
  double upper = 0.0;
};

/**
 * A lattice box plus the control-point bindings of the geometric parameters.
 * With `mirror_axis` set, every bound point has a twin reflected across the
 * middle of that lattice axis; the twin receives the negated displacement
 * along the mirror axis and the same displacement along the others.
 */
struct LatticeProfile {
  Vec3 origin = Vec3::Zero();
  Vec3 rotation_axis = Vec3::UnitZ();
  double rotation_angle_deg = 0.0;
  Vec3 lengths = Vec3::Ones();
  std::array<int, 3> degrees{2, 2, 2};
  int mirror_axis = 1;  // -1 disables mirroring
  std::vector<ParameterBinding> parameters;

  void validate() const;
  FfdLattice make_lattice() const;
};

/// Six geometric parameter values in binding order.
struct GeoParams {
  std::vector<double> values;
};

/// Table-1 style profile: six parameters on four side-wall points of a
/// 2x2x2-degree lattice, mu_1..mu_4 on y, mu_5..mu_6 on z of points 3 and 4.
/// The box is placed so that it spans [lo, hi].
LatticeProfile default_hull_profile(const Vec3& lo, const Vec3& hi);

/// Lattice with the parameter values applied (mirrored as the profile says).
/// Throws ValidationError naming the first parameter outside its bounds.
FfdLattice hull_lattice(const GeoParams& params, const LatticeProfile& profile);

LatticeProfile load_profile(const std::filesystem::path& path);
void save_profile(const LatticeProfile& profile, const std::filesystem::path& path);
LatticeProfile profile_from_json_text(const std::string& text);
std::string profile_to_json_text(const LatticeProfile& profile);

}  // namespace hullas::ffd
