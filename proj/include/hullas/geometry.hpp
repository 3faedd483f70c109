#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "hullas/types.hpp"

namespace hullas::geometry {

using Triangle = std::array<std::uint32_t, 3>;

/**
 * Indexed triangle surface mesh.
 *
 * Triangles are counter-clockwise when seen from outside, so the right-hand
 * normal points outward. Construction validates indices and rejects
 * degenerate (repeated-index) triangles. Closedness is a topological property
 * evaluated once at construction: every undirected edge is used by exactly two
 * triangles that traverse it in opposite directions.
 */
class TriMesh {
 public:
  TriMesh() = default;
  TriMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

  const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t triangle_count() const noexcept { return triangles_.size(); }
  bool is_closed() const noexcept { return closed_; }
  bool empty() const noexcept { return triangles_.empty(); }

  /// Same connectivity (and closedness) with a new vertex array of equal size.
  TriMesh with_vertices(std::vector<Vec3> vertices) const;

  TriMesh translated(const Vec3& offset) const;
  TriMesh transformed(const Mat3& rotation, const Vec3& offset) const;
  /// Reverses every triangle, turning outward normals inward.
  TriMesh flipped() const;

  /// Axis-aligned bounds; both zero for an empty mesh.
  std::pair<Vec3, Vec3> bounds() const;

  Vec3 area_vector(std::size_t triangle) const;  // (v1-v0)x(v2-v0)/2
  Vec3 centroid(std::size_t triangle) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  bool closed_ = false;
};

/// True when every edge is shared by exactly two oppositely oriented triangles.
bool is_watertight(std::span<const Triangle> triangles);

/// Water and gravity properties plus the reference length used for Re and Fr.
struct FlowConstants {
  double rho = 998.0;       // kg/m^3
  double g = 9.81;          // m/s^2
  double nu = 1.09e-6;      // m^2/s
  double lref = 5.72;       // m

  void validate() const;
};

struct HydroState {
  double sinkage = 0.0;           // vertical translation applied to the mesh, m
  double submerged_volume = 0.0;  // m^3
  double wetted_area = 0.0;       // m^2, hull skin only
  Vec3 buoyancy_force = Vec3::Zero();
  int iterations = 0;
};

/// Clipped mesh together with the number of leading triangles that came from
/// the original surface; the remaining ones form the waterplane cap.
struct ClipResult {
  TriMesh mesh;
  std::size_t hull_triangles = 0;
};

using PressureField = std::function<double(const Vec3&)>;

// ---- STL ------------------------------------------------------------------

/// Reads ASCII or binary STL, welding vertices at exact coordinate equality.
TriMesh read_stl(const std::filesystem::path& path);
TriMesh parse_stl(std::span<const char> bytes);

void write_stl(const TriMesh& mesh, const std::filesystem::path& path, bool binary = true);

// ---- integrals ------------------------------------------------------------

/// Divergence-theorem volume. Throws ValidationError for an open mesh.
double signed_volume(const TriMesh& mesh);
double surface_area(const TriMesh& mesh);

/// Force exerted by the pressure field on the body: the pressure acts along
/// the fluid-side normal (opposite to the outward triangle normal), sampled
/// at triangle centroids. Under p = -rho*g*Z this yields the Archimedes lift.
Vec3 pressure_force(const TriMesh& mesh, const PressureField& pressure);

/// X component of pressure_force.
double pressure_resistance(const TriMesh& mesh, const PressureField& pressure);

// ---- clipping and hydrostatics -------------------------------------------

/// Closed mesh of the region Z <= z, waterplane cap included.
TriMesh clip_below_plane(const TriMesh& mesh, double z);
ClipResult clip_below_plane_detailed(const TriMesh& mesh, double z);

/// Vertical-only equilibrium: finds the translation s so that the volume
/// below Z = 0 of the translated mesh displaces `weight` kilograms.
HydroState hydrostatic_equilibrium(const TriMesh& mesh, double weight,
                                   const FlowConstants& constants = {});

// ---- resistance correlations ---------------------------------------------

double reynolds(double speed, const FlowConstants& constants);
/// ITTC-57 friction line, 0.075 / (log10(Re) - 2)^2.
double ittc57_cf(double speed, const FlowConstants& constants);
/// 0.5 * rho * C_F * S * V^2
double viscous_drag(double speed, double wetted_area, const FlowConstants& constants);
double froude(double speed, const FlowConstants& constants);

// ---- primitives -------------------------------------------------------------

/// Axis-aligned box with `divisions` quads per edge on every face.
TriMesh make_box(const Vec3& lo, const Vec3& hi, int divisions = 1);
/// Geodesic sphere: icosahedron refined `subdivisions` times (20 * 4^n faces).
TriMesh make_icosphere(double radius, int subdivisions, const Vec3& center = Vec3::Zero());

/// Fixed-order pairwise summation; used by every mesh integral so results do
/// not depend on how a reduction is split.
double pairwise_sum(std::span<const double> values);

}  // namespace hullas::geometry
