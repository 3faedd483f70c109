#include <algorithm>
#include <map>
#include <string>
#include <utility>

#include "hullas/error.hpp"
#include "hullas/geometry.hpp"

namespace hullas::geometry {

namespace {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

}  // namespace

bool is_watertight(std::span<const Triangle> triangles) {
  if (triangles.empty()) return false;
  std::map<Edge, int> directed;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      ++directed[{t[k], t[(k + 1) % 3]}];
    }
  }
  for (const auto& [edge, count] : directed) {
    if (count != 1) return false;
    auto reverse = directed.find({edge.second, edge.first});
    if (reverse == directed.end() || reverse->second != 1) return false;
  }
  return true;
}

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const auto n = vertices_.size();
  for (std::size_t i = 0; i < triangles_.size(); ++i) {
    const auto& t = triangles_[i];
    for (auto idx : t) {
      if (idx >= n) {
        throw ValidationError("triangle " + std::to_string(i) + " references vertex " +
                              std::to_string(idx) + " but the mesh has " +
                              std::to_string(n) + " vertices");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw ValidationError("triangle " + std::to_string(i) + " is degenerate (repeated vertex index)");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!vertices_[i].allFinite()) {
      throw ValidationError("vertex " + std::to_string(i) + " has non-finite coordinates");
    }
  }
  closed_ = is_watertight(triangles_);
}

TriMesh TriMesh::with_vertices(std::vector<Vec3> vertices) const {
  if (vertices.size() != vertices_.size()) {
    throw ValidationError("with_vertices: expected " + std::to_string(vertices_.size()) +
                          " vertices, got " + std::to_string(vertices.size()));
  }
  TriMesh out;
  out.vertices_ = std::move(vertices);
  out.triangles_ = triangles_;
  out.closed_ = closed_;
  return out;
}

TriMesh TriMesh::translated(const Vec3& offset) const {
  auto moved = vertices_;
  for (auto& v : moved) v += offset;
  return with_vertices(std::move(moved));
}

TriMesh TriMesh::transformed(const Mat3& rotation, const Vec3& offset) const {
  auto moved = vertices_;
  for (auto& v : moved) v = rotation * v + offset;
  return with_vertices(std::move(moved));
}

TriMesh TriMesh::flipped() const {
  TriMesh out = *this;
  for (auto& t : out.triangles_) std::swap(t[1], t[2]);
  return out;
}

std::pair<Vec3, Vec3> TriMesh::bounds() const {
  if (vertices_.empty()) return {Vec3::Zero(), Vec3::Zero()};
  Vec3 lo = vertices_.front();
  Vec3 hi = vertices_.front();
  for (const auto& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return {lo, hi};
}

Vec3 TriMesh::area_vector(std::size_t triangle) const {
  const auto& t = triangles_[triangle];
  const Vec3& a = vertices_[t[0]];
  return 0.5 * (vertices_[t[1]] - a).cross(vertices_[t[2]] - a);
}

Vec3 TriMesh::centroid(std::size_t triangle) const {
  const auto& t = triangles_[triangle];
  return (vertices_[t[0]] + vertices_[t[1]] + vertices_[t[2]]) / 3.0;
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 16;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace hullas::geometry
