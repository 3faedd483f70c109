#include <cmath>
#include <map>

#include "hullas/error.hpp"
#include "hullas/geometry.hpp"

namespace hullas::geometry {

TriMesh make_box(const Vec3& lo, const Vec3& hi, int divisions) {
  if (divisions < 1) throw ValidationError("make_box needs at least one division per edge");
  if (!((hi - lo).array() > 0.0).all()) throw ValidationError("make_box needs hi > lo on every axis");

  const int n = divisions;
  std::map<std::array<int, 3>, std::uint32_t> index;
  std::vector<Vec3> vertices;
  auto vertex = [&](int i, int j, int k) {
    auto [it, inserted] = index.try_emplace({i, j, k}, static_cast<std::uint32_t>(vertices.size()));
    if (inserted) {
      const Vec3 t(double(i) / n, double(j) / n, double(k) / n);
      vertices.push_back(lo + (hi - lo).cwiseProduct(t));
    }
    return it->second;
  };

  std::vector<Triangle> triangles;
  // Each face: fixed axis, fixed side, and the two in-plane axes ordered so
  // that (u x v) points outward.
  struct Face {
    int axis, side, u, v;
  };
  const Face faces[] = {{0, 0, 2, 1}, {0, 1, 1, 2}, {1, 0, 0, 2},
                        {1, 1, 2, 0}, {2, 0, 1, 0}, {2, 1, 0, 1}};
  for (const auto& f : faces) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        auto corner = [&](int da, int db) {
          std::array<int, 3> c{};
          c[f.axis] = f.side * n;
          c[f.u] = a + da;
          c[f.v] = b + db;
          return vertex(c[0], c[1], c[2]);
        };
        const auto p00 = corner(0, 0);
        const auto p10 = corner(1, 0);
        const auto p11 = corner(1, 1);
        const auto p01 = corner(0, 1);
        triangles.push_back({p00, p10, p11});
        triangles.push_back({p00, p11, p01});
      }
    }
  }
  return TriMesh(std::move(vertices), std::move(triangles));
}

TriMesh make_icosphere(double radius, int subdivisions, const Vec3& center) {
  if (!(radius > 0.0)) throw ValidationError("icosphere radius must be positive");
  if (subdivisions < 0 || subdivisions > 8) throw ValidationError("icosphere subdivisions must be in [0, 8]");

  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> vertices = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : vertices) v.normalize();
  std::vector<Triangle> triangles = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
      {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
      {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto [it, inserted] = midpoint.try_emplace(key, static_cast<std::uint32_t>(vertices.size()));
      if (inserted) vertices.push_back((vertices[a] + vertices[b]).normalized());
      return it->second;
    };
    std::vector<Triangle> refined;
    refined.reserve(triangles.size() * 4);
    for (const auto& t : triangles) {
      const auto ab = mid(t[0], t[1]);
      const auto bc = mid(t[1], t[2]);
      const auto ca = mid(t[2], t[0]);
      refined.push_back({t[0], ab, ca});
      refined.push_back({t[1], bc, ab});
      refined.push_back({t[2], ca, bc});
      refined.push_back({ab, bc, ca});
    }
    triangles = std::move(refined);
  }
  for (auto& v : vertices) v = center + radius * v;
  return TriMesh(std::move(vertices), std::move(triangles));
}

}  // namespace hullas::geometry
