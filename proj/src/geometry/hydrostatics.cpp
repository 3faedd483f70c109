#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "hullas/error.hpp"
#include "hullas/geometry.hpp"

namespace hullas::geometry {

void FlowConstants::validate() const {
  if (!(rho > 0.0) || !(g > 0.0) || !(nu > 0.0) || !(lref > 0.0)) {
    throw ValidationError("flow constants rho, g, nu and lref must all be strictly positive");
  }
}

double signed_volume(const TriMesh& mesh) {
  if (!mesh.is_closed()) {
    throw ValidationError("signed_volume requires a closed mesh");
  }
  const auto& v = mesh.vertices();
  std::vector<double> terms;
  terms.reserve(mesh.triangle_count());
  for (const auto& t : mesh.triangles()) {
    terms.push_back(v[t[0]].dot(v[t[1]].cross(v[t[2]])) / 6.0);
  }
  return pairwise_sum(terms);
}

double surface_area(const TriMesh& mesh) {
  std::vector<double> terms;
  terms.reserve(mesh.triangle_count());
  for (std::size_t i = 0; i < mesh.triangle_count(); ++i) terms.push_back(mesh.area_vector(i).norm());
  return pairwise_sum(terms);
}

Vec3 pressure_force(const TriMesh& mesh, const PressureField& pressure) {
  const std::size_t n = mesh.triangle_count();
  std::vector<double> fx(n), fy(n), fz(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = pressure(mesh.centroid(i));
    if (!std::isfinite(p)) {
      throw ValidationError("non-finite pressure at triangle " + std::to_string(i));
    }
    // The outward area vector points into the fluid; the body is pushed the other way.
    const Vec3 f = -p * mesh.area_vector(i);
    fx[i] = f.x();
    fy[i] = f.y();
    fz[i] = f.z();
  }
  return {pairwise_sum(fx), pairwise_sum(fy), pairwise_sum(fz)};
}

double pressure_resistance(const TriMesh& mesh, const PressureField& pressure) {
  return pressure_force(mesh, pressure).x();
}

// ---------------------------------------------------------------------------
// Plane clipping

namespace {

struct Clipper {
  const TriMesh& mesh;
  double level;
  std::vector<Vec3> vertices;
  std::vector<std::int64_t> kept_index;  // original vertex -> output index, -1 if above
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> cut_index;

  Clipper(const TriMesh& m, double z) : mesh(m), level(z), kept_index(m.vertex_count(), -1) {}

  double height(std::uint32_t i) const { return mesh.vertices()[i].z() - level; }

  std::uint32_t keep(std::uint32_t i) {
    if (kept_index[i] < 0) {
      kept_index[i] = static_cast<std::int64_t>(vertices.size());
      vertices.push_back(mesh.vertices()[i]);
    }
    return static_cast<std::uint32_t>(kept_index[i]);
  }

  std::uint32_t cut(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);  // both triangles sharing the edge get the same point
    auto [it, inserted] = cut_index.try_emplace({a, b}, static_cast<std::uint32_t>(vertices.size()));
    if (inserted) {
      const Vec3& pa = mesh.vertices()[a];
      const Vec3& pb = mesh.vertices()[b];
      const double ha = height(a);
      const double hb = height(b);
      Vec3 p = pa + (ha / (ha - hb)) * (pb - pa);
      p.z() = level;
      vertices.push_back(p);
    }
    return it->second;
  }
};

}  // namespace

ClipResult clip_below_plane_detailed(const TriMesh& mesh, double z) {
  Clipper clip(mesh, z);
  std::vector<Triangle> triangles;
  triangles.reserve(mesh.triangle_count());

  for (const auto& t : mesh.triangles()) {
    std::array<std::uint32_t, 4> poly{};
    int count = 0;
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t a = t[k];
      const std::uint32_t b = t[(k + 1) % 3];
      const double ha = clip.height(a);
      const double hb = clip.height(b);
      if (ha <= 0.0) poly[count++] = clip.keep(a);
      if ((ha < 0.0 && hb > 0.0) || (ha > 0.0 && hb < 0.0)) poly[count++] = clip.cut(a, b);
    }
    for (int k = 1; k + 1 < count; ++k) triangles.push_back({poly[0], poly[k], poly[k + 1]});
  }
  const std::size_t hull_count = triangles.size();

  // Unpaired directed edges bound the waterplane; close each boundary
  // component with a fan around its centroid.
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> balance;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t a = t[k];
      const std::uint32_t b = t[(k + 1) % 3];
      if (a < b) {
        ++balance[{a, b}];
      } else {
        --balance[{b, a}];
      }
    }
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> open_edges;  // as seen by the hull
  for (const auto& [edge, net] : balance) {
    for (int i = 0; i < std::abs(net); ++i) {
      open_edges.push_back(net > 0 ? edge : std::make_pair(edge.second, edge.first));
    }
  }

  if (!open_edges.empty()) {
    std::vector<std::uint32_t> parent(clip.vertices.size());
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& [a, b] : open_edges) parent[find(a)] = find(b);

    std::map<std::uint32_t, std::pair<Vec3, int>> groups;  // root -> centroid accumulator
    std::map<std::uint32_t, bool> seen;
    for (const auto& [a, b] : open_edges) {
      for (auto v : {a, b}) {
        if (seen.emplace(v, true).second) {
          auto& g = groups.try_emplace(find(v), Vec3::Zero(), 0).first->second;
          g.first += clip.vertices[v];
          ++g.second;
        }
      }
    }
    std::map<std::uint32_t, std::uint32_t> centre;
    for (auto& [root, acc] : groups) {
      Vec3 c = acc.first / acc.second;
      c.z() = z;
      centre[root] = static_cast<std::uint32_t>(clip.vertices.size());
      clip.vertices.push_back(c);
    }
    for (const auto& [a, b] : open_edges) {
      triangles.push_back({centre[find(a)], b, a});
    }
  }

  // Drop vertices that only belonged to discarded geometry.
  std::vector<std::int64_t> remap(clip.vertices.size(), -1);
  std::vector<Vec3> used;
  used.reserve(clip.vertices.size());
  for (auto& t : triangles) {
    for (auto& idx : t) {
      if (remap[idx] < 0) {
        remap[idx] = static_cast<std::int64_t>(used.size());
        used.push_back(clip.vertices[idx]);
      }
      idx = static_cast<std::uint32_t>(remap[idx]);
    }
  }
  return {TriMesh(std::move(used), std::move(triangles)), hull_count};
}

TriMesh clip_below_plane(const TriMesh& mesh, double z) {
  return clip_below_plane_detailed(mesh, z).mesh;
}

// ---------------------------------------------------------------------------
// Hydrostatic equilibrium

namespace {

double submerged_volume_at(const TriMesh& mesh, double shift) {
  const ClipResult clipped = clip_below_plane_detailed(mesh, -shift);
  if (clipped.mesh.empty()) return 0.0;
  return signed_volume(clipped.mesh);
}

}  // namespace

HydroState hydrostatic_equilibrium(const TriMesh& mesh, double weight, const FlowConstants& constants) {
  constexpr double kRelTol = 1e-8;
  constexpr int kMaxIterations = 200;

  constants.validate();
  if (!mesh.is_closed()) throw ValidationError("hydrostatic_equilibrium requires a closed mesh");
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw ValidationError("hull weight must be positive and finite");
  }

  const auto [lo, hi] = mesh.bounds();
  const double target = weight / constants.rho;
  // Translating by -hi.z submerges the whole hull; by -lo.z it just touches the surface.
  double deep = -hi.z();
  double shallow = -lo.z();
  const double v_max = submerged_volume_at(mesh, deep);
  if (target > v_max * (1.0 + kRelTol)) {
    throw InfeasibleError("weight " + std::to_string(weight) + " kg exceeds the maximum displacement " +
                          std::to_string(constants.rho * v_max) + " kg");
  }

  double shift = deep;
  double volume = v_max;
  int iterations = 0;
  if (std::abs(v_max - target) > kRelTol * target) {
    if (submerged_volume_at(mesh, shallow) > target) {
      throw NumericalError("hydrostatic bisection interval does not bracket the target volume");
    }
    for (; iterations < kMaxIterations; ++iterations) {
      shift = 0.5 * (deep + shallow);
      volume = submerged_volume_at(mesh, shift);
      if (std::abs(volume - target) <= kRelTol * target) break;
      if (volume > target) {
        deep = shift;
      } else {
        shallow = shift;
      }
    }
    if (std::abs(volume - target) > kRelTol * target) {
      throw ConvergenceError("hydrostatic bisection did not converge", std::abs(volume - target) / target);
    }
  }

  const TriMesh placed = mesh.translated(Vec3(0.0, 0.0, shift));
  const ClipResult wet = clip_below_plane_detailed(placed, 0.0);
  std::vector<double> areas;
  areas.reserve(wet.hull_triangles);
  for (std::size_t i = 0; i < wet.hull_triangles; ++i) areas.push_back(wet.mesh.area_vector(i).norm());

  HydroState state;
  state.sinkage = shift;
  state.submerged_volume = volume;
  state.wetted_area = pairwise_sum(areas);
  state.buoyancy_force = pressure_force(wet.mesh, [&](const Vec3& x) { return -constants.rho * constants.g * x.z(); });
  state.iterations = iterations;
  return state;
}

// ---------------------------------------------------------------------------
// Correlations

double reynolds(double speed, const FlowConstants& constants) {
  constants.validate();
  return speed * constants.lref / constants.nu;
}

double ittc57_cf(double speed, const FlowConstants& constants) {
  constants.validate();
  if (!(speed > 0.0)) throw DomainError("ITTC-57 friction requires a positive speed");
  const double re = reynolds(speed, constants);
  const double denom = std::log10(re) - 2.0;
  if (!(denom > 0.0)) {
    throw DomainError("ITTC-57 friction undefined for Re = " + std::to_string(re) + " (needs Re > 100)");
  }
  return 0.075 / (denom * denom);
}

double viscous_drag(double speed, double wetted_area, const FlowConstants& constants) {
  return 0.5 * constants.rho * ittc57_cf(speed, constants) * wetted_area * speed * speed;
}

double froude(double speed, const FlowConstants& constants) {
  constants.validate();
  if (speed < 0.0) throw ValidationError("Froude number requires a non-negative speed");
  return speed / std::sqrt(constants.g * constants.lref);
}

}  // namespace hullas::geometry
