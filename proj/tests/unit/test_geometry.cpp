#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include <doctest.h>

#include "hullas/error.hpp"
#include "hullas/geometry.hpp"
#include "oracles.hpp"

using namespace hullas;
using namespace hullas::geometry;
using std::numbers::pi;

namespace {

TriMesh unit_cube() { return make_box(Vec3::Zero(), Vec3::Ones(), 1); }

std::string binary_stl(const std::vector<std::array<std::array<float, 3>, 3>>& facets) {
  std::string out(80, '\0');
  const auto n = static_cast<std::uint32_t>(facets.size());
  out.append(reinterpret_cast<const char*>(&n), 4);
  for (const auto& f : facets) {
    const float normal[3] = {0, 0, 0};
    out.append(reinterpret_cast<const char*>(normal), 12);
    for (const auto& v : f) out.append(reinterpret_cast<const char*>(v.data()), 12);
    out.append(2, '\0');
  }
  return out;
}

TriMesh parse(const std::string& s) { return parse_stl(std::span<const char>(s.data(), s.size())); }

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("mesh construction validates indices and degenerate triangles") {
  std::vector<Vec3> v{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  CHECK_NOTHROW(TriMesh(v, {{0, 1, 2}}));
  CHECK_THROWS_AS(TriMesh(v, {{0, 1, 3}}), ValidationError);
  CHECK_THROWS_AS(TriMesh(v, {{0, 1, 1}}), ValidationError);
  CHECK_FALSE(TriMesh(v, {{0, 1, 2}}).is_closed());
  CHECK(unit_cube().is_closed());
}

TEST_CASE("binary facets sharing an edge weld to four vertices") {
  const auto m = parse(binary_stl({{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}}, {{{1, 0, 0}, {1, 1, 0}, {0, 1, 0}}}}));
  CHECK(m.vertex_count() == 4);
  CHECK(m.triangle_count() == 2);
}

TEST_CASE("ascii tetrahedron is closed with volume 1/6") {
  const std::string text = R"(solid tet
facet normal 0 0 -1
 outer loop
  vertex 0 0 0
  vertex 0 1 0
  vertex 1 0 0
 endloop
endfacet
facet normal 0 -1 0
 outer loop
  vertex 0 0 0
  vertex 1 0 0
  vertex 0 0 1
 endloop
endfacet
facet normal -1 0 0
 outer loop
  vertex 0 0 0
  vertex 0 0 1
  vertex 0 1 0
 endloop
endfacet
facet normal 1 1 1
 outer loop
  vertex 1 0 0
  vertex 0 1 0
  vertex 0 0 1
 endloop
endfacet
endsolid tet
)";
  const auto m = parse(text);
  CHECK(m.is_closed());
  CHECK(signed_volume(m) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(oracle::tet_volume(m.vertices(), m.triangles()) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("malformed STL input raises parse errors") {
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse(std::string(90, 'x')), ParseError);
  CHECK_THROWS_AS(parse("solid x\nfacet normal 0 0 1\nouter loop\nvertex 0 0\n"), ParseError);
  try {
    parse("");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 0);
  }
}

TEST_CASE("binary and ascii round trips") {
  const auto dir = oracle::scratch("stl");
  const auto cube = unit_cube().transformed(Mat3::Identity(), Vec3(0.1, -0.25, 3.5));
  write_stl(cube, dir / "b.stl", true);
  const auto b = read_stl(dir / "b.stl");
  REQUIRE(b.vertex_count() == cube.vertex_count());
  for (std::size_t i = 0; i < cube.vertex_count(); ++i) {
    CHECK((b.vertices()[i] - cube.vertices()[i].cast<float>().cast<double>()).norm() == 0.0);
  }
  CHECK(b.triangles() == cube.triangles());

  const auto sphere = make_icosphere(1.3, 2);
  write_stl(sphere, dir / "a.stl", false);
  const auto a = read_stl(dir / "a.stl");
  REQUIRE(a.vertex_count() == sphere.vertex_count());
  REQUIRE(a.triangle_count() == sphere.triangle_count());
  // Welding numbers vertices in facet order, so compare facet corners.
  for (std::size_t t = 0; t < a.triangle_count(); ++t) {
    for (int c = 0; c < 3; ++c) {
      const Vec3& p = a.vertices()[a.triangles()[t][c]];
      const Vec3& q = sphere.vertices()[sphere.triangles()[t][c]];
      CHECK((p - q).norm() <= 1e-6 * q.norm());
    }
  }
  CHECK(a.is_closed());

  write_stl(TriMesh{}, dir / "empty.stl", true);
  CHECK(std::filesystem::file_size(dir / "empty.stl") == 84);
  CHECK(read_stl(dir / "empty.stl").empty());
}

TEST_CASE("signed volume of cubes and spheres") {
  CHECK(signed_volume(unit_cube()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(signed_volume(unit_cube().flipped()) == doctest::Approx(-1.0).epsilon(1e-15));
  const auto s = make_icosphere(1.0, 4);
  CHECK(s.triangle_count() == 5120);
  CHECK(std::abs(signed_volume(s) - 4.0 * pi / 3.0) / (4.0 * pi / 3.0) < 5e-3);
  CHECK_THROWS_AS(signed_volume(TriMesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 2}})), ValidationError);
}

TEST_CASE("signed volume is invariant under rigid motions") {
  const auto s = make_icosphere(0.7, 3, Vec3(0.2, 0.1, -0.4));
  const double v0 = signed_volume(s);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Mat3 q = oracle::random_orthogonal(3, seed);
    if (q.determinant() < 0) q.col(0) *= -1.0;
    const auto moved = s.transformed(q, Vec3(3.0 * seed, -2.0, 1.5));
    CHECK(std::abs(signed_volume(moved) - v0) <= 1e-12 * std::abs(v0));
  }
}

TEST_CASE("clipping below a plane") {
  const auto half = clip_below_plane(unit_cube(), 0.5);
  CHECK(half.is_closed());
  CHECK(signed_volume(half) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(signed_volume(clip_below_plane(unit_cube(), 2.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(clip_below_plane(unit_cube(), -1.0).empty());

  const auto hemi = clip_below_plane(make_icosphere(1.0, 4), 0.0);
  CHECK(hemi.is_closed());
  CHECK(std::abs(signed_volume(hemi) - 2.0 * pi / 3.0) / (2.0 * pi / 3.0) < 5e-3);
}

TEST_CASE("clipping is watertight and monotone in the plane height") {
  const auto s = make_icosphere(1.0, 3, Vec3(0.0, 0.0, 0.13));
  double prev = -1.0;
  for (double z = -1.2; z <= 1.3; z += 0.0173) {
    const auto c = clip_below_plane(s, z);
    if (!c.empty()) CHECK(c.is_closed());
    const double v = c.empty() ? 0.0 : signed_volume(c);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("pressure force") {
  const auto cube = unit_cube();
  CHECK(pressure_force(cube, [](const Vec3&) { return 5.0; }).norm() <= 1e-12);

  const auto s = make_icosphere(1.0, 3);
  const double area = surface_area(s);
  CHECK(pressure_force(s, [](const Vec3&) { return 7.0; }).norm() <= 1e-10 * 7.0 * area);

  // Submerged box with hydrostatic pressure: Archimedes on exact planes.
  const FlowConstants fc;
  const auto box = make_box(Vec3(-0.5, -0.25, -2.0), Vec3(0.5, 0.25, -1.0), 2);
  const auto f = pressure_force(box, [&](const Vec3& x) { return -fc.rho * fc.g * x.z(); });
  const double expected = fc.rho * fc.g * 0.5;
  CHECK(std::abs(f.z() - expected) <= 1e-10 * expected);
  CHECK(std::abs(f.x()) <= 1e-10 * expected);
  CHECK(std::abs(f.y()) <= 1e-10 * expected);

  // Single triangle, unit pressure, outward normal +z: the push on the body is -A n.
  const TriMesh tri({Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(0, 3, 0)}, {{0, 1, 2}});
  const Vec3 one = pressure_force(tri, [](const Vec3&) { return 1.0; });
  CHECK((one - Vec3(0, 0, -3.0)).norm() <= 1e-15);

  CHECK_THROWS_AS(pressure_force(cube, [](const Vec3&) { return std::nan(""); }), ValidationError);
}

TEST_CASE("hydrostatic equilibrium") {
  const FlowConstants fc;
  SUBCASE("half-density cube floats at mid-height") {
    const auto h = hydrostatic_equilibrium(unit_cube(), 0.5 * fc.rho, fc);
    CHECK(std::abs(fc.rho * h.submerged_volume - 0.5 * fc.rho) <= 1e-8 * 0.5 * fc.rho);
    CHECK(h.sinkage == doctest::Approx(-0.5).epsilon(1e-7));
    // Wetted area excludes the waterplane: bottom plus four half sides.
    CHECK(h.wetted_area == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(h.buoyancy_force.z() == doctest::Approx(0.5 * fc.rho * fc.g).epsilon(1e-7));
  }
  SUBCASE("full displacement submerges to the deck") {
    const auto h = hydrostatic_equilibrium(unit_cube(), fc.rho, fc);
    CHECK(h.sinkage == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(h.submerged_volume == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("sphere at half displacement floats at its centre") {
    const auto s = make_icosphere(1.0, 4);
    const double w = fc.rho * 2.0 * pi / 3.0;
    const auto h = hydrostatic_equilibrium(s, w, fc);
    const auto& v = s.vertices();
    const auto& t0 = s.triangles()[0];
    const double edge = (v[t0[0]] - v[t0[1]]).norm();
    CHECK(std::abs(h.sinkage) <= edge);
    CHECK(std::abs(fc.rho * h.submerged_volume - w) <= 1e-8 * w);
  }
  SUBCASE("infeasible and invalid weights") {
    CHECK_THROWS_AS(hydrostatic_equilibrium(unit_cube(), 1.01 * fc.rho, fc), InfeasibleError);
    CHECK_THROWS_AS(hydrostatic_equilibrium(unit_cube(), -1.0, fc), ValidationError);
  }
  SUBCASE("residual property over random weights") {
    const auto s = make_icosphere(0.8, 3, Vec3(1.0, 2.0, 0.3));
    const double vt = signed_volume(s);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    for (int i = 0; i < 10; ++i) {
      const double w = u(rng) * fc.rho * vt;
      const auto h = hydrostatic_equilibrium(s, w, fc);
      CHECK(std::abs(fc.rho * h.submerged_volume - w) / w <= 1e-8);
    }
  }
}

TEST_CASE("ITTC-57 friction and Froude number") {
  FlowConstants fc;
  fc.lref = 1.0;
  fc.nu = 1e-6;
  CHECK(reynolds(1.0, fc) == doctest::Approx(1e6));
  CHECK(ittc57_cf(1.0, fc) == doctest::Approx(0.075 / 16.0).epsilon(1e-12));
  CHECK(ittc57_cf(10.0, fc) == doctest::Approx(3.0e-3).epsilon(1e-12));
  CHECK_THROWS_AS(ittc57_cf(0.0, fc), DomainError);
  CHECK_THROWS_AS(ittc57_cf(1e-5, fc), DomainError);

  const FlowConstants d;
  CHECK(froude(0.0, d) == 0.0);
  CHECK(froude(std::sqrt(d.g * d.lref), d) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(froude(2.097, d) == doctest::Approx(0.28).epsilon(1e-3));
  CHECK(viscous_drag(2.0, 3.0, d) ==
        doctest::Approx(0.5 * d.rho * ittc57_cf(2.0, d) * 3.0 * 4.0).epsilon(1e-15));
}

TEST_CASE("pairwise summation") {
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

}  // TEST_SUITE
