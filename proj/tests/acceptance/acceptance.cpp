// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: hullas_acceptance <path-to-hullas-cli> <work-dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hullas/error.hpp"
#include "hullas/ffd.hpp"
#include "hullas/geometry.hpp"
#include "hullas/extrapolate.hpp"
#include "hullas/rigidbody.hpp"
#include "hullas/subspace.hpp"
#include "hullas/surface.hpp"
#include "oracles.hpp"

using namespace hullas;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Matrix uniform_box(int n, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix x(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) x(i, j) = u(rng);
  return x;
}

Vector ridge_direction(int m) {
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> g(0.0, 1.0);
  Vector a(m);
  for (int j = 0; j < m; ++j) a(j) = g(rng);
  return a.normalized();
}

// f = t^3 + t with t = a.mu
subspace::SampleSet ridge_samples(const Vector& a, int n, std::uint64_t seed) {
  subspace::SampleSet s;
  s.inputs = uniform_box(n, static_cast<int>(a.size()), seed);
  s.box = subspace::unit_box(static_cast<std::size_t>(a.size()));
  s.outputs.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = a.dot(s.inputs.row(i).transpose());
    s.outputs(i) = t * t * t + t;
  }
  return s;
}

Matrix ridge_gradients(const Vector& a, const Matrix& x) {
  Matrix g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double t = a.dot(x.row(i).transpose());
    g.row(i) = ((3.0 * t * t + 1.0) * a).transpose();
  }
  return g;
}

Outcome exact_ridge() {
  const auto t0 = Clock::now();
  const Vector a = ridge_direction(8);
  const auto s = ridge_samples(a, 104, 1);
  const auto as = subspace::eigendecompose(subspace::covariance(ridge_gradients(a, s.inputs)));
  const double ratio = as.eigenvalues(1) / as.eigenvalues(0);
  const double angle = oracle::angle_to_span(a, as.eigenvectors.leftCols(1));
  const double t = seconds_since(t0);
  return {ratio <= 1e-10 && angle <= 1e-4 && t < 1.0,
          fmt("lambda2/lambda1=%.3e (<=1e-10) angle=%.3e rad (<=1e-4) time=%.3fs (<1)", ratio, angle, t)};
}

Outcome estimated_ridge() {
  const auto t0 = Clock::now();
  const Vector a = ridge_direction(8);
  const double max_angle = 5.0 * std::numbers::pi / 180.0;
  int good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = ridge_samples(a, 104, 1000 + seed);
    const auto grads = subspace::local_linear_gradients(s, 14);
    const auto as = subspace::eigendecompose(subspace::covariance(grads));
    const double angle = oracle::angle_to_span(a, as.eigenvectors.leftCols(1));
    good += angle <= max_angle && subspace::suggest_dim(as.eigenvalues) == 1;
  }
  const double t = seconds_since(t0);
  return {good >= 95 && t < 30.0, fmt("%d/100 seeds with angle<=5 deg and M=1 (>=95) time=%.2fs (<30)", good, t)};
}

Outcome two_dimensional() {
  const Matrix q = oracle::random_orthogonal(8, 77);
  const Vector a1 = q.col(0), a2 = q.col(1);
  const Matrix x = uniform_box(104, 8, 2);
  Matrix g(104, 8);
  for (int i = 0; i < 104; ++i) {
    const Vector mu = x.row(i).transpose();
    g.row(i) = (2.0 * a1.dot(mu) * a1 + a2.dot(mu) * a2).transpose();
  }
  const auto as = subspace::eigendecompose(subspace::covariance(g));
  const double ratio = as.eigenvalues(2) / as.eigenvalues(1);
  const double angle = oracle::largest_principal_angle(as.eigenvectors.leftCols(2), q.leftCols(2));
  const bool positive = as.eigenvalues(0) > 0.0 && as.eigenvalues(1) > 0.0;
  return {positive && ratio <= 1e-10 && angle <= 1e-4,
          fmt("lambda1=%.4g lambda2=%.4g lambda3/lambda2=%.3e (<=1e-10) span angle=%.3e rad (<=1e-4)",
              as.eigenvalues(0), as.eigenvalues(1), ratio, angle)};
}

Outcome surface_exactness() {
  const Matrix q = oracle::random_orthogonal(8, 5);
  const Vector a1 = q.col(0), a2 = q.col(1);
  // Total degree 4 in (u, v); includes mixed and top-degree terms.
  auto p = [](double u, double v) {
    return 1.0 + 0.5 * u - v + 0.8 * u * u + 0.3 * u * v - 0.6 * v * v + 0.2 * u * u * u - 0.4 * u * v * v +
           0.9 * u * u * u * u - 0.7 * u * u * v * v + 0.5 * u * v * v * v + 0.3 * v * v * v * v;
  };
  auto dp = [](double u, double v) {
    return std::pair{0.5 + 1.6 * u + 0.3 * v + 0.6 * u * u - 0.4 * v * v + 3.6 * u * u * u - 1.4 * u * v * v +
                         0.5 * v * v * v,
                     -1.0 + 0.3 * u - 1.2 * v - 0.8 * u * v - 1.4 * u * u * v + 1.5 * u * v * v + 1.2 * v * v * v};
  };
  subspace::SampleSet s;
  s.inputs = uniform_box(200, 8, 3);
  s.box = subspace::unit_box(8);
  s.outputs.resize(200);
  Matrix g(200, 8);
  for (int i = 0; i < 200; ++i) {
    const Vector mu = s.inputs.row(i).transpose();
    const double u = a1.dot(mu), v = a2.dot(mu);
    s.outputs(i) = p(u, v);
    const auto [du, dv] = dp(u, v);
    g.row(i) = (du * a1 + dv * a2).transpose();
  }
  surface::ErrorMatrixOptions opt;
  opt.dims = {2};
  opt.degrees = {1, 2, 3, 4};
  opt.repetitions = 5;
  opt.seed = 11;
  const auto em = surface::error_matrix(s, opt, g);
  const double e4 = em.values(0, 3), e1 = em.values(0, 0);
  return {e4 <= 1e-6 && e1 > e4, fmt("err(dim2,deg4)=%.3e (<=1e-6) err(dim2,deg1)=%.3e (>deg4)", e4, e1)};
}

Outcome extrapolation() {
  const auto t0 = Clock::now();
  extrapolate::TimeSeries s;
  for (int i = 0; i <= 3000; ++i) {
    const double t = i * 0.01;
    s.times.push_back(t);
    s.values.push_back(50.0 + 10.0 * std::exp(-0.2 * t) * std::cos(4.0 * t));
  }
  const double v = extrapolate::steady_value(s);
  const double rel = std::abs(v - 50.0) / 50.0;
  const double t = seconds_since(t0);
  return {rel <= 1e-3 && t < 1.0, fmt("steady=%.6f rel err=%.3e (<=1e-3) time=%.3fs (<1)", v, rel, t)};
}

Outcome ffd_precision() {
  const auto sphere = geometry::make_icosphere(0.9, 5, Vec3(0.1, -0.2, 0.3));
  const Mat3 rot = ffd::axis_angle_rotation(Vec3(1.0, 2.0, 0.5), 23.0);
  const Vec3 lengths(3.0, 3.2, 3.1);
  // The rotated box must still hold the sphere: center the lattice on it.
  const Vec3 center(0.1, -0.2, 0.3);
  const Vec3 o = center - rot * (0.5 * lengths);
  ffd::FfdLattice lattice(o, rot, lengths, {3, 4, 2});

  const auto deformed = ffd::deform_mesh(lattice, sphere);
  double identity_err = 0.0;
  // The library and the full triple sum over undisplaced control points must both be the identity.
  const std::vector<Vec3> zero_mu(static_cast<std::size_t>(4 * 5 * 3), Vec3::Zero());
  for (std::size_t i = 0; i < sphere.vertex_count(); ++i) {
    const Vec3& v = sphere.vertices()[i];
    const Vec3 summed = lattice.from_reference(oracle::ffd_triple_sum(lattice.to_reference(v), 3, 4, 2, zero_mu));
    identity_err = std::max({identity_err, (deformed.vertices()[i] - v).norm(), (summed - v).norm()});
  }

  Mat3 A;
  A << 0.10, -0.05, 0.02, 0.03, 0.08, -0.04, -0.02, 0.06, 0.05;
  const Vec3 b(0.01, -0.03, 0.02);
  for (int l = 0; l <= 3; ++l)
    for (int m = 0; m <= 4; ++m)
      for (int n = 0; n <= 2; ++n) lattice.displacement(l, m, n) = A * lattice.reference_control_point(l, m, n) + b;

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double affine_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 y(u(rng), u(rng), u(rng));
    const Vec3 x = lattice.from_reference(y);
    const Vec3 expected = lattice.from_reference(y + A * y + b);
    affine_err = std::max(affine_err, (ffd::deform_point(lattice, x) - expected).norm());
  }
  const bool big = sphere.vertex_count() >= 10000;
  return {big && identity_err <= 1e-12 && affine_err <= 1e-10,
          fmt("vertices=%zu identity err=%.3e (<=1e-12) affine err=%.3e (<=1e-10)", sphere.vertex_count(),
              identity_err, affine_err)};
}

Outcome hydrostatics() {
  const auto sphere = geometry::make_icosphere(1.0, 4);
  const double vol = geometry::signed_volume(sphere);
  const double vol_rel = std::abs(vol - 4.0 * std::numbers::pi / 3.0) / (4.0 * std::numbers::pi / 3.0);

  double edge = 0.0;
  for (const auto& t : sphere.triangles())
    for (int k = 0; k < 3; ++k)
      edge = std::max(edge, (sphere.vertices()[t[k]] - sphere.vertices()[t[(k + 1) % 3]]).norm());

  const geometry::FlowConstants flow;
  const double weight = flow.rho * 2.0 * std::numbers::pi / 3.0;
  const auto eq = geometry::hydrostatic_equilibrium(sphere, weight, flow);
  // The center moves to Z = sinkage; the waterline is Z = 0.
  const double waterline_offset = std::abs(eq.sinkage);

  const auto wet = geometry::clip_below_plane(sphere.translated(Vec3(0, 0, eq.sinkage)), 0.0);
  const Vec3 f = geometry::pressure_force(wet, [&](const Vec3& x) { return -flow.rho * flow.g * x.z(); });
  const double expected = flow.rho * flow.g * eq.submerged_volume;
  const double force_rel = std::abs(f.z() - expected) / expected;
  const bool n_ok = sphere.triangle_count() == 5120;
  return {n_ok && vol_rel <= 5e-3 && waterline_offset <= edge && force_rel <= 1e-3,
          fmt("triangles=%zu volume rel err=%.3e (<=5e-3) waterline offset=%.3e (<=edge %.3e) "
              "force rel err=%.3e (<=1e-3)",
              sphere.triangle_count(), vol_rel, waterline_offset, edge, force_rel)};
}

Outcome rigid_body() {
  rigidbody::BodyProps props;
  props.mass = 3.0;
  props.inertia = Vec3(1.0, 2.0, 3.0).asDiagonal();
  rigidbody::RigidState s;
  s.orientation = rigidbody::Quaternion::from_axis_angle(Vec3(0.3, -0.2, 0.9), 0.7);
  const Mat3 r0 = rigidbody::quat_to_rotation(s.orientation);
  s.omega = r0 * Vec3(0.0, 0.0, 2.0);  // spin about the body's third principal axis
  const double e0 = rigidbody::kinetic_energy(s, props);
  const Vec3 h0 = rigidbody::angular_momentum(s, props);

  const auto zero = rigidbody::zero_load();
  double worst_drift = 0.0, worst_e = 0.0, worst_h = 0.0;
  auto cur = s;
  for (int i = 0; i < 1000; ++i) {
    rigidbody::StepDiagnostics d;
    cur = rigidbody::step(cur, props, zero, zero, i * 1e-3, 1e-3, &d);
    worst_drift = std::max(worst_drift, std::abs(d.norm_before_renormalization - 1.0));
    worst_e = std::max(worst_e, std::abs(rigidbody::kinetic_energy(cur, props) - e0) / e0);
    worst_h = std::max(worst_h, (rigidbody::angular_momentum(cur, props) - h0).norm() / h0.norm());
  }

  auto quat = s;
  Mat3 raw = r0;
  for (int i = 0; i < 10000; ++i) {
    raw = rigidbody::evolve_rotation_matrix(raw, quat.omega, 1e-3);
    quat = rigidbody::step(quat, props, zero, zero, i * 1e-3, 1e-3);
  }
  const double q_err = rigidbody::orthogonality_error(rigidbody::quat_to_rotation(quat.orientation));
  const double r_err = rigidbody::orthogonality_error(raw);
  return {worst_e <= 1e-6 && worst_h <= 1e-6 && worst_drift < 1e-9 && q_err < r_err,
          fmt("energy rel=%.3e momentum rel=%.3e (<=1e-6) norm drift/step=%.3e (<1e-9) "
              "orthogonality quat=%.3e < raw=%.3e",
              worst_e, worst_h, worst_drift, q_err, r_err)};
}

Outcome determinism(const std::string& cli, const fs::path& work) {
  const fs::path a = work / "det_a", b = work / "det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  for (const auto& dir : {a, b}) {
    const std::string cmd = "\"" + cli + "\" study --seed 4242 -o \"" + dir.string() + "\" > \"" +
                            (work / (dir.filename().string() + ".log")).string() + "\" 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, "study command failed: " + cmd};
  }
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    if (entry.path().extension() != ".csv") continue;
    const fs::path other = b / entry.path().filename();
    if (!fs::exists(other)) return {false, "missing in second run: " + entry.path().filename().string()};
    if (oracle::slurp(entry.path()) != oracle::slurp(other))
      return {false, "differs: " + entry.path().filename().string()};
    ++compared;
  }
  return {compared >= 5, fmt("%d CSV artifacts byte-identical across two runs (>=5 expected)", compared)};
}

Outcome bootstrap() {
  const auto t0 = Clock::now();
  const Vector a = ridge_direction(8);
  const auto s = ridge_samples(a, 104, 1000);
  const auto grads = subspace::local_linear_gradients(s, 14);
  const auto bs = subspace::bootstrap_eigenvalues(grads, 1000, 99);
  bool contain = true;
  for (Eigen::Index i = 0; i < 8; ++i)
    contain = contain && bs.lower(i) <= bs.estimate(i) && bs.estimate(i) <= bs.upper(i);
  const bool separated = bs.upper(1) < bs.lower(0);
  const double t = seconds_since(t0);
  return {contain && separated && t < 120.0,
          fmt("all 8 intervals contain estimates=%s lambda1 [%.4g, %.4g] vs lambda2 [%.4g, %.4g] time=%.2fs (<120)",
              contain ? "yes" : "no", bs.lower(0), bs.upper(0), bs.lower(1), bs.upper(1), t)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <hullas-cli> <work-dir>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path work = argv[2];
  fs::create_directories(work);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"exact ridge recovery", exact_ridge},
      {"estimated-gradient ridge recovery", estimated_ridge},
      {"two-dimensional structure", two_dimensional},
      {"response-surface exactness", surface_exactness},
      {"extrapolation accuracy", extrapolation},
      {"FFD identity and affine precision", ffd_precision},
      {"hydrostatics", hydrostatics},
      {"rigid body", rigid_body},
      {"determinism", [&] { return determinism(cli, work); }},
      {"bootstrap sanity", bootstrap},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
