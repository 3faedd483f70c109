#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <Eigen/Cholesky>

#include "hullas/error.hpp"
#include "hullas/rigidbody.hpp"

namespace hullas::rigidbody {

Quaternion Quaternion::from_axis_angle(const Vec3& axis, double angle_rad) {
  const double len = axis.norm();
  if (!(len > 0.0)) throw ValidationError("rotation axis must be non-zero");
  return {std::cos(0.5 * angle_rad), std::sin(0.5 * angle_rad) * axis / len};
}

double Quaternion::norm() const { return std::sqrt(s * s + v.squaredNorm()); }

Quaternion Quaternion::normalized() const {
  const double n = norm();
  if (!(n > 0.0)) throw ValidationError("cannot normalize a zero quaternion");
  return {s / n, v / n};
}

Quaternion quat_mul(const Quaternion& q1, const Quaternion& q2) {
  return {q1.s * q2.s - q1.v.dot(q2.v), q1.s * q2.v + q2.s * q1.v + q1.v.cross(q2.v)};
}

Mat3 quat_to_rotation(const Quaternion& q_in) {
  const double n = q_in.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("quat_to_rotation: zero or non-finite quaternion");
  const Quaternion q = std::abs(n - 1.0) > 1e-6 ? q_in.normalized() : q_in;
  const double s = q.s;
  const double x = q.v.x();
  const double y = q.v.y();
  const double z = q.v.z();
  Mat3 r;
  r << 1 - 2 * y * y - 2 * z * z, 2 * x * y - 2 * s * z, 2 * x * z + 2 * s * y,
       2 * x * y + 2 * s * z, 1 - 2 * x * x - 2 * z * z, 2 * y * z - 2 * s * x,
       2 * x * z - 2 * s * y, 2 * y * z + 2 * s * x, 1 - 2 * x * x - 2 * y * y;
  return r;
}

Mat3 skew(const Vec3& w) {
  Mat3 m;
  m << 0, -w.z(), w.y(),
       w.z(), 0, -w.x(),
       -w.y(), w.x(), 0;
  return m;
}

void BodyProps::validate() const {
  if (!(mass > 0.0)) throw ValidationError("body mass must be positive");
  if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, inertia.cwiseAbs().maxCoeff())) {
    throw ValidationError("inertia tensor must be symmetric");
  }
  Eigen::LLT<Mat3> llt(inertia);
  if (llt.info() != Eigen::Success) throw ValidationError("inertia tensor must be positive definite");
}

ForceFn zero_load() {
  return [](double, const RigidState&) { return Vec3::Zero().eval(); };
}

Mat3 world_inertia(const RigidState& state, const BodyProps& props) {
  const Mat3 r = quat_to_rotation(state.orientation.normalized());
  return r * props.inertia * r.transpose();
}

double kinetic_energy(const RigidState& state, const BodyProps& props) {
  return 0.5 * props.mass * state.velocity.squaredNorm() +
         0.5 * state.omega.dot(world_inertia(state, props) * state.omega);
}

Vec3 angular_momentum(const RigidState& state, const BodyProps& props) {
  return world_inertia(state, props) * state.omega;
}

namespace {

struct Derivative {
  Vec3 velocity;
  Vec3 acceleration;
  Quaternion orientation_rate;
  Vec3 angular_acceleration;
};

Derivative evaluate(const RigidState& x, const BodyProps& props, const ForceFn& force,
                    const ForceFn& moment, double t) {
  Derivative d;
  d.velocity = x.velocity;
  d.acceleration = props.gravity + force(t, x) / props.mass;
  d.orientation_rate = quat_mul(Quaternion{0.0, x.omega}, x.orientation) * 0.5;

  const Mat3 j = world_inertia(x, props);
  const Vec3 rhs = moment(t, x) - x.omega.cross(j * x.omega);
  Eigen::LLT<Mat3> llt(j);
  if (llt.info() != Eigen::Success) throw NumericalError("world-frame inertia became singular");
  d.angular_acceleration = llt.solve(rhs);
  return d;
}

RigidState advance(const RigidState& x, const Derivative& d, double h) {
  RigidState y;
  y.position = x.position + h * d.velocity;
  y.velocity = x.velocity + h * d.acceleration;
  y.orientation = x.orientation + d.orientation_rate * h;
  y.omega = x.omega + h * d.angular_acceleration;
  return y;
}

}  // namespace

RigidState step(const RigidState& state, const BodyProps& props, const ForceFn& force,
                const ForceFn& moment, double t, double dt, StepDiagnostics* diagnostics) {
  if (!(dt > 0.0)) throw ValidationError("time step must be positive");
  if (std::abs(state.orientation.norm() - 1.0) > 1e-9) {
    throw ValidationError("rigid-body orientation must be a unit quaternion");
  }

  const Derivative k1 = evaluate(state, props, force, moment, t);
  const Derivative k2 = evaluate(advance(state, k1, 0.5 * dt), props, force, moment, t + 0.5 * dt);
  const Derivative k3 = evaluate(advance(state, k2, 0.5 * dt), props, force, moment, t + 0.5 * dt);
  const Derivative k4 = evaluate(advance(state, k3, dt), props, force, moment, t + dt);

  const double w = dt / 6.0;
  RigidState next;
  next.position = state.position + w * (k1.velocity + 2.0 * k2.velocity + 2.0 * k3.velocity + k4.velocity);
  next.velocity =
      state.velocity + w * (k1.acceleration + 2.0 * k2.acceleration + 2.0 * k3.acceleration + k4.acceleration);
  next.orientation = state.orientation + (k1.orientation_rate + k2.orientation_rate * 2.0 +
                                          k3.orientation_rate * 2.0 + k4.orientation_rate) * w;
  next.omega = state.omega + w * (k1.angular_acceleration + 2.0 * k2.angular_acceleration +
                                  2.0 * k3.angular_acceleration + k4.angular_acceleration);

  if (diagnostics) diagnostics->norm_before_renormalization = next.orientation.norm();
  next.orientation = next.orientation.normalized();
  return next;
}

Mat3 evolve_rotation_matrix(const Mat3& rotation, const Vec3& omega, double dt) {
  return rotation + dt * skew(omega) * rotation;
}

double orthogonality_error(const Mat3& rotation) {
  return (rotation.transpose() * rotation - Mat3::Identity()).norm();
}

std::vector<TrajectorySample> simulate(const RigidState& initial, const BodyProps& props,
                                       const ForceFn& force, const ForceFn& moment, double t0,
                                       double dt, int steps, int stride) {
  if (steps < 0) throw ValidationError("step count must be non-negative");
  if (stride < 1) throw ValidationError("trajectory stride must be at least 1");
  props.validate();
  std::vector<TrajectorySample> out{{t0, initial}};
  RigidState x = initial;
  for (int i = 1; i <= steps; ++i) {
    // t is recomputed from the index so long runs do not accumulate drift.
    x = step(x, props, force, moment, t0 + (i - 1) * dt, dt);
    if (i % stride == 0 || i == steps) out.push_back({t0 + i * dt, x});
  }
  return out;
}

void write_trajectory_csv(const std::vector<TrajectorySample>& samples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write trajectory '" + path.string() + "'");
  out << "t,X,Y,Z,qs,qx,qy,qz,wx,wy,wz\n";
  char buf[64];
  auto put = [&](double v, bool last = false) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << (last ? '\n' : ',');
  };
  for (const auto& s : samples) {
    const auto& x = s.state;
    put(s.t);
    for (int k = 0; k < 3; ++k) put(x.position[k]);
    put(x.orientation.s);
    for (int k = 0; k < 3; ++k) put(x.orientation.v[k]);
    put(x.omega.x());
    put(x.omega.y());
    put(x.omega.z(), true);
  }
}

}  // namespace hullas::rigidbody
