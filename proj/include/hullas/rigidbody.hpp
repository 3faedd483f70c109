#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "hullas/types.hpp"

namespace hullas::rigidbody {

/// Quaternion [s, v] = s + v_x i + v_y j + v_z k.
struct Quaternion {
  double s = 1.0;
  Vec3 v = Vec3::Zero();

  static Quaternion identity() { return {}; }
  static Quaternion from_axis_angle(const Vec3& axis, double angle_rad);

  double norm() const;
  Quaternion normalized() const;
  Quaternion conjugate() const { return {s, -v}; }
  Quaternion operator-() const { return {-s, -v}; }
  Quaternion operator+(const Quaternion& o) const { return {s + o.s, v + o.v}; }
  Quaternion operator*(double k) const { return {s * k, v * k}; }
};

/// Hamilton product [s1 s2 - v1.v2, s1 v2 + s2 v1 + v1 x v2].
Quaternion quat_mul(const Quaternion& q1, const Quaternion& q2);

/// Rotation matrix of a unit quaternion. Inputs off the unit sphere by more
/// than 1e-6 are renormalized first; the zero quaternion is rejected.
Mat3 quat_to_rotation(const Quaternion& q);

/// skew(w) * u == w x u
Mat3 skew(const Vec3& omega);

struct RigidState {
  Vec3 position = Vec3::Zero();      // centre of gravity, m
  Vec3 velocity = Vec3::Zero();      // m/s
  Quaternion orientation;            // body -> global
  Vec3 omega = Vec3::Zero();         // angular velocity in the global frame, rad/s
};

struct BodyProps {
  double mass = 1.0;                 // kg
  Mat3 inertia = Mat3::Identity();   // body-frame inertia about G, kg m^2
  Vec3 gravity = Vec3::Zero();       // m/s^2

  void validate() const;
};

using ForceFn = std::function<Vec3(double t, const RigidState&)>;

ForceFn zero_load();

/// Global-frame inertia R I R^T.
Mat3 world_inertia(const RigidState& state, const BodyProps& props);
double kinetic_energy(const RigidState& state, const BodyProps& props);
Vec3 angular_momentum(const RigidState& state, const BodyProps& props);

struct StepDiagnostics {
  double norm_before_renormalization = 1.0;
};

/**
 * One classical fourth-order Runge-Kutta step of
 *   m Xdd = m g + F,   J wd + w x J w = M with J = R I R^T,   qd = 0.5 [0,w] q,
 * followed by quaternion renormalization.
 */
RigidState step(const RigidState& state, const BodyProps& props, const ForceFn& force,
                const ForceFn& moment, double t, double dt, StepDiagnostics* diagnostics = nullptr);

/// One explicit Euler step of Rd = skew(w) R without re-orthogonalization.
Mat3 evolve_rotation_matrix(const Mat3& rotation, const Vec3& omega, double dt);

/// ||R^T R - I||_F
double orthogonality_error(const Mat3& rotation);

struct TrajectorySample {
  double t = 0.0;
  RigidState state;
};

/// Integrates `steps` steps from t0, recording every `stride`-th state
/// (the initial and final states are always kept).
std::vector<TrajectorySample> simulate(const RigidState& initial, const BodyProps& props,
                                       const ForceFn& force, const ForceFn& moment, double t0,
                                       double dt, int steps, int stride = 1);

/// CSV columns: t, X, Y, Z, qs, qx, qy, qz, wx, wy, wz.
void write_trajectory_csv(const std::vector<TrajectorySample>& samples,
                          const std::filesystem::path& path);

}  // namespace hullas::rigidbody
