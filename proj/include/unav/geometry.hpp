#pragma once

// Rigid poses, the world-to-camera transform and the pinhole projection.
//
// Frames: the world and the camera share one right-handed convention,
// +u/+x right, +v/+y DOWN, +w/+z forward. The floor is the plane v = 0 and
// the camera center sits kCameraHeight above it (v = -kCameraHeight). A pose
// with the identity rotation is a level camera looking along +w.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "unav/error.hpp"

namespace unav {

inline constexpr double kCameraHeight = 1.5;

struct Vec3 {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.u + b.u, a.v + b.v, a.w + b.w}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.u - b.u, a.v - b.v, a.w - b.w}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.u, s * a.v, s * a.w}; }
  friend constexpr bool operator==(Vec3, Vec3) = default;

  constexpr double dot(Vec3 o) const { return u * o.u + v * o.v + w * o.w; }
  constexpr Vec3 cross(Vec3 o) const {
    return {v * o.w - w * o.v, w * o.u - u * o.w, u * o.v - v * o.u};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  bool finite() const { return std::isfinite(u) && std::isfinite(v) && std::isfinite(w); }
};

/// World "up" direction (v points down).
inline constexpr Vec3 kUp{0.0, -1.0, 0.0};

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Unit quaternion, Hamilton convention, scalar first. Kept canonical with a
/// nonnegative scalar part so that q and -q compare equal component-wise.
class UnitRotation {
 public:
  constexpr UnitRotation() = default;

  /// Normalizes the given components.
  UnitRotation(double s, double x, double y, double z) : s_(s), x_(x), y_(y), z_(z) { normalize(); }

  static UnitRotation from_axis_angle(Vec3 axis, double radians) {
    const double n = axis.norm();
    if (!(n > 0.0)) throw DomainError("rotation axis must be nonzero");
    const double h = 0.5 * radians;
    const double k = std::sin(h) / n;
    return {std::cos(h), axis.u * k, axis.v * k, axis.w * k};
  }

  constexpr double s() const { return s_; }
  constexpr double x() const { return x_; }
  constexpr double y() const { return y_; }
  constexpr double z() const { return z_; }

  constexpr UnitRotation inverse() const {
    UnitRotation r;
    r.s_ = s_;
    r.x_ = -x_;
    r.y_ = -y_;
    r.z_ = -z_;
    return r;
  }

  /// Hamilton product; the result is renormalized.
  friend UnitRotation operator*(const UnitRotation& a, const UnitRotation& b) {
    return {a.s_ * b.s_ - a.x_ * b.x_ - a.y_ * b.y_ - a.z_ * b.z_,
            a.s_ * b.x_ + a.x_ * b.s_ + a.y_ * b.z_ - a.z_ * b.y_,
            a.s_ * b.y_ - a.x_ * b.z_ + a.y_ * b.s_ + a.z_ * b.x_,
            a.s_ * b.z_ + a.x_ * b.y_ - a.y_ * b.x_ + a.z_ * b.s_};
  }

  /// q (0, v) q^-1, i.e. the active rotation of v.
  Vec3 rotate(Vec3 v) const { return sandwich(*this, v, inverse()); }

  /// Rotation angle between two rotations in radians, in [0, pi].
  friend double angle_between(const UnitRotation& a, const UnitRotation& b) {
    const double d = std::abs(a.s_ * b.s_ + a.x_ * b.x_ + a.y_ * b.y_ + a.z_ * b.z_);
    return 2.0 * std::acos(std::min(1.0, d));
  }

  double norm() const { return std::sqrt(s_ * s_ + x_ * x_ + y_ * y_ + z_ * z_); }

  /// Vector part of left (0, v) right, computed with the raw Hamilton product.
  static Vec3 sandwich(const UnitRotation& left, Vec3 v, const UnitRotation& right) {
    // left * (0, v)
    const double ts = -left.x_ * v.u - left.y_ * v.v - left.z_ * v.w;
    const double tx = left.s_ * v.u + left.y_ * v.w - left.z_ * v.v;
    const double ty = left.s_ * v.v - left.x_ * v.w + left.z_ * v.u;
    const double tz = left.s_ * v.w + left.x_ * v.v - left.y_ * v.u;
    // (t) * right
    return {ts * right.x_ + tx * right.s_ + ty * right.z_ - tz * right.y_,
            ts * right.y_ - tx * right.z_ + ty * right.s_ + tz * right.x_,
            ts * right.z_ + tx * right.y_ - ty * right.x_ + tz * right.s_};
  }

 private:
  void normalize() {
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("quaternion must have finite nonzero norm");
    const double k = (s_ < 0.0 ? -1.0 : 1.0) / n;
    s_ *= k;
    x_ *= k;
    y_ *= k;
    z_ *= k;
  }

  double s_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

/// Camera pose. `rotation` maps camera-frame directions to world directions;
/// it is composed as yaw (about world up) times pitch (about the camera x
/// axis), and `pitch_deg` mirrors the pitch factor so it can be clamped.
struct Pose {
  Vec3 position;
  UnitRotation rotation;
  double pitch_deg = 0.0;

  /// Level camera standing on `floor_point`, yawed counter-clockwise
  /// (seen from above) by `yaw_deg` from +w.
  static Pose standing_at(Vec3 floor_point, double yaw_deg) {
    return {floor_point + Vec3{0.0, -kCameraHeight, 0.0},
            UnitRotation::from_axis_angle(kUp, deg_to_rad(yaw_deg)), 0.0};
  }

  Vec3 floor_point() const { return {position.u, position.v + kCameraHeight, position.w}; }
};

struct CameraModel {
  double width = 640.0;
  double height = 480.0;
  double focal = 320.0;

  friend bool operator==(const CameraModel&, const CameraModel&) = default;

  void validate() const {
    if (!(width > 0.0 && height > 0.0 && focal > 0.0))
      throw DomainError("camera width, height and focal length must be positive");
  }
};

struct PixelPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(PixelPoint, PixelPoint) = default;
};

inline double pixel_distance(PixelPoint a, PixelPoint b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct ProjectionResult {
  enum class Kind { InView, OutOfView, Behind };

  Kind kind = Kind::Behind;
  PixelPoint pixel;  // meaningless when Behind
  double depth = 0.0;

  bool in_view() const { return kind == Kind::InView; }
};

/// r^-1 (next - position) r for the pose rotation r.
inline Vec3 to_camera_frame(Vec3 next, const Pose& pose) {
  return UnitRotation::sandwich(pose.rotation.inverse(), next - pose.position, pose.rotation);
}

inline Vec3 to_world_frame(Vec3 camera_point, const Pose& pose) {
  return pose.rotation.rotate(camera_point) + pose.position;
}

inline ProjectionResult project(Vec3 p_cam, const CameraModel& cam) {
  if (!(p_cam.w > 0.0)) return {ProjectionResult::Kind::Behind, {}, p_cam.w};
  const PixelPoint px{cam.width / 2.0 + cam.focal * p_cam.u / p_cam.w,
                      cam.height / 2.0 + cam.focal * p_cam.v / p_cam.w};
  const bool inside = px.x >= 0.0 && px.x <= cam.width && px.y >= 0.0 && px.y <= cam.height;
  return {inside ? ProjectionResult::Kind::InView : ProjectionResult::Kind::OutOfView, px, p_cam.w};
}

inline Vec3 unproject(PixelPoint pixel, double depth, const CameraModel& cam) {
  if (!(depth > 0.0)) throw DomainError("unproject: depth must be positive");
  return {(pixel.x - cam.width / 2.0) * depth / cam.focal, (pixel.y - cam.height / 2.0) * depth / cam.focal,
          depth};
}

enum class ViewAction { TurnLeft, TurnRight, TurnAround, LookDown };

struct ViewConfig {
  double lookdown_step_deg = 30.0;
  double min_pitch_deg = -60.0;
  double max_pitch_deg = 0.0;
};

inline Pose apply_view_action(const Pose& pose, ViewAction action, const ViewConfig& cfg = {}) {
  Pose out = pose;
  switch (action) {
    case ViewAction::TurnLeft:
      out.rotation = UnitRotation::from_axis_angle(kUp, deg_to_rad(90.0)) * pose.rotation;
      break;
    case ViewAction::TurnRight:
      out.rotation = UnitRotation::from_axis_angle(kUp, deg_to_rad(-90.0)) * pose.rotation;
      break;
    case ViewAction::TurnAround:
      out.rotation = UnitRotation::from_axis_angle(kUp, deg_to_rad(180.0)) * pose.rotation;
      break;
    case ViewAction::LookDown: {
      const double target = std::clamp(pose.pitch_deg - cfg.lookdown_step_deg, cfg.min_pitch_deg, cfg.max_pitch_deg);
      const double delta = target - pose.pitch_deg;
      if (delta != 0.0)
        out.rotation = pose.rotation * UnitRotation::from_axis_angle({1.0, 0.0, 0.0}, deg_to_rad(delta));
      out.pitch_deg = target;
      break;
    }
  }
  return out;
}

/// Removes the pitch factor, leaving a level camera with the same yaw.
inline Pose relevel(const Pose& pose) {
  Pose out = pose;
  if (pose.pitch_deg != 0.0)
    out.rotation = pose.rotation * UnitRotation::from_axis_angle({1.0, 0.0, 0.0}, deg_to_rad(-pose.pitch_deg));
  out.pitch_deg = 0.0;
  return out;
}

}  // namespace unav
