#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/grid.h"

namespace dualray {

using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Vec3 = Eigen::Vector3d;

// Pinhole intrinsics, zero skew. cx/cy are in pixels; pixel (u, v) samples
// the ray through (u + 0.5, v + 0.5).
struct Intrinsics {
    double fx = 0, fy = 0, cx = 0, cy = 0;
};

// Camera-to-world pose trajectory with per-frame intrinsics. Axes: +x right,
// +y down, +z forward; the world up direction is -y. ray_override, when
// nonempty, supplies camera-frame unit directions (T, H, W, 3) for
// non-pinhole cameras and takes precedence over the pinhole grid.
struct Trajectory {
    std::vector<Mat4> poses;
    std::vector<Intrinsics> intrinsics;
    Grid4d ray_override;

    int frame_count() const { return int(poses.size()); }
    bool has_override() const { return ray_override.size() > 0; }
};

struct RayGrid {
    int height = 0, width = 0;
    Vec3 origin = Vec3::Zero();
    std::vector<Vec3> dirs;  // row-major, unit length

    const Vec3& dir(int v, int u) const { return dirs[size_t(v) * width + u]; }
};

// Spherical reading of a pose: azimuth and elevation of the optical axis
// plus distance of the camera center from the world origin.
struct GcdPose {
    double azimuth = 0;
    double elevation = 0;
    double radius = 0;
};

struct GcdControl {
    double delta_azimuth = 0;    // wrapped to (-pi, pi]
    double delta_elevation = 0;  // raw difference
    double delta_radius = 0;
};

enum class GcdAnchor { Middle, Last };

Mat4 make_pose(const Mat3& rotation, const Vec3& translation);
Mat4 inverse_pose(const Mat4& pose);

// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

// Camera rotation looking from origin toward target, world up -y. When the
// view direction is parallel to the up axis, +z serves as the fallback up.
Mat3 look_at_rotation(const Vec3& origin, const Vec3& target);

// Camera-frame unit directions through each pixel center.
RayGrid make_ray_grid(const Intrinsics& k, int height, int width);

// World-frame rays for one posed camera; origin is the camera center.
RayGrid make_world_rays(const Intrinsics& k, const Mat4& pose, int height, int width);

// Per-frame ray map (T, H, W, 6): channels 0..2 the unit world ray r,
// channels 3..5 the moment r x o. Moments are clipped to [-1, 1] here, so
// trajectories should be canonicalized and translation-normalized first.
Grid4f pluecker_from_camera(const Trajectory& traj, int height, int width);

// Left-multiplies every pose by anchor^-1 so the anchor becomes identity.
std::vector<Mat4> canonicalize_trajectory(const std::vector<Mat4>& poses, const Mat4& anchor);

// Re-expresses both trajectories relative to the target's first pose, which
// becomes the identity.
void canonicalize_pair(Trajectory& target, Trajectory& input);

// Largest camera-center norm across the given trajectories; 1 when all
// origins coincide with the world origin.
double translation_scale(const std::vector<const std::vector<Mat4>*>& trajectories);

// Divides every translation by the constant, in place.
void normalize_translations(std::vector<Mat4>& poses, double constant);

GcdPose project_pose_to_gcd(const Mat4& pose);
GcdControl gcd_delta(const GcdPose& input, const GcdPose& target);

// Reads the anchor frame of each trajectory and returns target minus input
// in (azimuth, elevation, radius).
GcdControl project_to_gcd(const Trajectory& target, const Trajectory& input, GcdAnchor anchor);

// Rotation slerp plus translation lerp, alpha in [0, 1].
Mat4 interpolate_pose(const Mat4& a, const Mat4& b, double alpha);

}  // namespace dualray
