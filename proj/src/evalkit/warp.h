#pragma once

#include <cstdint>
#include <vector>

#include "core/grid.h"
#include "geometry/geometry.h"

namespace dualray {

// World point seen through pixel (u, v) at the given depth. Depth is the
// Euclidean distance along the unit ray through the pixel center.
Vec3 unproject_pixel(const Intrinsics& k, const Mat4& cam_to_world, int u, int v, double depth);

// Continuous pixel position (px, py) of a world point plus its Euclidean
// distance from the camera center. False when the point is behind the camera.
bool project_point(const Intrinsics& k, const Mat4& cam_to_world, const Vec3& world, double& px,
                   double& py, double& dist);

struct WarpResult {
    Grid4f rgb;            // (T, H, W, 3)
    Grid4<uint8_t> mask;   // (T, H, W, 1), 1 where a splat landed
    Grid4f depth;          // (T, H, W, 1) splatted distance, +inf where empty
};

// Forward-splats every source pixel with finite depth into the destination
// camera: nearest destination pixel, closest distance wins. Source pixels
// with nonpositive finite depth are an error; +inf marks sky and is skipped.
WarpResult depth_warp(const Grid4f& src_rgb, const Grid4f& src_depth, const Trajectory& src_cam,
                      const Trajectory& dst_cam);

// Interpolation weights for an n-frame warm-start: the pose holds at the
// source for the first min(2, n-1) frames, then moves linearly to s=1.
std::vector<double> warmup_schedule(int n);

struct WarmupResult {
    Grid4f rgb;
    Grid4<uint8_t> mask;
    std::vector<Mat4> poses;  // the interpolated poses, length n
};

// n frames morphing the first input frame toward the target's first pose:
// frame k is depth_warp of (src_rgb0, src_depth0) to interpolate_pose(input,
// target, s_k) with intrinsics lerped alongside.
WarmupResult warmup_frames(const Mat4& input_pose, const Intrinsics& input_k,
                           const Mat4& target_first_pose, const Intrinsics& target_k, int n,
                           const Grid4f& src_rgb0, const Grid4f& src_depth0);

}  // namespace dualray
