#include "evalkit/warp.h"

#include <cmath>
#include <limits>

#include "core/error.h"

namespace dualray {

Vec3 unproject_pixel(const Intrinsics& k, const Mat4& cam_to_world, int u, int v, double depth) {
    Vec3 dir((u + 0.5 - k.cx) / k.fx, (v + 0.5 - k.cy) / k.fy, 1.0);
    dir.normalize();
    Mat3 rot = cam_to_world.block<3, 3>(0, 0);
    Vec3 origin = cam_to_world.block<3, 1>(0, 3);
    return origin + rot * dir * depth;
}

bool project_point(const Intrinsics& k, const Mat4& cam_to_world, const Vec3& world, double& px,
                   double& py, double& dist) {
    Mat3 rot = cam_to_world.block<3, 3>(0, 0);
    Vec3 origin = cam_to_world.block<3, 1>(0, 3);
    Vec3 local = rot.transpose() * (world - origin);
    if (local.z() <= 1e-9) return false;
    px = k.fx * local.x() / local.z() + k.cx;
    py = k.fy * local.y() / local.z() + k.cy;
    dist = local.norm();
    return true;
}

WarpResult depth_warp(const Grid4f& src_rgb, const Grid4f& src_depth, const Trajectory& src_cam,
                      const Trajectory& dst_cam) {
    int T = src_rgb.d0, H = src_rgb.d1, W = src_rgb.d2;
    if (src_rgb.d3 != 3) throw DataError("depth_warp: rgb needs 3 channels");
    if (src_depth.d0 != T || src_depth.d1 != H || src_depth.d2 != W || src_depth.d3 != 1)
        throw DataError("depth_warp: depth shape mismatch");
    if (src_cam.frame_count() != T || dst_cam.frame_count() != T)
        throw DataError("depth_warp: trajectory length mismatch");

    const float inf = std::numeric_limits<float>::infinity();
    WarpResult out;
    out.rgb.resize(T, H, W, 3);
    out.mask.resize(T, H, W, 1);
    out.depth.resize(T, H, W, 1);
    std::fill(out.depth.data.begin(), out.depth.data.end(), inf);

    for (int t = 0; t < T; ++t) {
        for (int v = 0; v < H; ++v)
            for (int u = 0; u < W; ++u) {
                float d = src_depth(t, v, u, 0);
                if (std::isinf(d)) continue;  // sky
                if (!(d > 0)) throw DataError("depth_warp: nonpositive depth at a valid pixel");
                Vec3 world =
                    unproject_pixel(src_cam.intrinsics[t], src_cam.poses[t], u, v, double(d));
                double px, py, dist;
                if (!project_point(dst_cam.intrinsics[t], dst_cam.poses[t], world, px, py, dist))
                    continue;
                int du = int(std::floor(px));
                int dv = int(std::floor(py));
                if (du < 0 || du >= W || dv < 0 || dv >= H) continue;
                if (float(dist) < out.depth(t, dv, du, 0)) {
                    out.depth(t, dv, du, 0) = float(dist);
                    out.mask(t, dv, du, 0) = 1;
                    for (int ch = 0; ch < 3; ++ch) out.rgb(t, dv, du, ch) = src_rgb(t, v, u, ch);
                }
            }
    }
    return out;
}

std::vector<double> warmup_schedule(int n) {
    if (n < 1) throw ConfigError("warmup_schedule: need at least one frame");
    std::vector<double> s(n);
    int hold = std::min(2, n - 1);
    for (int k = 0; k < n; ++k)
        s[k] = k < hold ? 0.0 : double(k - hold + 1) / double(n - hold);
    return s;
}

WarmupResult warmup_frames(const Mat4& input_pose, const Intrinsics& input_k,
                           const Mat4& target_first_pose, const Intrinsics& target_k, int n,
                           const Grid4f& src_rgb0, const Grid4f& src_depth0) {
    if (src_rgb0.d0 < 1 || src_depth0.d0 < 1) throw DataError("warmup_frames: empty source");
    std::vector<double> sched = warmup_schedule(n);

    // Single-frame source grids for the per-frame warps.
    Grid4f rgb1(1, src_rgb0.d1, src_rgb0.d2, src_rgb0.d3);
    Grid4f dep1(1, src_depth0.d1, src_depth0.d2, 1);
    std::copy_n(src_rgb0.data.begin(), rgb1.size(), rgb1.data.begin());
    std::copy_n(src_depth0.data.begin(), dep1.size(), dep1.data.begin());

    WarmupResult out;
    out.rgb.resize(n, src_rgb0.d1, src_rgb0.d2, 3);
    out.mask.resize(n, src_rgb0.d1, src_rgb0.d2, 1);
    Trajectory src;
    src.poses = {input_pose};
    src.intrinsics = {input_k};
    for (int k = 0; k < n; ++k) {
        double s = sched[k];
        Mat4 pose = interpolate_pose(input_pose, target_first_pose, s);
        Intrinsics ki;
        ki.fx = (1 - s) * input_k.fx + s * target_k.fx;
        ki.fy = (1 - s) * input_k.fy + s * target_k.fy;
        ki.cx = (1 - s) * input_k.cx + s * target_k.cx;
        ki.cy = (1 - s) * input_k.cy + s * target_k.cy;
        out.poses.push_back(pose);

        Trajectory dst;
        dst.poses = {pose};
        dst.intrinsics = {ki};
        WarpResult w = depth_warp(rgb1, dep1, src, dst);
        std::copy_n(w.rgb.data.begin(), w.rgb.size(),
                    out.rgb.data.begin() + size_t(k) * w.rgb.size());
        std::copy_n(w.mask.data.begin(), w.mask.size(),
                    out.mask.data.begin() + size_t(k) * w.mask.size());
    }
    return out;
}

}  // namespace dualray
