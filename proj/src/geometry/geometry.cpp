#include "geometry/geometry.h"

#include <cmath>

#include "core/error.h"

namespace dualray {

Mat4 make_pose(const Mat3& rotation, const Vec3& translation) {
    Mat4 p = Mat4::Identity();
    p.block<3, 3>(0, 0) = rotation;
    p.block<3, 1>(0, 3) = translation;
    return p;
}

Mat4 inverse_pose(const Mat4& pose) {
    Mat3 rt = pose.block<3, 3>(0, 0).transpose();
    return make_pose(rt, -rt * pose.block<3, 1>(0, 3));
}

double wrap_angle(double a) {
    double w = std::fmod(a + M_PI, 2.0 * M_PI);
    if (w <= 0.0) w += 2.0 * M_PI;
    return w - M_PI;
}

Mat3 look_at_rotation(const Vec3& origin, const Vec3& target) {
    Vec3 forward = target - origin;
    double n = forward.norm();
    if (n < 1e-12) throw DataError("look_at_rotation: target coincides with origin");
    forward /= n;
    Vec3 up(0, -1, 0);
    if (std::abs(forward.dot(up)) > 1.0 - 1e-9) up = Vec3(0, 0, 1);
    Vec3 right = forward.cross(up).normalized();
    Vec3 down = forward.cross(right).normalized();
    Mat3 r;
    r.col(0) = right;
    r.col(1) = down;
    r.col(2) = forward;
    return r;
}

RayGrid make_ray_grid(const Intrinsics& k, int height, int width) {
    if (height <= 0 || width <= 0) throw DataError("make_ray_grid: empty grid");
    if (k.fx <= 0 || k.fy <= 0) throw DataError("make_ray_grid: non-positive focal length");
    RayGrid grid;
    grid.height = height;
    grid.width = width;
    grid.dirs.resize(size_t(height) * width);
    for (int v = 0; v < height; ++v) {
        for (int u = 0; u < width; ++u) {
            Vec3 cam((u + 0.5 - k.cx) / k.fx, (v + 0.5 - k.cy) / k.fy, 1.0);
            grid.dirs[size_t(v) * width + u] = cam.normalized();
        }
    }
    return grid;
}

RayGrid make_world_rays(const Intrinsics& k, const Mat4& pose, int height, int width) {
    RayGrid grid = make_ray_grid(k, height, width);
    Mat3 r = pose.block<3, 3>(0, 0);
    grid.origin = pose.block<3, 1>(0, 3);
    for (Vec3& d : grid.dirs) d = (r * d).normalized();
    return grid;
}

Grid4f pluecker_from_camera(const Trajectory& traj, int height, int width) {
    int frames = traj.frame_count();
    if (frames == 0) throw DataError("pluecker_from_camera: empty trajectory");
    if (int(traj.intrinsics.size()) != frames)
        throw DataError("pluecker_from_camera: intrinsics count mismatch");
    if (traj.has_override() &&
        (traj.ray_override.d0 != frames || traj.ray_override.d1 != height ||
         traj.ray_override.d2 != width || traj.ray_override.d3 != 3))
        throw DataError("pluecker_from_camera: ray override shape mismatch");

    Grid4f map(frames, height, width, 6);
    for (int t = 0; t < frames; ++t) {
        Mat3 rot = traj.poses[t].block<3, 3>(0, 0);
        Vec3 origin = traj.poses[t].block<3, 1>(0, 3);
        RayGrid grid;
        if (!traj.has_override()) grid = make_ray_grid(traj.intrinsics[t], height, width);
        for (int v = 0; v < height; ++v) {
            for (int u = 0; u < width; ++u) {
                Vec3 cam;
                if (traj.has_override()) {
                    cam = Vec3(traj.ray_override(t, v, u, 0), traj.ray_override(t, v, u, 1),
                               traj.ray_override(t, v, u, 2));
                    double n = cam.norm();
                    if (std::abs(n - 1.0) > 1e-5)
                        throw DataError("pluecker_from_camera: override ray not unit length");
                    cam /= n;
                } else {
                    cam = grid.dir(v, u);
                }
                Vec3 r = (rot * cam).normalized();
                Vec3 m = r.cross(origin);
                for (int c = 0; c < 3; ++c) map(t, v, u, c) = float(r[c]);
                for (int c = 0; c < 3; ++c) {
                    double clipped = std::min(1.0, std::max(-1.0, m[c]));
                    map(t, v, u, 3 + c) = float(clipped);
                }
            }
        }
    }
    return map;
}

std::vector<Mat4> canonicalize_trajectory(const std::vector<Mat4>& poses, const Mat4& anchor) {
    Mat4 inv = inverse_pose(anchor);
    std::vector<Mat4> out;
    out.reserve(poses.size());
    for (const Mat4& p : poses) out.push_back(inv * p);
    return out;
}

void canonicalize_pair(Trajectory& target, Trajectory& input) {
    if (input.poses.empty() || target.poses.empty())
        throw DataError("canonicalize_pair: empty trajectory");
    Mat4 anchor = target.poses[0];
    target.poses = canonicalize_trajectory(target.poses, anchor);
    input.poses = canonicalize_trajectory(input.poses, anchor);
}

double translation_scale(const std::vector<const std::vector<Mat4>*>& trajectories) {
    double best = 0.0;
    for (const auto* traj : trajectories)
        for (const Mat4& p : *traj) best = std::max(best, p.block<3, 1>(0, 3).norm());
    return best < 1e-12 ? 1.0 : best;
}

void normalize_translations(std::vector<Mat4>& poses, double constant) {
    if (constant <= 0.0) throw DataError("normalize_translations: non-positive constant");
    for (Mat4& p : poses) p.block<3, 1>(0, 3) /= constant;
}

GcdPose project_pose_to_gcd(const Mat4& pose) {
    Vec3 f = pose.block<3, 1>(0, 2);
    Vec3 t = pose.block<3, 1>(0, 3);
    if (f.norm() < 1e-9) throw DataError("project_pose_to_gcd: degenerate forward axis");
    GcdPose g;
    g.azimuth = std::atan2(f.y(), f.x());
    g.elevation = -std::atan2(f.z(), std::sqrt(f.x() * f.x() + f.y() * f.y()));
    g.radius = t.norm();
    return g;
}

GcdControl gcd_delta(const GcdPose& input, const GcdPose& target) {
    GcdControl c;
    c.delta_azimuth = wrap_angle(target.azimuth - input.azimuth);
    c.delta_elevation = target.elevation - input.elevation;
    c.delta_radius = target.radius - input.radius;
    return c;
}

GcdControl project_to_gcd(const Trajectory& target, const Trajectory& input, GcdAnchor anchor) {
    if (target.poses.empty() || input.poses.empty())
        throw DataError("project_to_gcd: empty trajectory");
    auto pick = [anchor](const Trajectory& t) -> const Mat4& {
        size_t i = anchor == GcdAnchor::Middle ? t.poses.size() / 2 : t.poses.size() - 1;
        return t.poses[i];
    };
    return gcd_delta(project_pose_to_gcd(pick(input)), project_pose_to_gcd(pick(target)));
}

Mat4 interpolate_pose(const Mat4& a, const Mat4& b, double alpha) {
    Eigen::Quaterniond qa(Mat3(a.block<3, 3>(0, 0)));
    Eigen::Quaterniond qb(Mat3(b.block<3, 3>(0, 0)));
    if (qa.dot(qb) < 0.0) qb.coeffs() = -qb.coeffs();
    Eigen::Quaterniond q = qa.slerp(alpha, qb);
    Vec3 t = (1.0 - alpha) * a.block<3, 1>(0, 3) + alpha * b.block<3, 1>(0, 3);
    return make_pose(q.toRotationMatrix(), t);
}

}  // namespace dualray
