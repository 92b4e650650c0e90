#include "scenegen/render.h"

#include <cmath>
#include <limits>

#include "core/error.h"

namespace dualray {

namespace {

constexpr double kTMin = 1e-4;

bool intersect_sphere(const Vec3& o, const Vec3& d, const Vec3& c, double r, double& t_out,
                      Vec3& normal) {
    Vec3 oc = o - c;
    double b = d.dot(oc);
    double disc = b * b - (oc.squaredNorm() - r * r);
    if (disc < 0) return false;
    double sq = std::sqrt(disc);
    double t = -b - sq;
    if (t < kTMin) t = -b + sq;
    if (t < kTMin) return false;
    t_out = t;
    normal = (o + d * t - c) / r;
    return true;
}

bool intersect_box(const Vec3& o, const Vec3& d, const Vec3& c, const Mat3& rot,
                   const Vec3& half, double& t_out, Vec3& normal) {
    Vec3 ol = rot.transpose() * (o - c);
    Vec3 dl = rot.transpose() * d;
    double tnear = -std::numeric_limits<double>::infinity();
    double tfar = std::numeric_limits<double>::infinity();
    int near_axis = -1;
    double near_sign = 0;
    for (int a = 0; a < 3; ++a) {
        if (std::abs(dl[a]) < 1e-12) {
            if (std::abs(ol[a]) > half[a]) return false;
            continue;
        }
        double t1 = (-half[a] - ol[a]) / dl[a];
        double t2 = (half[a] - ol[a]) / dl[a];
        double sign = -1;
        if (t1 > t2) {
            std::swap(t1, t2);
            sign = 1;
        }
        if (t1 > tnear) {
            tnear = t1;
            near_axis = a;
            near_sign = sign;
        }
        tfar = std::min(tfar, t2);
        if (tnear > tfar) return false;
    }
    if (tfar < kTMin || near_axis < 0) return false;
    if (tnear < kTMin) return false;  // camera inside the box: skip
    t_out = tnear;
    Vec3 ln = Vec3::Zero();
    ln[near_axis] = near_sign;
    normal = rot * ln;
    return true;
}

Vec3 ground_albedo(const SceneSpec& scene, double x, double z) {
    double blend = 0.5 + 0.5 * std::sin(2.2 * x) * std::sin(2.2 * z);
    return scene.ground_color_a + (scene.ground_color_b - scene.ground_color_a) * blend;
}

}  // namespace

RayHit intersect_scene(const SceneSpec& scene, int frame, const Vec3& origin, const Vec3& dir) {
    RayHit best;
    best.t = std::numeric_limits<double>::infinity();

    for (const Primitive& obj : scene.objects) {
        double t;
        Vec3 n;
        bool hit;
        Vec3 c = obj.center_at(frame);
        if (obj.kind == Primitive::Kind::Sphere)
            hit = intersect_sphere(origin, dir, c, obj.half_extent.x(), t, n);
        else
            hit = intersect_box(origin, dir, c, obj.rotation_at(frame), obj.half_extent, t, n);
        if (hit && t < best.t) {
            best.hit = true;
            best.t = t;
            best.normal = n;
            best.albedo = obj.albedo;
        }
    }

    // Ground plane y = ground_y, normal pointing up (-y).
    if (std::abs(dir.y()) > 1e-12) {
        double t = (scene.ground_y - origin.y()) / dir.y();
        if (t >= kTMin && t < best.t) {
            Vec3 p = origin + dir * t;
            best.hit = true;
            best.t = t;
            best.normal = Vec3(0, -1, 0);
            best.albedo = ground_albedo(scene, p.x(), p.z());
        }
    }
    return best;
}

Vec3 shade(const SceneSpec& scene, const RayHit& hit, const Vec3& dir) {
    if (!hit.hit) {
        double up = std::min(1.0, std::max(0.0, -dir.y()));
        return scene.sky_horizon + (scene.sky_zenith - scene.sky_horizon) * up;
    }
    double lambert = std::max(0.0, hit.normal.dot(scene.light_dir));
    Vec3 c = hit.albedo * (scene.ambient + (1.0 - scene.ambient) * lambert);
    return c.cwiseMin(1.0).cwiseMax(0.0);
}

RenderOutput render_camera(const SceneSpec& scene, const Trajectory& cam, int height, int width) {
    if (height <= 0 || width <= 0) throw DataError("render: zero-size image");
    int frames = cam.frame_count();
    if (frames == 0 || int(cam.intrinsics.size()) != frames)
        throw DataError("render: malformed trajectory");

    RenderOutput out;
    out.rgb.resize(frames, height, width, 3);
    out.depth.resize(frames, height, width, 1);
    for (int t = 0; t < frames; ++t) {
        RayGrid rays = make_world_rays(cam.intrinsics[t], cam.poses[t], height, width);
        for (int v = 0; v < height; ++v) {
            for (int u = 0; u < width; ++u) {
                const Vec3& d = rays.dir(v, u);
                RayHit hit = intersect_scene(scene, t, rays.origin, d);
                Vec3 c = shade(scene, hit, d);
                for (int ch = 0; ch < 3; ++ch) out.rgb(t, v, u, ch) = float(c[ch]);
                out.depth(t, v, u, 0) =
                    hit.hit ? float(hit.t) : std::numeric_limits<float>::infinity();
            }
        }
    }
    return out;
}

}  // namespace dualray
