#pragma once

#include "core/grid.h"
#include "scenegen/scene.h"

namespace dualray {

struct RenderOutput {
    Grid4f rgb;    // (T, H, W, 3) in [0, 1]
    Grid4f depth;  // (T, H, W, 1), euclidean hit distance, +inf for sky
};

struct RayHit {
    bool hit = false;
    double t = 0;           // distance along the unit ray
    Vec3 normal = Vec3::Zero();
    Vec3 albedo = Vec3::Zero();
};

// Closest intersection among every object and the ground; exposed so tests
// can compare the z-buffered image against per-ray brute force.
RayHit intersect_scene(const SceneSpec& scene, int frame, const Vec3& origin, const Vec3& dir);

Vec3 shade(const SceneSpec& scene, const RayHit& hit, const Vec3& dir);

RenderOutput render_camera(const SceneSpec& scene, const Trajectory& cam, int height, int width);

}  // namespace dualray
