#pragma once

#include <cstdint>
#include <vector>

#include "geometry/geometry.h"

namespace dualray {

// Scene content: a handful of moving lambertian primitives over a ground
// plane, one directional light, gradient sky. World up is -y and the ground
// lies below the origin at y = +1.
struct Primitive {
    enum class Kind { Sphere, Box };
    Kind kind = Kind::Sphere;
    Vec3 center = Vec3::Zero();     // at frame 0
    Vec3 velocity = Vec3::Zero();   // units per frame
    Mat3 rotation = Mat3::Identity();
    Vec3 spin_axis = Vec3(0, 1, 0);
    double spin_rate = 0.0;         // radians per frame
    Vec3 half_extent = Vec3(0.3, 0.3, 0.3);  // sphere uses x as radius
    Vec3 albedo = Vec3(0.5, 0.5, 0.5);

    Vec3 center_at(int frame) const { return center + velocity * double(frame); }
    Mat3 rotation_at(int frame) const;
};

struct SceneSpec {
    uint64_t seed = 0;
    std::vector<Primitive> objects;
    double ground_y = 1.0;
    Vec3 light_dir = Vec3(0.35, -0.85, 0.25).normalized();  // toward the light
    double ambient = 0.35;
    Vec3 sky_horizon = Vec3(0.72, 0.80, 0.92);
    Vec3 sky_zenith = Vec3(0.22, 0.36, 0.62);
    Vec3 ground_color_a = Vec3(0.46, 0.41, 0.35);
    Vec3 ground_color_b = Vec3(0.72, 0.69, 0.60);
    Vec3 spawn_half_extent = Vec3(1.2, 0.6, 1.2);
};

// Bounds used by the sampler; exposed so tests can assert them.
constexpr int kMinObjects = 2;
constexpr int kMaxObjects = 8;
constexpr double kMaxVelocity = 0.06;    // units per frame, per axis
constexpr double kMaxSpinRate = 0.2;     // radians per frame
constexpr double kMaxObjectSize = 0.45;  // largest radius / half extent

SceneSpec sample_scene(uint64_t seed);

}  // namespace dualray
