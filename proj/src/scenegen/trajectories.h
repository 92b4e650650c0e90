#pragma once

#include <cstdint>
#include <vector>

#include "geometry/geometry.h"

namespace dualray {

enum class TrajFamily { Static, Line, Radial, Spiral, Lissajous };

// Parametric camera path over normalized episode time in [0, 1]; every
// family points the camera at `target` with the shared look-at convention.
struct TrajectorySpec {
    TrajFamily family = TrajFamily::Static;
    Vec3 target = Vec3(0, 0.1, 0);

    double radius = 3.0, radius_end = 3.0;   // orbit families
    double elevation = 0.15;                 // radians above the horizon
    double height = -0.6, height_end = -0.6; // spiral: y offsets from target
    double angle0 = 0.0, sweep = M_PI / 2;   // radians over the episode

    Vec3 line_start = Vec3(3, -0.6, 0), line_end = Vec3(0, -0.6, 3);

    Vec3 liss_center = Vec3(3, -0.8, 0);
    Vec3 liss_amp = Vec3(0.8, 0.3, 0.8);
    double liss_fx = 2, liss_fy = 0, liss_fz = 3;
    double liss_phase = 0;
};

Vec3 trajectory_position(const TrajectorySpec& spec, double t01);

std::vector<Mat4> generate_trajectory(const TrajectorySpec& spec, int frames);

// Random family and parameters for camera `index` of `count`, anchored so
// cameras spread evenly in azimuth around the target.
TrajectorySpec sample_trajectory_spec(uint64_t seed, int index, int count);

// Focal-length sampling at the 64-pixel reference size: one third of scenes
// share the preset, one third share a single random draw, one third sample
// independently per camera.
constexpr double kFocalPreset = 35.0;
constexpr double kFocalMin = 20.0;
constexpr double kFocalMax = 70.0;
constexpr int kFocalReferenceSize = 64;

struct FocalDraw {
    enum class Mode { Preset, SharedRandom, Independent };
    Mode mode = Mode::Preset;
    std::vector<double> focals;
};

FocalDraw sample_focals(uint64_t scene_seed, int camera_count);

Intrinsics intrinsics_for(double focal_at_reference, int height, int width);

}  // namespace dualray
