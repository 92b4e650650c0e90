#include "scenegen/trajectories.h"

#include "core/error.h"
#include "core/rng.h"

namespace dualray {

namespace {

// Unit direction at azimuth a and elevation e (up is -y).
Vec3 orbit_dir(double a, double e) {
    return Vec3(std::cos(e) * std::cos(a), -std::sin(e), std::cos(e) * std::sin(a));
}

}  // namespace

Vec3 trajectory_position(const TrajectorySpec& spec, double t01) {
    switch (spec.family) {
        case TrajFamily::Static:
            return spec.target + spec.radius * orbit_dir(spec.angle0, spec.elevation);
        case TrajFamily::Line:
            return spec.line_start + (spec.line_end - spec.line_start) * t01;
        case TrajFamily::Radial:
            return spec.target +
                   spec.radius * orbit_dir(spec.angle0 + spec.sweep * t01, spec.elevation);
        case TrajFamily::Spiral: {
            double r = spec.radius + (spec.radius_end - spec.radius) * t01;
            double y = spec.height + (spec.height_end - spec.height) * t01;
            double a = spec.angle0 + spec.sweep * t01;
            return spec.target + Vec3(r * std::cos(a), y, r * std::sin(a));
        }
        case TrajFamily::Lissajous:
            return spec.liss_center +
                   Vec3(spec.liss_amp.x() * std::sin(2 * M_PI * spec.liss_fx * t01 + spec.liss_phase),
                        spec.liss_amp.y() * std::sin(2 * M_PI * spec.liss_fy * t01),
                        spec.liss_amp.z() * std::sin(2 * M_PI * spec.liss_fz * t01));
    }
    throw ConfigError("trajectory: unknown family");
}

std::vector<Mat4> generate_trajectory(const TrajectorySpec& spec, int frames) {
    if (frames < 1) throw ConfigError("trajectory: frames must be positive");
    std::vector<Mat4> poses;
    poses.reserve(frames);
    for (int t = 0; t < frames; ++t) {
        double t01 = frames == 1 ? 0.0 : double(t) / (frames - 1);
        Vec3 p = trajectory_position(spec, t01);
        if ((p - spec.target).norm() < 1e-9)
            throw DataError("trajectory: camera position coincides with look-at target");
        poses.push_back(make_pose(look_at_rotation(p, spec.target), p));
    }
    return poses;
}

TrajectorySpec sample_trajectory_spec(uint64_t seed, int index, int count) {
    Rng rng(mix_seed(seed, 0x7472616a, uint64_t(index)));
    TrajectorySpec spec;
    spec.family = TrajFamily(rng.uniform_index(5));
    spec.target = Vec3(rng.uniform(-0.2, 0.2), rng.uniform(-0.1, 0.3), rng.uniform(-0.2, 0.2));
    double base_angle = count > 0 ? 2 * M_PI * index / count : 0.0;
    spec.angle0 = base_angle + rng.uniform(-0.25, 0.25);
    spec.radius = rng.uniform(2.2, 3.8);
    spec.elevation = rng.uniform(0.05, 0.5);
    spec.sweep = rng.uniform(M_PI / 3, M_PI);
    switch (spec.family) {
        case TrajFamily::Static:
        case TrajFamily::Radial:
            break;
        case TrajFamily::Line: {
            double e2 = spec.elevation + rng.uniform(-0.1, 0.1);
            spec.line_start = spec.target + spec.radius * orbit_dir(spec.angle0, spec.elevation);
            spec.line_end =
                spec.target + spec.radius * orbit_dir(spec.angle0 + spec.sweep, e2);
            break;
        }
        case TrajFamily::Spiral:
            spec.radius_end = spec.radius * rng.uniform(0.6, 1.0);
            spec.height = -spec.radius * std::sin(spec.elevation);
            spec.height_end = spec.height + rng.uniform(-0.5, 0.2);
            break;
        case TrajFamily::Lissajous: {
            spec.liss_center = spec.target + spec.radius * orbit_dir(spec.angle0, spec.elevation);
            double amp = spec.radius / 4.0;
            spec.liss_amp = Vec3(rng.uniform(0.3, 1.0) * amp, rng.uniform(0.2, 0.6) * amp,
                                 rng.uniform(0.3, 1.0) * amp);
            spec.liss_fx = double(1 + rng.uniform_index(3));
            spec.liss_fy = double(rng.uniform_index(2));
            spec.liss_fz = double(1 + rng.uniform_index(3));
            spec.liss_phase = rng.uniform(0, 2 * M_PI);
            break;
        }
    }
    return spec;
}

FocalDraw sample_focals(uint64_t scene_seed, int camera_count) {
    if (camera_count < 1) throw ConfigError("sample_focals: camera count must be positive");
    Rng rng(mix_seed(scene_seed, 0x666f6361));
    FocalDraw draw;
    uint64_t mode = rng.uniform_index(3);
    draw.focals.resize(camera_count);
    if (mode == 0) {
        draw.mode = FocalDraw::Mode::Preset;
        for (double& f : draw.focals) f = kFocalPreset;
    } else if (mode == 1) {
        draw.mode = FocalDraw::Mode::SharedRandom;
        double f = rng.uniform(kFocalMin, kFocalMax);
        for (double& v : draw.focals) v = f;
    } else {
        draw.mode = FocalDraw::Mode::Independent;
        for (double& v : draw.focals) v = rng.uniform(kFocalMin, kFocalMax);
    }
    return draw;
}

Intrinsics intrinsics_for(double focal_at_reference, int height, int width) {
    Intrinsics k;
    double scale = double(width) / kFocalReferenceSize;
    k.fx = k.fy = focal_at_reference * scale;
    k.cx = width / 2.0;
    k.cy = height / 2.0;
    return k;
}

}  // namespace dualray
