#pragma once

#include <string>
#include <vector>

#include "core/grid.h"
#include "geometry/geometry.h"

namespace dualray {

struct ManifestCamera {
    std::string id;
    std::vector<std::string> frames;  // paths relative to the manifest
    std::vector<std::string> depth;   // optional, empty when absent
    std::vector<Mat4> poses;          // camera-to-world
    std::vector<Intrinsics> intrinsics;
};

struct EpisodeManifest {
    std::string episode_id;
    int height = 0, width = 0;
    int frame_count = 0;
    int fps = 0;
    bool align_start = true;
    bool has_normalization = false;
    double normalization_constant = 0.0;
    std::string domain;
    std::vector<ManifestCamera> cameras;
    std::string base_dir;  // directory the manifest was loaded from
};

// One JSON object per line. Validates shapes, pose orthonormality and that
// every referenced file exists; throws DataError otherwise.
std::vector<EpisodeManifest> load_manifests(const std::string& path);

const ManifestCamera& find_camera(const EpisodeManifest& ep, const std::string& id);

// Manifest constant when present, otherwise the auto rule: largest camera
// center norm over the listed cameras (identity gauge), floored at tiny.
double resolve_normalization(const EpisodeManifest& ep, const ManifestCamera& a,
                             const ManifestCamera& b);

Trajectory camera_trajectory(const ManifestCamera& cam);

// (T, H, W, 3) in [0, 1]; decodes .png frames, reads .f32 raw frames.
Grid4f load_video(const EpisodeManifest& ep, const ManifestCamera& cam);

// (T, H, W, 1); requires depth paths.
Grid4f load_depth(const EpisodeManifest& ep, const ManifestCamera& cam);

}  // namespace dualray
