#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geometry/geometry.h"
#include "scenegen/render.h"
#include "scenegen/scene.h"

namespace dualray {

struct DatasetConfig {
    int episodes = 1;
    int frames = 8;
    int height = 64;
    int width = 64;
    int cameras = 4;
    uint64_t seed = 0;
    bool png = true;  // false: raw f32 frames
    int fps = 12;
    int threads = 1;
    std::string out_dir;
};

// One fully-sampled episode, kept in memory. make_dataset writes these out;
// tests and the training loader use them directly.
struct Episode {
    std::string id;
    SceneSpec scene;
    std::vector<Trajectory> cams;
    std::vector<RenderOutput> renders;  // one per camera
    double normalization_constant = 1.0;
};

std::string episode_id(uint64_t seed, int index);

// Samples scene + cameras and renders every view. Deterministic in
// (cfg.seed, index); resolution and camera count come from cfg.
Episode build_episode(const DatasetConfig& cfg, int index);

// Largest distance from any camera center at any frame to any camera's first
// center. Dividing translations by this keeps every canonicalized center
// inside the unit ball no matter which view is the anchor.
double episode_normalization(const std::vector<Trajectory>& cams);

// Writes `<out>/<episode>/<camera>/<frame>.{png|f32}` plus depth grids and a
// JSONL manifest `<out>/manifest.jsonl`, one episode per line.
void make_dataset(const DatasetConfig& cfg);

}  // namespace dualray
