#pragma once

#include <cstdint>
#include <string>

#include "diffusion/diffusion.h"
#include "evalkit/evaluate.h"
#include "model/config.h"

namespace dualray {

// JSON config sections, one per command family. Unknown keys are rejected so
// typos fail loudly; every run echoes the fully-resolved config next to its
// outputs.

struct DataSection {
    int episodes = 1;
    int frames = 8;
    int height = 64;
    int width = 64;
    int cameras = 4;
    int fps = 12;
    bool png = true;
};

struct DiffusionSection {
    int schedule_steps = 1000;
    int sample_steps = 50;
    int samples_per_condition = 1;
};

struct TrainSection {
    int steps = 2000;
    double lr = 1e-3;
    int checkpoint_every = 500;
    int log_every = 10;
    std::string dataset;
    std::string input_camera = "cam00";
    std::string target_camera = "cam01";
    std::string resume;
};

struct SampleSection {
    std::string checkpoint;
    std::string dataset;
    std::string episode;  // empty: all episodes
    std::string input_camera = "cam00";
    std::string target_camera = "cam01";
    bool dump_latents = false;
    bool dump_pluecker = false;
};

struct EvalSection {
    std::string dataset;
    std::string generator = "copy";  // copy | warp | model
    std::string checkpoint;
    int window = 8;
    std::string input_camera = "cam00";
    std::string target_camera = "cam01";
    int heatmap_samples = 0;  // >= 2 turns on uncertainty heatmaps
};

struct WarpSection {
    std::string dataset;
    std::string episode;
    std::string input_camera = "cam00";
    std::string target_camera = "cam01";
};

struct GcdSection {
    std::string dataset;
    std::string episode;
    std::string input_camera = "cam00";
    std::string target_camera = "cam01";
    std::string anchor = "middle";  // middle | last
};

struct PlueckerSection {
    std::string dataset;
    std::string episode;
    std::string camera = "cam00";
};

struct RunConfig {
    uint64_t seed = 0;
    std::string out = "out";
    int threads = 0;  // 0: available parallelism
    DataSection data;
    ModelConfig model;
    DiffusionSection diffusion;
    TrainSection train;
    SampleSection sample;
    EvalSection eval;
    WarpSection warp;
    GcdSection project_gcd;
    PlueckerSection pluecker;
};

RunConfig parse_run_config(const std::string& json_text);

// Echo with every key present; written as resolved_config.json by run_command.
std::string resolved_config_json(const RunConfig& rc);

// Latent fixture for one episode and ordered view pair: slices nothing
// (whole episode), canonicalizes to the target start, normalizes
// translations by the manifest constant, and pushes RGB (remapped to
// [-1, 1]) and the ray maps through the codec.
struct PairBundle {
    EpisodePair pair;
    Grid4f pluecker_x, pluecker_y;  // pixel-resolution (T, H, W, 6) maps
};

PairBundle build_pair_bundle(const EpisodeManifest& ep, const std::string& input_id,
                             const std::string& target_id);
EpisodePair build_pair(const EpisodeManifest& ep, const std::string& input_id,
                       const std::string& target_id);

// Windowed generator denoising the target latent with the model and decoding
// back to pixels. Window length must be divisible by the codec's temporal
// factor. Parameters are copied in.
Generator make_model_generator(Params<float> params, NoiseSchedule sched, int sample_steps);

// Dispatch: gen-data, train, sample, eval, warp, project-gcd, pluecker.
void run_command(const std::string& command, const RunConfig& rc);

}  // namespace dualray
