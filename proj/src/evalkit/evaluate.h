#pragma once

#include <functional>
#include <string>
#include <vector>

#include "evalkit/manifest.h"
#include "evalkit/metrics.h"

namespace dualray {

// One generation request: cameras are canonicalized to the target window's
// first pose and translation-normalized; videos are [0, 1]. input_depth has
// d0 == 0 when the manifest carries no depth.
struct WindowTask {
    Trajectory input_cam;
    Trajectory target_cam;
    Grid4f input_rgb;
    Grid4f input_depth;
    int frames = 0, height = 0, width = 0;
    uint64_t seed = 0;
    int window_index = 0;
};

using Generator = std::function<Grid4f(const WindowTask&)>;

// Emits the input view unchanged.
Generator make_copy_generator();

// Depth-warps the input view into the target camera; uncovered pixels fall
// back to mid gray.
Generator make_warp_generator();

struct EvalConfig {
    int window = 8;
    uint64_t seed = 0;
};

// Runs the sliding-window protocol and stitches the counted frames of each
// window into one full-length predicted video.
Grid4f run_protocol(const EpisodeManifest& ep, const Generator& gen, const std::string& input_id,
                    const std::string& target_id, const EvalConfig& cfg,
                    std::vector<EvalWindow>* windows_out = nullptr);

struct MetricReport {
    std::string episode_id;
    std::vector<double> psnr_per_frame;
    std::vector<double> ssim_per_frame;
    double psnr_mean = 0;
    double ssim_mean = 0;
    std::vector<EvalWindow> windows;
    double wall_seconds = 0;  // not serialized
};

MetricReport evaluate_episode(const EpisodeManifest& ep, const Generator& gen,
                              const std::string& input_id, const std::string& target_id,
                              const EvalConfig& cfg);

// Rows sorted by (episode_id, frame_idx); columns episode_id, frame_idx,
// psnr_db, ssim.
void write_metrics_csv(const std::string& path, std::vector<MetricReport> reports);

// Per-episode means and window plans plus overall means. Wall-clock time is
// deliberately left out so reruns are byte-identical.
void write_metrics_json(const std::string& path, std::vector<MetricReport> reports);

// Raw grid: two little-endian i32 (H, W) then H*W f32.
void write_heatmap_raw(const std::string& path, const UncertaintyMap& map);
UncertaintyMap read_heatmap_raw(const std::string& path);

// PNG with a fixed five-stop color ramp; values are scaled by the map maximum
// (all-zero maps render as the first stop).
void write_heatmap_png(const std::string& path, const UncertaintyMap& map);

}  // namespace dualray
