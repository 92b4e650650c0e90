#include "evalkit/evaluate.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "core/bytes.h"
#include "core/error.h"
#include "core/rng.h"
#include "evalkit/warp.h"
#include "io/png.h"

using json = nlohmann::json;

namespace dualray {

Generator make_copy_generator() {
    return [](const WindowTask& task) { return task.input_rgb; };
}

Generator make_warp_generator() {
    return [](const WindowTask& task) {
        if (task.input_depth.d0 == 0)
            throw DataError("warp baseline needs depth maps for the input camera");
        WarpResult w = depth_warp(task.input_rgb, task.input_depth, task.input_cam,
                                  task.target_cam);
        for (int t = 0; t < w.rgb.d0; ++t)
            for (int y = 0; y < w.rgb.d1; ++y)
                for (int x = 0; x < w.rgb.d2; ++x)
                    if (!w.mask(t, y, x, 0))
                        for (int c = 0; c < 3; ++c) w.rgb(t, y, x, c) = 0.5f;
        return std::move(w.rgb);
    };
}

namespace {

Trajectory slice_trajectory(const ManifestCamera& cam, int start, int frames) {
    Trajectory t;
    t.poses.assign(cam.poses.begin() + start, cam.poses.begin() + start + frames);
    t.intrinsics.assign(cam.intrinsics.begin() + start, cam.intrinsics.begin() + start + frames);
    return t;
}

Grid4f slice_video(const Grid4f& video, int start, int frames) {
    Grid4f out(frames, video.d1, video.d2, video.d3);
    size_t per = size_t(video.d1) * video.d2 * video.d3;
    std::copy_n(video.data.begin() + size_t(start) * per, size_t(frames) * per,
                out.data.begin());
    return out;
}

}  // namespace

Grid4f run_protocol(const EpisodeManifest& ep, const Generator& gen, const std::string& input_id,
                    const std::string& target_id, const EvalConfig& cfg,
                    std::vector<EvalWindow>* windows_out) {
    const ManifestCamera& cam_in = find_camera(ep, input_id);
    const ManifestCamera& cam_tgt = find_camera(ep, target_id);

    Grid4f input_rgb = load_video(ep, cam_in);
    Grid4f input_depth;
    if (!cam_in.depth.empty()) input_depth = load_depth(ep, cam_in);
    double norm = resolve_normalization(ep, cam_tgt, cam_in);

    std::vector<EvalWindow> windows = plan_windows(ep.frame_count, cfg.window);
    Grid4f full(ep.frame_count, ep.height, ep.width, 3);
    size_t per = size_t(ep.height) * ep.width * 3;

    for (size_t wi = 0; wi < windows.size(); ++wi) {
        const EvalWindow& win = windows[wi];
        WindowTask task;
        task.input_cam = slice_trajectory(cam_in, win.start, win.frames);
        task.target_cam = slice_trajectory(cam_tgt, win.start, win.frames);
        canonicalize_pair(task.target_cam, task.input_cam);
        normalize_translations(task.input_cam.poses, norm);
        normalize_translations(task.target_cam.poses, norm);
        task.input_rgb = slice_video(input_rgb, win.start, win.frames);
        if (input_depth.d0 > 0) {
            // Depth must live in the same normalized units as the camera
            // translations or the warp geometry falls apart.
            task.input_depth = slice_video(input_depth, win.start, win.frames);
            for (float& dv : task.input_depth.data)
                if (std::isfinite(dv)) dv = float(dv / norm);
        }
        task.frames = win.frames;
        task.height = ep.height;
        task.width = ep.width;
        task.seed = mix_seed(cfg.seed, 0x77696e64, wi);
        task.window_index = int(wi);

        Grid4f pred = gen(task);
        if (pred.d0 != win.frames || pred.d1 != ep.height || pred.d2 != ep.width || pred.d3 != 3)
            throw DataError(ep.episode_id + ": generator returned wrong shape");

        std::copy_n(pred.data.begin() + size_t(win.count_begin - win.start) * per,
                    size_t(win.count_end - win.count_begin) * per,
                    full.data.begin() + size_t(win.count_begin) * per);
    }
    if (windows_out) *windows_out = std::move(windows);
    return full;
}

MetricReport evaluate_episode(const EpisodeManifest& ep, const Generator& gen,
                              const std::string& input_id, const std::string& target_id,
                              const EvalConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();

    MetricReport report;
    report.episode_id = ep.episode_id;
    Grid4f pred = run_protocol(ep, gen, input_id, target_id, cfg, &report.windows);
    Grid4f target_rgb = load_video(ep, find_camera(ep, target_id));

    report.psnr_per_frame = psnr_frames(pred, target_rgb);
    report.ssim_per_frame = ssim_frames(pred, target_rgb);
    for (int f = 0; f < ep.frame_count; ++f) {
        report.psnr_mean += report.psnr_per_frame[f];
        report.ssim_mean += report.ssim_per_frame[f];
    }
    report.psnr_mean /= ep.frame_count;
    report.ssim_mean /= ep.frame_count;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

namespace {

void sort_reports(std::vector<MetricReport>& reports) {
    std::sort(reports.begin(), reports.end(),
              [](const MetricReport& a, const MetricReport& b) {
                  return a.episode_id < b.episode_id;
              });
}

}  // namespace

void write_metrics_csv(const std::string& path, std::vector<MetricReport> reports) {
    sort_reports(reports);
    std::string out = "episode_id,frame_idx,psnr_db,ssim\n";
    char buf[128];
    for (const MetricReport& r : reports)
        for (size_t f = 0; f < r.psnr_per_frame.size(); ++f) {
            std::snprintf(buf, sizeof(buf), "%s,%zu,%.6f,%.6f\n", r.episode_id.c_str(), f,
                          r.psnr_per_frame[f], r.ssim_per_frame[f]);
            out += buf;
        }
    write_file_text(path, out);
}

void write_metrics_json(const std::string& path, std::vector<MetricReport> reports) {
    sort_reports(reports);
    json episodes = json::array();
    double psnr_all = 0, ssim_all = 0;
    for (const MetricReport& r : reports) {
        json windows = json::array();
        for (const EvalWindow& w : r.windows)
            windows.push_back({{"start", w.start},
                               {"frames", w.frames},
                               {"count_begin", w.count_begin},
                               {"count_end", w.count_end}});
        episodes.push_back({{"episode_id", r.episode_id},
                            {"frames", r.psnr_per_frame.size()},
                            {"psnr_mean", r.psnr_mean},
                            {"ssim_mean", r.ssim_mean},
                            {"windows", windows}});
        psnr_all += r.psnr_mean;
        ssim_all += r.ssim_mean;
    }
    json root;
    root["episodes"] = episodes;
    root["overall"] = {{"psnr_mean", reports.empty() ? 0.0 : psnr_all / reports.size()},
                       {"ssim_mean", reports.empty() ? 0.0 : ssim_all / reports.size()},
                       {"episode_count", reports.size()}};
    write_file_text(path, root.dump(2) + "\n");
}

void write_heatmap_raw(const std::string& path, const UncertaintyMap& map) {
    std::vector<uint8_t> bytes;
    put_i32(bytes, map.height);
    put_i32(bytes, map.width);
    for (float v : map.values) put_f32(bytes, v);
    write_file_bytes(path, bytes.data(), bytes.size());
}

UncertaintyMap read_heatmap_raw(const std::string& path) {
    std::vector<uint8_t> bytes = read_file_bytes(path);
    ByteReader r(bytes);
    if (!r.ok(8)) throw DataError(path + ": bad heatmap header");
    UncertaintyMap map;
    map.height = r.i32();
    map.width = r.i32();
    if (map.height <= 0 || map.width <= 0) throw DataError(path + ": bad heatmap header");
    size_t count = size_t(map.height) * map.width;
    if (!r.ok(count * 4)) throw DataError(path + ": truncated heatmap");
    map.values.resize(count);
    for (float& v : map.values) v = r.f32();
    return map;
}

void write_heatmap_png(const std::string& path, const UncertaintyMap& map) {
    // Dark violet through orange to pale yellow, five fixed stops.
    static const double stops[5][3] = {{0.05, 0.03, 0.20},
                                       {0.35, 0.06, 0.49},
                                       {0.73, 0.22, 0.33},
                                       {0.97, 0.55, 0.04},
                                       {0.99, 0.91, 0.55}};
    float peak = 0;
    for (float v : map.values) peak = std::max(peak, v);

    ImageU8 img;
    img.width = map.width;
    img.height = map.height;
    img.channels = 3;
    img.pixels.resize(size_t(map.width) * map.height * 3);
    for (size_t i = 0; i < map.values.size(); ++i) {
        double v = peak > 0 ? map.values[i] / peak : 0.0;
        double pos = std::min(std::max(v, 0.0), 1.0) * 4.0;
        int lo = std::min(3, int(pos));
        double f = pos - lo;
        for (int c = 0; c < 3; ++c) {
            double col = stops[lo][c] + (stops[lo + 1][c] - stops[lo][c]) * f;
            img.pixels[i * 3 + c] = uint8_t(std::lround(col * 255.0));
        }
    }
    png_write_file(path, img);
}

}  // namespace dualray
