#include "scenegen/dataset.h"

#include <cstdio>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "core/bytes.h"
#include "core/error.h"
#include "core/rng.h"
#include "core/threading.h"
#include "io/image_io.h"
#include "scenegen/trajectories.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace dualray {

std::string episode_id(uint64_t seed, int index) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "ep_%08llx_%04d",
                  (unsigned long long)(mix_seed(seed, 0x65706964) & 0xffffffffULL), index);
    return buf;
}

double episode_normalization(const std::vector<Trajectory>& cams) {
    double best = 0.0;
    for (const Trajectory& anchor : cams) {
        if (anchor.poses.empty()) continue;
        Vec3 o0 = anchor.poses.front().block<3, 1>(0, 3);
        for (const Trajectory& cam : cams)
            for (const Mat4& pose : cam.poses)
                best = std::max(best, (pose.block<3, 1>(0, 3) - o0).norm());
    }
    return best < 1e-12 ? 1.0 : best;
}

Episode build_episode(const DatasetConfig& cfg, int index) {
    if (cfg.frames < 1 || cfg.cameras < 2)
        throw ConfigError("episode needs >=1 frame and >=2 cameras");
    uint64_t eseed = mix_seed(cfg.seed, 0x65700000, uint64_t(index));

    Episode ep;
    ep.id = episode_id(cfg.seed, index);
    ep.scene = sample_scene(eseed);

    FocalDraw focals = sample_focals(eseed, cfg.cameras);
    for (int c = 0; c < cfg.cameras; ++c) {
        TrajectorySpec spec = sample_trajectory_spec(eseed, c, cfg.cameras);
        Trajectory cam;
        cam.poses = generate_trajectory(spec, cfg.frames);
        cam.intrinsics.assign(cfg.frames, intrinsics_for(focals.focals[c], cfg.height, cfg.width));
        ep.cams.push_back(std::move(cam));
    }
    ep.normalization_constant = episode_normalization(ep.cams);

    ep.renders.resize(cfg.cameras);
    parallel_for(cfg.threads, cfg.cameras, [&](int lo, int hi) {
        for (int c = lo; c < hi; ++c)
            ep.renders[c] = render_camera(ep.scene, ep.cams[c], cfg.height, cfg.width);
    });
    return ep;
}

namespace {

std::string cam_name(int c) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "cam%02d", c);
    return buf;
}

std::string frame_name(int t, const char* ext) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%05d.%s", t, ext);
    return buf;
}

json pose_json(const Mat4& m) {
    json a = json::array();
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) a.push_back(m(r, c));
    return a;
}

json intrinsics_json(const Intrinsics& k) {
    return json::array({k.fx, 0.0, k.cx, 0.0, k.fy, k.cy, 0.0, 0.0, 1.0});
}

}  // namespace

void make_dataset(const DatasetConfig& cfg) {
    if (cfg.episodes < 1) throw ConfigError("dataset needs at least one episode");
    if (cfg.out_dir.empty()) throw ConfigError("dataset output directory not set");
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw DataError("cannot create " + cfg.out_dir + ": " + ec.message());

    const char* ext = cfg.png ? "png" : "f32";
    std::string manifest;
    for (int e = 0; e < cfg.episodes; ++e) {
        Episode ep = build_episode(cfg, e);

        json line;
        line["schema"] = 1;
        line["episode_id"] = ep.id;
        line["resolution"] = json::array({cfg.height, cfg.width});
        line["frame_count"] = cfg.frames;
        line["fps"] = cfg.fps;
        line["align_start"] = true;
        line["normalization_constant"] = ep.normalization_constant;
        line["domain"] = "synthetic-primitives";
        line["axes"] = "+x right, +y down, +z forward; camera-to-world; right-handed";
        json cams = json::array();
        for (int c = 0; c < cfg.cameras; ++c) {
            fs::path cam_dir = fs::path(cfg.out_dir) / ep.id / cam_name(c);
            fs::create_directories(cam_dir, ec);
            if (ec) throw DataError("cannot create " + cam_dir.string() + ": " + ec.message());

            json frames = json::array(), depth = json::array();
            json poses = json::array(), intr = json::array();
            for (int t = 0; t < cfg.frames; ++t) {
                std::string rel = ep.id + "/" + cam_name(c) + "/" + frame_name(t, ext);
                std::string rel_d = ep.id + "/" + cam_name(c) + "/" + frame_name(t, "depth");
                if (cfg.png)
                    png_write_file((fs::path(cfg.out_dir) / rel).string(),
                                   frame_to_image(ep.renders[c].rgb, t));
                else
                    write_frame_raw((fs::path(cfg.out_dir) / rel).string(), ep.renders[c].rgb, t);
                std::vector<float> d(ep.renders[c].depth.data.begin() +
                                         size_t(t) * cfg.height * cfg.width,
                                     ep.renders[c].depth.data.begin() +
                                         size_t(t + 1) * cfg.height * cfg.width);
                write_depth_raw((fs::path(cfg.out_dir) / rel_d).string(), d);
                frames.push_back(rel);
                depth.push_back(rel_d);
                poses.push_back(pose_json(ep.cams[c].poses[t]));
                intr.push_back(intrinsics_json(ep.cams[c].intrinsics[t]));
            }
            json cam;
            cam["id"] = cam_name(c);
            cam["frames"] = frames;
            cam["depth"] = depth;
            cam["poses"] = poses;
            cam["intrinsics"] = intr;
            cams.push_back(cam);
        }
        line["cameras"] = cams;
        manifest += line.dump();
        manifest += "\n";
    }
    write_file_text((fs::path(cfg.out_dir) / "manifest.jsonl").string(), manifest);
}

}  // namespace dualray
