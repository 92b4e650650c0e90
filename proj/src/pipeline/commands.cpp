#include "pipeline/commands.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "codec/codec.h"
#include "core/bytes.h"
#include "core/error.h"
#include "core/rng.h"
#include "diffusion/trainer.h"
#include "evalkit/warp.h"
#include "io/image_io.h"
#include "model/checkpoint.h"
#include "scenegen/dataset.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace dualray {

namespace {

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* a : allowed)
            if (it.key() == a) known = true;
        if (!known) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

template <typename T>
void get_to(const json& j, const std::string& where, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        j.at(key).get_to(out);
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

Grid4f to_signed(const Grid4f& v) {
    Grid4f out = v;
    for (float& x : out.data) x = 2.0f * x - 1.0f;
    return out;
}

Grid4f to_unit(const Grid4f& v) {
    Grid4f out = v;
    for (float& x : out.data) x = std::min(1.0f, std::max(0.0f, (x + 1.0f) * 0.5f));
    return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    RunConfig rc;
    check_keys(j, "config",
               {"seed", "out", "threads", "data", "model", "diffusion", "train", "sample", "eval",
                "warp", "project_gcd", "pluecker"});
    get_to(j, "config", "seed", rc.seed);
    get_to(j, "config", "out", rc.out);
    get_to(j, "config", "threads", rc.threads);

    if (j.contains("data")) {
        const json& s = j["data"];
        check_keys(s, "data", {"episodes", "frames", "height", "width", "cameras", "fps", "png"});
        get_to(s, "data", "episodes", rc.data.episodes);
        get_to(s, "data", "frames", rc.data.frames);
        get_to(s, "data", "height", rc.data.height);
        get_to(s, "data", "width", rc.data.width);
        get_to(s, "data", "cameras", rc.data.cameras);
        get_to(s, "data", "fps", rc.data.fps);
        get_to(s, "data", "png", rc.data.png);
    }
    if (j.contains("model")) {
        const json& s = j["model"];
        check_keys(s, "model", {"latent_d", "model_dim", "depth", "heads", "rope_base"});
        get_to(s, "model", "latent_d", rc.model.latent_d);
        get_to(s, "model", "model_dim", rc.model.model_dim);
        get_to(s, "model", "depth", rc.model.depth);
        get_to(s, "model", "heads", rc.model.heads);
        get_to(s, "model", "rope_base", rc.model.rope_base);
    }
    if (j.contains("diffusion")) {
        const json& s = j["diffusion"];
        check_keys(s, "diffusion", {"schedule_steps", "sample_steps", "samples_per_condition"});
        get_to(s, "diffusion", "schedule_steps", rc.diffusion.schedule_steps);
        get_to(s, "diffusion", "sample_steps", rc.diffusion.sample_steps);
        get_to(s, "diffusion", "samples_per_condition", rc.diffusion.samples_per_condition);
    }
    if (j.contains("train")) {
        const json& s = j["train"];
        check_keys(s, "train",
                   {"steps", "lr", "checkpoint_every", "log_every", "dataset", "input_camera",
                    "target_camera", "resume"});
        get_to(s, "train", "steps", rc.train.steps);
        get_to(s, "train", "lr", rc.train.lr);
        get_to(s, "train", "checkpoint_every", rc.train.checkpoint_every);
        get_to(s, "train", "log_every", rc.train.log_every);
        get_to(s, "train", "dataset", rc.train.dataset);
        get_to(s, "train", "input_camera", rc.train.input_camera);
        get_to(s, "train", "target_camera", rc.train.target_camera);
        get_to(s, "train", "resume", rc.train.resume);
    }
    if (j.contains("sample")) {
        const json& s = j["sample"];
        check_keys(s, "sample",
                   {"checkpoint", "dataset", "episode", "input_camera", "target_camera",
                    "dump_latents", "dump_pluecker"});
        get_to(s, "sample", "checkpoint", rc.sample.checkpoint);
        get_to(s, "sample", "dataset", rc.sample.dataset);
        get_to(s, "sample", "episode", rc.sample.episode);
        get_to(s, "sample", "input_camera", rc.sample.input_camera);
        get_to(s, "sample", "target_camera", rc.sample.target_camera);
        get_to(s, "sample", "dump_latents", rc.sample.dump_latents);
        get_to(s, "sample", "dump_pluecker", rc.sample.dump_pluecker);
    }
    if (j.contains("eval")) {
        const json& s = j["eval"];
        check_keys(s, "eval",
                   {"dataset", "generator", "checkpoint", "window", "input_camera",
                    "target_camera", "heatmap_samples"});
        get_to(s, "eval", "dataset", rc.eval.dataset);
        get_to(s, "eval", "generator", rc.eval.generator);
        get_to(s, "eval", "checkpoint", rc.eval.checkpoint);
        get_to(s, "eval", "window", rc.eval.window);
        get_to(s, "eval", "input_camera", rc.eval.input_camera);
        get_to(s, "eval", "target_camera", rc.eval.target_camera);
        get_to(s, "eval", "heatmap_samples", rc.eval.heatmap_samples);
    }
    if (j.contains("warp")) {
        const json& s = j["warp"];
        check_keys(s, "warp", {"dataset", "episode", "input_camera", "target_camera"});
        get_to(s, "warp", "dataset", rc.warp.dataset);
        get_to(s, "warp", "episode", rc.warp.episode);
        get_to(s, "warp", "input_camera", rc.warp.input_camera);
        get_to(s, "warp", "target_camera", rc.warp.target_camera);
    }
    if (j.contains("project_gcd")) {
        const json& s = j["project_gcd"];
        check_keys(s, "project_gcd", {"dataset", "episode", "input_camera", "target_camera",
                                      "anchor"});
        get_to(s, "project_gcd", "dataset", rc.project_gcd.dataset);
        get_to(s, "project_gcd", "episode", rc.project_gcd.episode);
        get_to(s, "project_gcd", "input_camera", rc.project_gcd.input_camera);
        get_to(s, "project_gcd", "target_camera", rc.project_gcd.target_camera);
        get_to(s, "project_gcd", "anchor", rc.project_gcd.anchor);
    }
    if (j.contains("pluecker")) {
        const json& s = j["pluecker"];
        check_keys(s, "pluecker", {"dataset", "episode", "camera"});
        get_to(s, "pluecker", "dataset", rc.pluecker.dataset);
        get_to(s, "pluecker", "episode", rc.pluecker.episode);
        get_to(s, "pluecker", "camera", rc.pluecker.camera);
    }
    return rc;
}

std::string resolved_config_json(const RunConfig& rc) {
    json j;
    j["seed"] = rc.seed;
    j["out"] = rc.out;
    j["threads"] = rc.threads;
    j["data"] = {{"episodes", rc.data.episodes}, {"frames", rc.data.frames},
                 {"height", rc.data.height},    {"width", rc.data.width},
                 {"cameras", rc.data.cameras},  {"fps", rc.data.fps},
                 {"png", rc.data.png}};
    j["model"] = {{"latent_d", rc.model.latent_d},
                  {"model_dim", rc.model.model_dim},
                  {"depth", rc.model.depth},
                  {"heads", rc.model.heads},
                  {"rope_base", rc.model.rope_base}};
    j["diffusion"] = {{"schedule_steps", rc.diffusion.schedule_steps},
                      {"sample_steps", rc.diffusion.sample_steps},
                      {"samples_per_condition", rc.diffusion.samples_per_condition}};
    j["train"] = {{"steps", rc.train.steps},
                  {"lr", rc.train.lr},
                  {"checkpoint_every", rc.train.checkpoint_every},
                  {"log_every", rc.train.log_every},
                  {"dataset", rc.train.dataset},
                  {"input_camera", rc.train.input_camera},
                  {"target_camera", rc.train.target_camera},
                  {"resume", rc.train.resume}};
    j["sample"] = {{"checkpoint", rc.sample.checkpoint},
                   {"dataset", rc.sample.dataset},
                   {"episode", rc.sample.episode},
                   {"input_camera", rc.sample.input_camera},
                   {"target_camera", rc.sample.target_camera},
                   {"dump_latents", rc.sample.dump_latents},
                   {"dump_pluecker", rc.sample.dump_pluecker}};
    j["eval"] = {{"dataset", rc.eval.dataset},
                 {"generator", rc.eval.generator},
                 {"checkpoint", rc.eval.checkpoint},
                 {"window", rc.eval.window},
                 {"input_camera", rc.eval.input_camera},
                 {"target_camera", rc.eval.target_camera},
                 {"heatmap_samples", rc.eval.heatmap_samples}};
    j["warp"] = {{"dataset", rc.warp.dataset},
                 {"episode", rc.warp.episode},
                 {"input_camera", rc.warp.input_camera},
                 {"target_camera", rc.warp.target_camera}};
    j["project_gcd"] = {{"dataset", rc.project_gcd.dataset},
                        {"episode", rc.project_gcd.episode},
                        {"input_camera", rc.project_gcd.input_camera},
                        {"target_camera", rc.project_gcd.target_camera},
                        {"anchor", rc.project_gcd.anchor}};
    j["pluecker"] = {{"dataset", rc.pluecker.dataset},
                     {"episode", rc.pluecker.episode},
                     {"camera", rc.pluecker.camera}};
    return j.dump(2) + "\n";
}

PairBundle build_pair_bundle(const EpisodeManifest& ep, const std::string& input_id,
                             const std::string& target_id) {
    const ManifestCamera& cam_in = find_camera(ep, input_id);
    const ManifestCamera& cam_tgt = find_camera(ep, target_id);
    Trajectory tin = camera_trajectory(cam_in);
    Trajectory ttg = camera_trajectory(cam_tgt);
    canonicalize_pair(ttg, tin);
    double norm = resolve_normalization(ep, cam_tgt, cam_in);
    normalize_translations(tin.poses, norm);
    normalize_translations(ttg.poses, norm);

    PairBundle b;
    b.pluecker_x = pluecker_from_camera(tin, ep.height, ep.width);
    b.pluecker_y = pluecker_from_camera(ttg, ep.height, ep.width);
    b.pair.v_x = encode_video(to_signed(load_video(ep, cam_in)));
    b.pair.v_y = encode_video(to_signed(load_video(ep, cam_tgt)));
    b.pair.p_x = encode_pluecker(b.pluecker_x);
    b.pair.p_y = encode_pluecker(b.pluecker_y);
    return b;
}

EpisodePair build_pair(const EpisodeManifest& ep, const std::string& input_id,
                       const std::string& target_id) {
    return build_pair_bundle(ep, input_id, target_id).pair;
}

Generator make_model_generator(Params<float> params, NoiseSchedule sched, int sample_steps) {
    auto p = std::make_shared<Params<float>>(std::move(params));
    auto s = std::make_shared<NoiseSchedule>(std::move(sched));
    return [p, s, sample_steps](const WindowTask& task) {
        EpisodePair cond;
        cond.v_x = encode_video(to_signed(task.input_rgb));
        cond.p_x = encode_pluecker(pluecker_from_camera(task.input_cam, task.height, task.width));
        cond.p_y = encode_pluecker(pluecker_from_camera(task.target_cam, task.height, task.width));
        SamplerConfig scfg;
        scfg.steps = sample_steps;
        scfg.seed = task.seed;
        Grid4f latent = sample_target_latent(*p, cond, *s, scfg);
        return to_unit(decode_video(latent));
    };
}

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? int(hc) : 1;
}

bool episode_selected(const std::string& filter, const EpisodeManifest& ep) {
    return filter.empty() || ep.episode_id == filter;
}

void require_selection(const std::string& filter, int matched, const std::string& dataset) {
    if (matched == 0)
        throw DataError(filter.empty() ? dataset + ": no episodes"
                                       : dataset + ": no episode named " + filter);
}

void cmd_gen_data(const RunConfig& rc) {
    DatasetConfig dc;
    dc.episodes = rc.data.episodes;
    dc.frames = rc.data.frames;
    dc.height = rc.data.height;
    dc.width = rc.data.width;
    dc.cameras = rc.data.cameras;
    dc.fps = rc.data.fps;
    dc.png = rc.data.png;
    dc.seed = rc.seed;
    dc.threads = rc.threads;
    dc.out_dir = rc.out;
    make_dataset(dc);
    std::printf("wrote %d episode(s) to %s\n", dc.episodes, rc.out.c_str());
}

void cmd_train(const RunConfig& rc) {
    if (rc.train.dataset.empty()) throw ConfigError("train.dataset not set");
    validate_config(rc.model);

    std::vector<EpisodeManifest> eps = load_manifests(rc.train.dataset);
    std::vector<EpisodePair> pairs;
    for (const EpisodeManifest& ep : eps)
        pairs.push_back(build_pair(ep, rc.train.input_camera, rc.train.target_camera));

    Params<float> params;
    int start_step = 0;
    if (!rc.train.resume.empty()) {
        Checkpoint ck = load_checkpoint(rc.train.resume);
        if (ck.seed != rc.seed)
            throw ConfigError("resume: checkpoint was trained with a different seed");
        params = params_from_checkpoint(ck, rc.model);
        start_step = int(ck.step);
    } else {
        init_params(params, rc.model, rc.seed);
    }

    NoiseSchedule sched = make_cosine_schedule(rc.diffusion.schedule_steps);
    TrainConfig tc;
    tc.total_steps = rc.train.steps;
    tc.lr = rc.train.lr;
    tc.checkpoint_every = rc.train.checkpoint_every;
    tc.log_every = rc.train.log_every;
    tc.seed = rc.seed;

    std::ofstream log(fs::path(rc.out) / "loss_log.txt",
                      start_step > 0 ? std::ios::app : std::ios::trunc);
    if (!log) throw DataError("cannot open loss log in " + rc.out);

    TrainHooks hooks;
    hooks.on_log = [&](int step, double loss) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "step %d loss %.6f", step, loss);
        log << buf << "\n";
        log.flush();
        std::printf("%s\n", buf);
    };
    hooks.on_checkpoint = [&](int step, const Params<float>& p) {
        char name[32];
        std::snprintf(name, sizeof(name), "ckpt_%06d.drck", step);
        save_checkpoint((fs::path(rc.out) / name).string(), p, uint64_t(step), rc.seed);
    };
    train_loop(params, pairs, sched, tc, start_step, hooks);
}

void cmd_sample(const RunConfig& rc) {
    if (rc.sample.checkpoint.empty()) throw ConfigError("sample.checkpoint not set");
    if (rc.sample.dataset.empty()) throw ConfigError("sample.dataset not set");
    validate_config(rc.model);

    Checkpoint ck = load_checkpoint(rc.sample.checkpoint);
    Params<float> params = params_from_checkpoint(ck, rc.model);
    NoiseSchedule sched = make_cosine_schedule(rc.diffusion.schedule_steps);

    std::vector<EpisodeManifest> eps = load_manifests(rc.sample.dataset);
    int matched = 0;
    for (size_t ei = 0; ei < eps.size(); ++ei) {
        const EpisodeManifest& ep = eps[ei];
        if (!episode_selected(rc.sample.episode, ep)) continue;
        ++matched;
        PairBundle bundle =
            build_pair_bundle(ep, rc.sample.input_camera, rc.sample.target_camera);
        fs::path ep_dir = fs::path(rc.out) / ep.episode_id;
        std::error_code ec;
        fs::create_directories(ep_dir, ec);
        if (ec) throw DataError("cannot create " + ep_dir.string());

        for (int k = 0; k < rc.diffusion.samples_per_condition; ++k) {
            SamplerConfig scfg;
            scfg.steps = rc.diffusion.sample_steps;
            scfg.seed = mix_seed(mix_seed(rc.seed, 0x73616d70, ei), uint64_t(k));
            Grid4f latent = sample_target_latent(params, bundle.pair, sched, scfg);
            Grid4f video = to_unit(decode_video(latent));

            char sk[24];
            std::snprintf(sk, sizeof(sk), "sample%02d", k);
            fs::create_directories(ep_dir / sk, ec);
            if (ec) throw DataError("cannot create " + (ep_dir / sk).string());
            for (int t = 0; t < video.d0; ++t) {
                char fn[24];
                std::snprintf(fn, sizeof(fn), "%05d.png", t);
                png_write_file((ep_dir / sk / fn).string(), frame_to_image(video, t));
            }
            if (rc.sample.dump_latents)
                write_latent((ep_dir / (std::string(sk) + ".lat")).string(), latent, ep.height,
                             ep.width);
        }
        if (rc.sample.dump_pluecker) {
            write_latent((ep_dir / "pluecker_input.f32").string(), bundle.pluecker_x, ep.height,
                         ep.width);
            write_latent((ep_dir / "pluecker_target.f32").string(), bundle.pluecker_y, ep.height,
                         ep.width);
        }
    }
    require_selection(rc.sample.episode, matched, rc.sample.dataset);
}

void cmd_eval(const RunConfig& rc) {
    if (rc.eval.dataset.empty()) throw ConfigError("eval.dataset not set");
    Generator gen;
    if (rc.eval.generator == "copy") {
        gen = make_copy_generator();
    } else if (rc.eval.generator == "warp") {
        gen = make_warp_generator();
    } else if (rc.eval.generator == "model") {
        if (rc.eval.checkpoint.empty()) throw ConfigError("eval.checkpoint not set");
        validate_config(rc.model);
        Checkpoint ck = load_checkpoint(rc.eval.checkpoint);
        gen = make_model_generator(params_from_checkpoint(ck, rc.model),
                                   make_cosine_schedule(rc.diffusion.schedule_steps),
                                   rc.diffusion.sample_steps);
    } else {
        throw ConfigError("eval.generator must be copy, warp or model");
    }

    std::vector<EpisodeManifest> eps = load_manifests(rc.eval.dataset);
    EvalConfig ec;
    ec.window = rc.eval.window;
    ec.seed = rc.seed;

    std::vector<MetricReport> reports;
    for (const EpisodeManifest& ep : eps) {
        try {
            reports.push_back(evaluate_episode(ep, gen, rc.eval.input_camera,
                                               rc.eval.target_camera, ec));
        } catch (const Error& e) {
            std::fprintf(stderr, "eval: %s failed: %s\n", ep.episode_id.c_str(), e.what());
        }
    }
    if (reports.empty()) throw DataError("eval: every episode failed");
    write_metrics_csv((fs::path(rc.out) / "metrics.csv").string(), reports);
    write_metrics_json((fs::path(rc.out) / "summary.json").string(), reports);

    if (rc.eval.heatmap_samples >= 2) {
        for (const EpisodeManifest& ep : eps) {
            try {
                std::vector<Grid4f> samples;
                for (int k = 0; k < rc.eval.heatmap_samples; ++k) {
                    EvalConfig ek = ec;
                    ek.seed = mix_seed(rc.seed, 0x756e636b, uint64_t(k));
                    samples.push_back(run_protocol(ep, gen, rc.eval.input_camera,
                                                   rc.eval.target_camera, ek));
                }
                UncertaintyMap map = uncertainty_heatmap(samples);
                std::string base = (fs::path(rc.out) / ("heatmap_" + ep.episode_id)).string();
                write_heatmap_png(base + ".png", map);
                write_heatmap_raw(base + ".raw", map);
            } catch (const Error& e) {
                std::fprintf(stderr, "eval: heatmap for %s failed: %s\n", ep.episode_id.c_str(),
                             e.what());
            }
        }
    }
    std::printf("evaluated %zu episode(s) into %s\n", reports.size(), rc.out.c_str());
}

void cmd_warp(const RunConfig& rc) {
    if (rc.warp.dataset.empty()) throw ConfigError("warp.dataset not set");
    std::vector<EpisodeManifest> eps = load_manifests(rc.warp.dataset);
    int matched = 0;
    for (const EpisodeManifest& ep : eps) {
        if (!episode_selected(rc.warp.episode, ep)) continue;
        ++matched;
        const ManifestCamera& cam_in = find_camera(ep, rc.warp.input_camera);
        const ManifestCamera& cam_tgt = find_camera(ep, rc.warp.target_camera);
        Grid4f rgb = load_video(ep, cam_in);
        Grid4f depth = load_depth(ep, cam_in);
        WarpResult w = depth_warp(rgb, depth, camera_trajectory(cam_in),
                                  camera_trajectory(cam_tgt));

        fs::path dir = fs::path(rc.out) / ep.episode_id;
        std::error_code ecode;
        fs::create_directories(dir, ecode);
        if (ecode) throw DataError("cannot create " + dir.string());
        for (int t = 0; t < w.rgb.d0; ++t) {
            char fn[32];
            std::snprintf(fn, sizeof(fn), "warp_%05d.png", t);
            png_write_file((dir / fn).string(), frame_to_image(w.rgb, t));
            ImageU8 mask;
            mask.width = ep.width;
            mask.height = ep.height;
            mask.channels = 1;
            mask.pixels.resize(size_t(ep.width) * ep.height);
            for (int y = 0; y < ep.height; ++y)
                for (int x = 0; x < ep.width; ++x)
                    mask.pixels[size_t(y) * ep.width + x] = w.mask(t, y, x, 0) ? 255 : 0;
            std::snprintf(fn, sizeof(fn), "mask_%05d.png", t);
            png_write_file((dir / fn).string(), mask);
        }
    }
    require_selection(rc.warp.episode, matched, rc.warp.dataset);
}

void cmd_project_gcd(const RunConfig& rc) {
    if (rc.project_gcd.dataset.empty()) throw ConfigError("project_gcd.dataset not set");
    GcdAnchor anchor;
    if (rc.project_gcd.anchor == "middle")
        anchor = GcdAnchor::Middle;
    else if (rc.project_gcd.anchor == "last")
        anchor = GcdAnchor::Last;
    else
        throw ConfigError("project_gcd.anchor must be middle or last");

    std::vector<EpisodeManifest> eps = load_manifests(rc.project_gcd.dataset);
    json rows = json::array();
    int matched = 0;
    for (const EpisodeManifest& ep : eps) {
        if (!episode_selected(rc.project_gcd.episode, ep)) continue;
        ++matched;
        const ManifestCamera& cam_in = find_camera(ep, rc.project_gcd.input_camera);
        const ManifestCamera& cam_tgt = find_camera(ep, rc.project_gcd.target_camera);
        Trajectory tin = camera_trajectory(cam_in);
        Trajectory ttg = camera_trajectory(cam_tgt);
        canonicalize_pair(ttg, tin);
        double norm = resolve_normalization(ep, cam_tgt, cam_in);
        normalize_translations(tin.poses, norm);
        normalize_translations(ttg.poses, norm);

        int idx = anchor == GcdAnchor::Middle ? int(tin.poses.size()) / 2
                                              : int(tin.poses.size()) - 1;
        GcdPose gin = project_pose_to_gcd(tin.poses[idx]);
        GcdPose gtg = project_pose_to_gcd(ttg.poses[idx]);
        GcdControl delta = project_to_gcd(ttg, tin, anchor);
        rows.push_back(
            {{"episode_id", ep.episode_id},
             {"anchor", rc.project_gcd.anchor},
             {"normalization_constant", norm},
             {"input", {{"azimuth", gin.azimuth}, {"elevation", gin.elevation},
                        {"radius", gin.radius}}},
             {"target", {{"azimuth", gtg.azimuth}, {"elevation", gtg.elevation},
                         {"radius", gtg.radius}}},
             {"delta", {{"azimuth", delta.delta_azimuth}, {"elevation", delta.delta_elevation},
                        {"radius", delta.delta_radius}}}});
    }
    require_selection(rc.project_gcd.episode, matched, rc.project_gcd.dataset);
    write_file_text((fs::path(rc.out) / "gcd.json").string(), rows.dump(2) + "\n");
}

void cmd_pluecker(const RunConfig& rc) {
    if (rc.pluecker.dataset.empty()) throw ConfigError("pluecker.dataset not set");
    std::vector<EpisodeManifest> eps = load_manifests(rc.pluecker.dataset);
    int matched = 0;
    for (const EpisodeManifest& ep : eps) {
        if (!episode_selected(rc.pluecker.episode, ep)) continue;
        ++matched;
        const ManifestCamera& cam = find_camera(ep, rc.pluecker.camera);
        Trajectory traj = camera_trajectory(cam);
        traj.poses = canonicalize_trajectory(traj.poses, traj.poses.front());
        double norm = ep.has_normalization ? ep.normalization_constant
                                           : translation_scale({&traj.poses});
        normalize_translations(traj.poses, norm);
        Grid4f map = pluecker_from_camera(traj, ep.height, ep.width);
        std::string name = "pluecker_" + ep.episode_id + "_" + cam.id + ".f32";
        write_latent((fs::path(rc.out) / name).string(), map, ep.height, ep.width);
    }
    require_selection(rc.pluecker.episode, matched, rc.pluecker.dataset);
}

}  // namespace

void run_command(const std::string& command, const RunConfig& rc_in) {
    RunConfig rc = rc_in;
    rc.threads = resolve_threads(rc.threads);
    if (rc.out.empty()) throw ConfigError("output directory not set");
    std::error_code ec;
    fs::create_directories(rc.out, ec);
    if (ec) throw DataError("cannot create " + rc.out + ": " + ec.message());
    write_file_text((fs::path(rc.out) / "resolved_config.json").string(),
                    resolved_config_json(rc));

    if (command == "gen-data")
        cmd_gen_data(rc);
    else if (command == "train")
        cmd_train(rc);
    else if (command == "sample")
        cmd_sample(rc);
    else if (command == "eval")
        cmd_eval(rc);
    else if (command == "warp")
        cmd_warp(rc);
    else if (command == "project-gcd")
        cmd_project_gcd(rc);
    else if (command == "pluecker")
        cmd_pluecker(rc);
    else
        throw ConfigError("unknown command: " + command);
}

}  // namespace dualray
