// Acceptance gate: nine numbered criteria, one PASS/FAIL line each, exit
// code is the number of failures. argv[1] is the CLI binary used by the
// determinism criterion. Criteria 5 and 8 share one trained model, so the
// binary runs them in order and the whole gate takes about half an hour.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "../test_util.h"
#include "codec/codec.h"
#include "core/bytes.h"
#include "core/error.h"
#include "core/rng.h"
#include "diffusion/trainer.h"
#include "evalkit/evaluate.h"
#include "evalkit/warp.h"
#include "geometry/geometry.h"
#include "model/net.h"
#include "pipeline/commands.h"
#include "scenegen/dataset.h"
#include "scenegen/trajectories.h"

using namespace dualray;
using dualray::testutil::random_pose;
using dualray::testutil::random_rotation;

namespace {

namespace fs = std::filesystem;
using clk = std::chrono::steady_clock;

// Overfit settings shared by criteria 5 and 8. The dataset seed fixes four
// concrete scenes; steps and lr were tuned once so the trained model clears
// the copy baseline with margin inside the runtime budget.
constexpr uint64_t kOverfitSeed = 9;
constexpr int kOverfitSteps = 3000;
constexpr double kOverfitLr = 2e-3;

struct Gate {
    bool ok = true;
    std::string note;
    void expect(bool cond, const std::string& what) {
        if (!cond && ok) note = what;
        ok = ok && cond;
    }
};

struct Overfit {
    bool trained = false;
    std::vector<EpisodeManifest> episodes;
    Params<float> params;
    NoiseSchedule sched;
};

std::string scratch_dir(const std::string& stem) {
    fs::path p = fs::temp_directory_path() / stem;
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

Mat3 rot_y(double a) {
    Mat3 r;
    r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
    return r;
}

// Rotation whose forward (third) column points along f.
Mat3 rot_with_forward(const Vec3& f) {
    Vec3 fwd = f.normalized();
    Vec3 helper = std::abs(fwd.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
    Vec3 a = fwd.cross(helper).normalized();
    Vec3 b = fwd.cross(a);
    Mat3 r;
    r.col(0) = a;
    r.col(1) = b;
    r.col(2) = fwd;
    return r;
}

Trajectory one_pose_traj(const Mat4& pose, const Intrinsics& k) {
    Trajectory t;
    t.poses = {pose};
    t.intrinsics = {k};
    return t;
}

Trajectory orbit_camera(double angle0, int h, int w) {
    TrajectorySpec spec;
    spec.family = TrajFamily::Radial;
    spec.angle0 = angle0;
    spec.sweep = 0.0;
    spec.radius = 3.0;
    spec.elevation = 0.15;
    Trajectory cam;
    cam.poses = generate_trajectory(spec, 1);
    cam.intrinsics.assign(1, intrinsics_for(35.0, h, w));
    return cam;
}

double grid_energy(const Grid4f& g) {
    double e = 0;
    for (float v : g.data) e += double(v) * v;
    return e;
}

Grid4f random_video(Rng& rng, int t, int h, int w, double amp) {
    Grid4f v(t, h, w, 3);
    for (float& x : v.data) x = float(rng.uniform(-amp, amp));
    return v;
}

// criterion 1: analytic ray-map cases, gauge invariance of the canonical
// pair, and hand-computed pose-delta projections.
bool crit1(std::string& note) {
    Gate g;
    Intrinsics center{1, 1, 0.5, 0.5};

    Grid4f m = pluecker_from_camera(one_pose_traj(Mat4::Identity(), center), 1, 1);
    g.expect(m.d3 == 6, "identity map width");
    float want_id[6] = {0, 0, 1, 0, 0, 0};
    for (int c = 0; c < 6; ++c)
        g.expect(std::abs(m(0, 0, 0, c) - want_id[c]) < 1e-6, "identity ray");

    m = pluecker_from_camera(one_pose_traj(make_pose(Mat3::Identity(), Vec3(1, 0, 0)), center),
                             1, 1);
    float want_tr[6] = {0, 0, 1, 0, 1, 0};  // moment = r x origin
    for (int c = 0; c < 6; ++c)
        g.expect(std::abs(m(0, 0, 0, c) - want_tr[c]) < 1e-6, "translated ray");

    m = pluecker_from_camera(one_pose_traj(make_pose(rot_y(M_PI / 2), Vec3::Zero()), center), 1,
                             1);
    float want_rot[6] = {1, 0, 0, 0, 0, 0};
    for (int c = 0; c < 6; ++c)
        g.expect(std::abs(m(0, 0, 0, c) - want_rot[c]) < 1e-6, "rotated ray");

    // Canonicalized pose pairs and their ray maps ignore the world gauge.
    Rng rng(99);
    Intrinsics k{30, 30, 15.5, 15.5};
    for (int trial = 0; trial < 100; ++trial) {
        Trajectory target, input;
        for (int f = 0; f < 3; ++f) {
            target.poses.push_back(random_pose(rng, 0.4));
            input.poses.push_back(random_pose(rng, 0.4));
            target.intrinsics.push_back(k);
            input.intrinsics.push_back(k);
        }
        Mat4 world = random_pose(rng);
        Trajectory target_g = target, input_g = input;
        for (auto& p : target_g.poses) p = world * p;
        for (auto& p : input_g.poses) p = world * p;
        canonicalize_pair(target, input);
        canonicalize_pair(target_g, input_g);
        for (int f = 0; f < 3; ++f) {
            g.expect((target.poses[f] - target_g.poses[f]).cwiseAbs().maxCoeff() < 1e-6,
                     "gauge pose target");
            g.expect((input.poses[f] - input_g.poses[f]).cwiseAbs().maxCoeff() < 1e-6,
                     "gauge pose input");
        }
        Grid4f ma = pluecker_from_camera(input, 8, 8);
        Grid4f mb = pluecker_from_camera(input_g, 8, 8);
        for (size_t i = 0; i < ma.data.size(); ++i)
            g.expect(std::abs(ma.data[i] - mb.data[i]) < 1e-6, "gauge ray map");
    }

    // Quarter azimuth difference at equal radius.
    GcdPose in = project_pose_to_gcd(make_pose(rot_with_forward(Vec3(1, 0, 0)), Vec3(0, 0, 5)));
    GcdPose tg = project_pose_to_gcd(make_pose(rot_with_forward(Vec3(0, 1, 0)), Vec3(3, 4, 0)));
    g.expect(std::abs(in.azimuth) < 1e-9, "gcd azimuth");
    g.expect(std::abs(in.elevation) < 1e-9, "gcd elevation");
    g.expect(std::abs(in.radius - 5.0) < 1e-9, "gcd radius");
    GcdControl d = gcd_delta(in, tg);
    g.expect(std::abs(d.delta_azimuth - M_PI / 2) < 1e-9, "gcd delta azimuth");
    g.expect(std::abs(d.delta_elevation) < 1e-9, "gcd delta elevation");
    g.expect(std::abs(d.delta_radius) < 1e-9, "gcd delta radius");

    // Identical poses give zero deltas; azimuth wraps the short way.
    Rng rng2(3);
    for (int i = 0; i < 10; ++i) {
        GcdPose p = project_pose_to_gcd(random_pose(rng2));
        GcdControl z = gcd_delta(p, p);
        g.expect(std::abs(z.delta_azimuth) < 1e-9, "gcd self azimuth");
        g.expect(std::abs(z.delta_elevation) < 1e-9, "gcd self elevation");
        g.expect(std::abs(z.delta_radius) < 1e-9, "gcd self radius");
    }
    double a = 3 * M_PI / 4;
    GcdControl wrap = gcd_delta(
        project_pose_to_gcd(make_pose(rot_with_forward(Vec3(std::cos(a), std::sin(a), 0)),
                                      Vec3(1, 0, 0))),
        project_pose_to_gcd(make_pose(rot_with_forward(Vec3(std::cos(-a), std::sin(-a), 0)),
                                      Vec3(1, 0, 0))));
    g.expect(std::abs(wrap.delta_azimuth - M_PI / 2) < 1e-9, "gcd wrap");

    note = g.note;
    return g.ok;
}

// criterion 2: codec round trip, projection idempotence, energy bound, and
// the fixed compression ratios.
bool crit2(std::string& note) {
    Gate g;

    Grid4f v(4, 8, 8, 3);
    for (float& x : v.data) x = 0.5f;
    Grid4f back = decode_video(encode_video(v));
    g.expect(back.same_shape(v), "constant shape");
    for (float x : back.data) g.expect(x == 0.5f, "constant round trip not exact");

    Rng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        Grid4f r = random_video(rng, 4, 16, 16, 0.4);
        Grid4f once = decode_video(encode_video(r));
        Grid4f twice = decode_video(encode_video(once));
        for (size_t i = 0; i < once.data.size(); ++i)
            g.expect(std::abs(once.data[i] - twice.data[i]) < 1e-6, "projection idempotence");
    }

    Rng rng2(13);
    for (int trial = 0; trial < 100; ++trial) {
        Grid4f r = random_video(rng2, 4, 8, 8, 1.0);
        g.expect(grid_energy(encode_video(r)) <= grid_energy(r) + 1e-6, "kept energy bound");
    }

    CodecSpec spec;
    g.expect(spec.temporal_factor == 4, "temporal factor");
    g.expect(spec.spatial_factor == 8, "spatial factor");
    g.expect(spec.latent_width == 16, "latent width");
    Grid4f lat = encode_video(Grid4f(8, 16, 24, 3));
    g.expect(lat.d0 == 2 && lat.d1 == 2 && lat.d2 == 3 && lat.d3 == 16, "latent shape");
    Grid4f dec = decode_video(lat);
    g.expect(dec.d0 == 8 && dec.d1 == 16 && dec.d2 == 24 && dec.d3 == 3, "decoded shape");

    note = g.note;
    return g.ok;
}

// criterion 3: token count and width across random shapes.
bool crit3(std::string& note) {
    Gate g;
    {
        Grid4f vx(2, 4, 4, 16), px(2, 4, 4, 32), vy(2, 4, 4, 16), py(2, 4, 4, 32);
        TokenSequence seq = assemble_tokens(vx, px, vy, py);
        g.expect(seq.rows() == 64, "token count d=16");
        g.expect(seq.width() == 48, "token width d=16");
    }
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        int t = 1 + int(rng.uniform_index(4));
        int h = 1 + int(rng.uniform_index(5));
        int w = 1 + int(rng.uniform_index(5));
        int d = 1 + int(rng.uniform_index(20));
        Grid4f vx(t, h, w, d), px(t, h, w, 2 * d), vy(t, h, w, d), py(t, h, w, 2 * d);
        TokenSequence seq = assemble_tokens(vx, px, vy, py);
        g.expect(seq.rows() == 2 * t * h * w, "token count");
        g.expect(seq.width() == 3 * d, "token width");
    }
    note = g.note;
    return g.ok;
}

// criterion 4: reverse-mode parameter gradient against central differences
// in 64-bit mode on the tiny configuration.
bool crit4(std::string& note) {
    Gate g;
    ModelConfig cfg;
    cfg.latent_d = 4;
    cfg.model_dim = 24;
    cfg.depth = 2;
    cfg.heads = 2;

    Params<double> p;
    shape_params(p, cfg);
    Rng prng(2024);
    visit_params(p, [&](auto& t) {
        for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = prng.uniform(-0.08, 0.08);
    });

    Rng rng(55);
    auto fill = [&rng](Grid4f& grid) {
        for (float& x : grid.data) x = float(rng.uniform(-0.8, 0.8));
    };
    Grid4f vx(2, 2, 2, 4), px(2, 2, 2, 8), vy(2, 2, 2, 4), py(2, 2, 2, 8);
    fill(vx);
    fill(px);
    fill(vy);
    fill(py);
    TokenSequence seq = assemble_tokens(vx, px, vy, py);
    double sigma = 0.37;
    MatRM<double> target(8, cfg.latent_d);
    for (Eigen::Index i = 0; i < target.size(); ++i) target.data()[i] = rng.uniform(-0.5, 0.5);

    Params<double> grad;
    shape_params(grad, cfg);
    net_loss_grad(p, seq, sigma, target, grad);

    std::vector<double> flat, gflat;
    params_to_flat(p, flat);
    params_to_flat(grad, gflat);
    g.expect(flat.size() == gflat.size(), "gradient size");

    const double h = 1e-4;
    Params<double> probe;
    shape_params(probe, cfg);
    for (int trial = 0; trial < 50; ++trial) {
        size_t i = rng.uniform_index(flat.size());
        std::vector<double> bump = flat;
        bump[i] = flat[i] + h;
        params_from_flat(probe, bump);
        double lp = (net_forward(probe, seq, sigma) - target).squaredNorm();
        bump[i] = flat[i] - h;
        params_from_flat(probe, bump);
        double lm = (net_forward(probe, seq, sigma) - target).squaredNorm();

        double fd = (lp - lm) / (2 * h) / double(target.size());
        double an = gflat[i];
        double rel = std::abs(fd - an) / std::max(1e-8, std::max(std::abs(fd), std::abs(an)));
        g.expect(rel < 1e-4 || std::abs(fd - an) < 1e-12,
                 "coordinate " + std::to_string(i) + " rel " + std::to_string(rel));
    }
    note = g.note;
    return g.ok;
}

// criterion 5: the default model overfits four synthetic episodes well past
// the copy-input baseline. The trained model is kept for criterion 8.
bool crit5(std::string& note, Overfit& of) {
    Gate g;
    std::string dir = scratch_dir("dualray_acceptance_overfit");

    DatasetConfig dc;
    dc.episodes = 4;
    dc.frames = 8;
    dc.height = 64;
    dc.width = 64;
    dc.cameras = 2;
    dc.seed = kOverfitSeed;
    dc.out_dir = dir;
    make_dataset(dc);
    of.episodes = load_manifests(dir + "/manifest.jsonl");
    g.expect(of.episodes.size() == 4, "episode count");

    std::vector<EpisodePair> pairs;
    for (const auto& ep : of.episodes) pairs.push_back(build_pair(ep, "cam00", "cam01"));

    ModelConfig mc;
    init_params(of.params, mc, kOverfitSeed);
    of.sched = make_cosine_schedule(1000);

    TrainConfig tc;
    tc.total_steps = kOverfitSteps;
    tc.lr = kOverfitLr;
    tc.log_every = 0;
    tc.checkpoint_every = 0;
    tc.seed = kOverfitSeed;
    train_loop(of.params, pairs, of.sched, tc, 0, {});
    of.trained = true;

    EvalConfig ec;
    ec.window = 8;
    ec.seed = kOverfitSeed;
    Generator model_gen = make_model_generator(of.params, of.sched, 50);
    Generator copy_gen = make_copy_generator();
    double copy_mean = 0, model_mean = 0;
    for (const auto& ep : of.episodes) {
        copy_mean += evaluate_episode(ep, copy_gen, "cam00", "cam01", ec).psnr_mean / 4;
        model_mean += evaluate_episode(ep, model_gen, "cam00", "cam01", ec).psnr_mean / 4;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "model %.2f dB vs copy %.2f dB", model_mean, copy_mean);
    g.expect(model_mean >= copy_mean + 3.0, std::string(buf) + ", needs +3");
    note = buf;
    return g.ok;
}

// criterion 6: depth-warp against rendered ground truth. Co-visible means a
// splat landed and its distance matches the target view's own depth within
// 1%; consistency is the mean A->B->A reprojection distance on those pixels.
bool crit6(std::string& note) {
    Gate g;
    SceneSpec scene = sample_scene(3);
    const int hw = 64;
    Trajectory cam_a = orbit_camera(0.0, hw, hw);
    Trajectory cam_b = orbit_camera(0.15, hw, hw);
    RenderOutput ra = render_camera(scene, cam_a, hw, hw);
    RenderOutput rb = render_camera(scene, cam_b, hw, hw);

    WarpResult w = depth_warp(ra.rgb, ra.depth, cam_a, cam_b);
    double se = 0;
    int n = 0;
    for (int v = 0; v < hw; ++v)
        for (int u = 0; u < hw; ++u) {
            if (!w.mask(0, v, u, 0)) continue;
            double true_d = rb.depth(0, v, u, 0);
            if (!std::isfinite(true_d)) continue;
            if (std::abs(w.depth(0, v, u, 0) - true_d) > 0.01 * true_d) continue;
            for (int c = 0; c < 3; ++c) {
                double d = double(w.rgb(0, v, u, c)) - rb.rgb(0, v, u, c);
                se += d * d;
            }
            n += 3;
        }
    g.expect(n > 3000, "too few co-visible pixels");
    double masked_psnr = n ? 10.0 * std::log10(1.0 / (se / n)) : 0.0;
    g.expect(masked_psnr >= 30.0, "masked psnr below 30 dB");

    // Round trip: A pixel -> world -> nearest B pixel -> B's own depth ->
    // world -> back into A. Quantizing to the B pixel center costs up to
    // half a pixel, so the mean over co-visible pixels is the statistic.
    double err_sum = 0;
    int m = 0;
    for (int v = 0; v < hw; ++v)
        for (int u = 0; u < hw; ++u) {
            double da = ra.depth(0, v, u, 0);
            if (!std::isfinite(da)) continue;
            Vec3 world = unproject_pixel(cam_a.intrinsics[0], cam_a.poses[0], u, v, da);
            double pbx, pby, db;
            if (!project_point(cam_b.intrinsics[0], cam_b.poses[0], world, pbx, pby, db))
                continue;
            int ub = int(std::floor(pbx)), vb = int(std::floor(pby));
            if (ub < 0 || ub >= hw || vb < 0 || vb >= hw) continue;
            double dbt = rb.depth(0, vb, ub, 0);
            if (!std::isfinite(dbt) || std::abs(dbt - db) > 0.01 * dbt) continue;
            Vec3 back = unproject_pixel(cam_b.intrinsics[0], cam_b.poses[0], ub, vb, dbt);
            double pax, pay, dd;
            if (!project_point(cam_a.intrinsics[0], cam_a.poses[0], back, pax, pay, dd))
                continue;
            err_sum += std::hypot(pax - (u + 0.5), pay - (v + 0.5));
            ++m;
        }
    g.expect(m > 1000, "too few round-trip pixels");
    double mean_err = m ? err_sum / m : 1e9;
    g.expect(mean_err <= 0.5, "round-trip error above 0.5 px");

    char buf[120];
    std::snprintf(buf, sizeof buf, "masked psnr %.2f dB, round trip %.3f px", masked_psnr,
                  mean_err);
    if (!g.ok) note = g.note + " (" + buf + ")";
    else note = buf;
    return g.ok;
}

// criterion 7: window plans tile the timeline exactly once and the metric
// closed forms come out right.
bool crit7(std::string& note) {
    Gate g;
    for (int total = 1; total <= 64; ++total)
        for (int window = 1; window <= 64; ++window) {
            auto plan = plan_windows(total, window);
            int next = 0;
            for (const auto& win : plan) {
                g.expect(win.count_begin == next, "coverage gap");
                g.expect(win.count_end > win.count_begin, "empty window");
                g.expect(win.start >= 0 && win.start + win.frames <= total, "window bounds");
                g.expect(win.count_begin >= win.start &&
                             win.count_end <= win.start + win.frames,
                         "count range outside window");
                next = win.count_end;
            }
            g.expect(next == total, "coverage incomplete");
        }

    // 0.3f and 0.4f differ by 0.1 to within 6e-8, keeping the dB value
    // inside the 1e-6 tolerance; a wider-spread pair like 0.5/0.6 would not.
    Grid4f a(1, 8, 8, 3), b(1, 8, 8, 3);
    std::fill(a.data.begin(), a.data.end(), 0.3f);
    std::fill(b.data.begin(), b.data.end(), 0.4f);
    double p = psnr(frame_view(a, 0), frame_view(b, 0));
    g.expect(std::abs(p - 20.0) < 1e-6, "psnr 20 dB case");

    Grid4f z(1, 16, 16, 1), o(1, 16, 16, 1);
    std::fill(z.data.begin(), z.data.end(), 0.0f);
    std::fill(o.data.begin(), o.data.end(), 1.0f);
    double s = ssim(frame_view(z, 0), frame_view(o, 0));
    g.expect(std::abs(s - 1e-4 / 1.0001) < 1e-6, "ssim constant case");

    note = g.note;
    return g.ok;
}

// criterion 8: identical samples give a zero heatmap; seeded generations
// from the overfit model on a scene with occluded regions give a strictly
// positive mean.
bool crit8(std::string& note, const Overfit& of) {
    Gate g;

    Rng rng(31);
    Grid4f sample = random_video(rng, 4, 12, 12, 0.5);
    std::vector<Grid4f> same(5, sample);
    UncertaintyMap zero = uncertainty_heatmap(same);
    for (float v : zero.values) g.expect(v == 0.0f, "identical samples not zero");

    g.expect(of.trained, "no trained model from criterion 5");
    if (!of.trained) {
        note = g.note;
        return false;
    }
    Generator gen = make_model_generator(of.params, of.sched, 50);
    const EpisodeManifest& ep = of.episodes[0];
    std::vector<Grid4f> runs;
    for (uint64_t k = 0; k < 4; ++k) {
        EvalConfig ec;
        ec.window = 8;
        ec.seed = mix_seed(kOverfitSeed, 0x756e636bu, k);
        runs.push_back(run_protocol(ep, gen, "cam00", "cam01", ec));
    }
    UncertaintyMap map = uncertainty_heatmap(runs);
    double mean = 0;
    for (float v : map.values) mean += v;
    mean /= double(map.values.size());
    g.expect(mean > 0.0, "heatmap mean not positive");

    char buf[80];
    std::snprintf(buf, sizeof buf, "mean heatmap %.3g", mean);
    if (g.ok) note = buf;
    else note = g.note;
    return g.ok;
}

int run_cli(const std::string& cwd, const std::string& cli, const std::string& args) {
    std::string cmd = "cd '" + cwd + "' && '" + cli + "' " + args + " >> cli_log.txt 2>&1";
    return std::system(cmd.c_str());
}

bool trees_identical(const fs::path& a, const fs::path& b, std::string& why) {
    auto list = [](const fs::path& root) {
        std::vector<std::string> rel;
        for (const auto& e : fs::recursive_directory_iterator(root))
            if (e.is_regular_file()) rel.push_back(fs::relative(e.path(), root).string());
        std::sort(rel.begin(), rel.end());
        return rel;
    };
    auto ra = list(a), rb = list(b);
    if (ra != rb) {
        why = "file sets differ under " + a.string();
        return false;
    }
    for (const auto& r : ra)
        if (read_file_bytes((a / r).string()) != read_file_bytes((b / r).string())) {
            why = "bytes differ: " + r;
            return false;
        }
    return true;
}

// criterion 9: every pipeline command is byte-deterministic. Two runs from
// different working directories with relative paths and --threads 1 must
// produce identical trees at every stage.
bool crit9(std::string& note, const std::string& cli) {
    Gate g;
    if (!fs::exists(cli)) {
        note = "cli binary not found: " + cli;
        return false;
    }
    fs::path base_a = scratch_dir("dualray_acceptance_det_a");
    fs::path base_b = scratch_dir("dualray_acceptance_det_b");

    const std::string gen_cfg = R"({"data": {"episodes": 2, "frames": 8, "height": 32,
        "width": 32, "cameras": 2}})";
    const std::string model = R"("model": {"model_dim": 48, "depth": 1, "heads": 4})";
    const std::string train_cfg = "{" + model + R"(, "train": {"steps": 100, "lr": 0.001,
        "checkpoint_every": 50, "log_every": 20, "dataset": "data"}})";
    const std::string sample_cfg = "{" + model + R"(, "sample": {
        "checkpoint": "trained/ckpt_000100.drck", "dataset": "data"}})";
    const std::string eval_cfg = "{" + model + R"(, "eval": {"dataset": "data",
        "generator": "model", "checkpoint": "trained/ckpt_000100.drck", "window": 8}})";

    for (const fs::path& base : {base_a, base_b}) {
        std::ofstream(base / "gen.json") << gen_cfg;
        std::ofstream(base / "train.json") << train_cfg;
        std::ofstream(base / "sample.json") << sample_cfg;
        std::ofstream(base / "eval.json") << eval_cfg;
        g.expect(run_cli(base.string(), cli,
                         "gen-data --config gen.json --seed 11 --out data --threads 1") == 0,
                 "gen-data run failed");
        g.expect(run_cli(base.string(), cli,
                         "train --config train.json --seed 11 --out trained --threads 1") == 0,
                 "train run failed");
        g.expect(run_cli(base.string(), cli,
                         "sample --config sample.json --seed 11 --out samples --threads 1") == 0,
                 "sample run failed");
        g.expect(run_cli(base.string(), cli,
                         "eval --config eval.json --seed 11 --out evald --threads 1") == 0,
                 "eval run failed");
    }

    std::string why;
    for (const char* stage : {"data", "trained", "samples", "evald"})
        if (!trees_identical(base_a / stage, base_b / stage, why))
            g.expect(false, std::string(stage) + ": " + why);

    if (g.ok) {
        fs::remove_all(base_a);
        fs::remove_all(base_b);
    }
    note = g.note;
    return g.ok;
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli = argc > 1 ? argv[1] : "";
    // Optional second argument: comma-separated criterion ids, for rerunning
    // a subset while debugging. The ctest invocation always runs all nine.
    std::vector<int> only;
    if (argc > 2) {
        for (const char* p = argv[2]; *p;) {
            only.push_back(std::atoi(p));
            while (*p && *p != ',') ++p;
            if (*p == ',') ++p;
        }
    }
    Overfit of;

    struct Criterion {
        int id;
        const char* label;
        double budget_s;
        std::function<bool(std::string&)> fn;
    };
    std::vector<Criterion> criteria = {
        {1, "ray-map and pose-delta oracles", 10, crit1},
        {2, "codec round trip and energy bounds", 30, crit2},
        {3, "token layout", 5, crit3},
        {4, "gradient check", 300, crit4},
        {5, "overfit beats the copy baseline by 3 dB", 1800,
         [&](std::string& n) { return crit5(n, of); }},
        {6, "depth-warp ground-truth oracle", 60, crit6},
        {7, "window plans and metric closed forms", 10, crit7},
        {8, "uncertainty heatmaps", 300, [&](std::string& n) { return crit8(n, of); }},
        {9, "command determinism", 600, [&](std::string& n) { return crit9(n, cli); }},
    };

    int failures = 0, ran = 0;
    for (auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        ++ran;
        auto t0 = clk::now();
        bool ok = false;
        std::string note;
        try {
            ok = c.fn(note);
        } catch (const std::exception& e) {
            note = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(clk::now() - t0).count();
        if (secs >= c.budget_s) {
            ok = false;
            char buf[64];
            std::snprintf(buf, sizeof buf, "over budget %.0fs", c.budget_s);
            note = note.empty() ? buf : note + "; " + buf;
        }
        if (!ok) ++failures;
        std::printf("[%s] criterion %d: %s%s%s%s (%.1fs / %.0fs)\n", ok ? "PASS" : "FAIL", c.id,
                    c.label, note.empty() ? "" : " (", note.c_str(), note.empty() ? "" : ")",
                    secs, c.budget_s);
        std::fflush(stdout);
    }
    if (failures) std::printf("acceptance: %d of %d criteria failed\n", failures, ran);
    else std::printf("acceptance: all %d criteria passed\n", ran);
    return failures;
}
