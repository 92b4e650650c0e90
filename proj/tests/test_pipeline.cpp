#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "core/bytes.h"
#include "io/image_io.h"
#include "model/checkpoint.h"
#include "pipeline/commands.h"
#include "test_util.h"

using namespace dualray;
using namespace dualray::testutil;
namespace fs = std::filesystem;

namespace {

// Small but codec-compatible: latent width is fixed by the codec budget.
const char* kTinyModel = R"("model": {"model_dim": 48, "depth": 1, "heads": 4})";

std::string dataset_config(const std::string& out, uint64_t seed, int frames = 4, int hw = 16,
                           int cameras = 2, bool png = true) {
    std::ostringstream ss;
    ss << "{\"seed\": " << seed << ", \"out\": \"" << out << "\", \"threads\": 1, "
       << "\"data\": {\"episodes\": 1, \"frames\": " << frames << ", \"height\": " << hw
       << ", \"width\": " << hw << ", \"cameras\": " << cameras
       << ", \"png\": " << (png ? "true" : "false") << "}}";
    return ss.str();
}

std::string slurp(const std::string& path) {
    std::vector<uint8_t> b = read_file_bytes(path);
    return std::string(b.begin(), b.end());
}

}  // namespace

TEST_CASE("config parsing fills defaults and rejects typos") {
    RunConfig def = parse_run_config("{}");
    CHECK(def.seed == 0);
    CHECK(def.out == "out");
    CHECK(def.data.frames == 8);
    CHECK(def.model.latent_d == 16);
    CHECK(def.model.model_dim == 192);
    CHECK(def.diffusion.schedule_steps == 1000);
    CHECK(def.train.lr == 1e-3);
    CHECK(def.eval.generator == "copy");

    RunConfig rc = parse_run_config(R"({
        "seed": 42, "out": "elsewhere", "threads": 2,
        "data": {"episodes": 3, "frames": 16, "png": false},
        "model": {"model_dim": 96, "depth": 2, "heads": 4},
        "diffusion": {"sample_steps": 10},
        "train": {"steps": 50, "lr": 0.01, "dataset": "ds"},
        "eval": {"generator": "warp", "window": 4}
    })");
    CHECK(rc.seed == 42);
    CHECK(rc.threads == 2);
    CHECK(rc.data.episodes == 3);
    CHECK(rc.data.png == false);
    CHECK(rc.data.height == 64);  // untouched default
    CHECK(rc.model.model_dim == 96);
    CHECK(rc.diffusion.sample_steps == 10);
    CHECK(rc.train.steps == 50);
    CHECK(rc.train.lr == 0.01);
    CHECK(rc.eval.generator == "warp");

    CHECK_THROWS_AS(parse_run_config("not json"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"sed": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"data": {"frame": 8}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"model": {"width": 8}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"train": {"steps": "many"}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"eval": 3})"), ConfigError);
}

TEST_CASE("resolved config echo is a fixpoint of the parser") {
    RunConfig rc = parse_run_config(R"({
        "seed": 7, "out": "somewhere",
        "data": {"cameras": 3},
        "train": {"dataset": "x", "resume": "ck.drck"},
        "project_gcd": {"anchor": "last"}
    })");
    std::string echo = resolved_config_json(rc);
    RunConfig rc2 = parse_run_config(echo);
    CHECK(resolved_config_json(rc2) == echo);

    nlohmann::json j = nlohmann::json::parse(echo);
    CHECK(j["seed"] == 7);
    CHECK(j["data"]["cameras"] == 3);
    CHECK(j["data"]["frames"] == 8);  // defaults serialized too
    CHECK(j["project_gcd"]["anchor"] == "last");
}

TEST_CASE("gen-data writes a loadable dataset and its config echo") {
    TempDir dir("gen");
    RunConfig rc = parse_run_config(dataset_config(dir.path() + "/ds", 3));
    run_command("gen-data", rc);

    CHECK(fs::exists(dir.path() + "/ds/resolved_config.json"));
    RunConfig echoed = parse_run_config(slurp(dir.path() + "/ds/resolved_config.json"));
    CHECK(echoed.seed == 3);

    std::vector<EpisodeManifest> eps = load_manifests(dir.path() + "/ds/manifest.jsonl");
    REQUIRE(int(eps.size()) == 1);
    CHECK(eps[0].frame_count == 4);
    CHECK(int(eps[0].cameras.size()) == 2);
    CHECK(eps[0].cameras[0].frames[0].substr(eps[0].cameras[0].frames[0].size() - 4) == ".png");

    TempDir raw("gen_raw");
    RunConfig rraw = parse_run_config(dataset_config(raw.path() + "/ds", 3, 4, 16, 2, false));
    run_command("gen-data", rraw);
    std::vector<EpisodeManifest> reps = load_manifests(raw.path() + "/ds/manifest.jsonl");
    CHECK(reps[0].cameras[0].frames[0].substr(reps[0].cameras[0].frames[0].size() - 4) == ".f32");
    Grid4f video = load_video(reps[0], reps[0].cameras[0]);
    CHECK(video.d0 == 4);
}

TEST_CASE("pair bundles carry codec latents in canonical gauge") {
    TempDir dir("bundle");
    RunConfig rc = parse_run_config(dataset_config(dir.path() + "/ds", 5, 8, 16));
    run_command("gen-data", rc);
    EpisodeManifest ep = load_manifests(dir.path() + "/ds/manifest.jsonl")[0];

    PairBundle b = build_pair_bundle(ep, "cam00", "cam01");
    CHECK(b.pair.v_x.d0 == 2);  // 8 frames / temporal factor 4
    CHECK(b.pair.v_x.d1 == 2);  // 16 px / spatial factor 8
    CHECK(b.pair.v_x.d2 == 2);
    CHECK(b.pair.v_x.d3 == 16);
    CHECK(b.pair.p_x.d3 == 32);
    CHECK(b.pair.p_y.d3 == 32);
    CHECK(b.pluecker_x.d0 == 8);
    CHECK(b.pluecker_x.d1 == 16);
    CHECK(b.pluecker_x.d3 == 6);

    // The target's first frame is the canonical anchor: its rays are the
    // camera-frame grid and the moments vanish.
    RayGrid grid = make_ray_grid(ep.cameras[1].intrinsics[0], 16, 16);
    for (int v = 0; v < 16; ++v)
        for (int u = 0; u < 16; ++u) {
            for (int c = 0; c < 3; ++c)
                CHECK(std::abs(b.pluecker_y(0, v, u, c) - grid.dir(v, u)[c]) < 1e-6);
            for (int c = 3; c < 6; ++c) CHECK(std::abs(b.pluecker_y(0, v, u, c)) < 1e-6);
        }
    for (float v : b.pluecker_x.data) {
        CHECK(v <= 1.0f);
        CHECK(v >= -1.0f);
    }

    EpisodePair pair = build_pair(ep, "cam00", "cam01");
    CHECK(pair.v_y.data == b.pair.v_y.data);
}

TEST_CASE("the model generator respects the codec window constraint") {
    ModelConfig mc;
    mc.model_dim = 48;
    mc.depth = 1;
    mc.heads = 4;
    Params<float> params;
    init_params(params, mc, 1);
    NoiseSchedule sched = make_cosine_schedule(100);

    TempDir dir("modelgen");
    RunConfig rc = parse_run_config(dataset_config(dir.path() + "/ds", 8, 8, 16));
    run_command("gen-data", rc);
    EpisodeManifest ep = load_manifests(dir.path() + "/ds/manifest.jsonl")[0];

    Generator gen = make_model_generator(params, sched, 5);

    EvalConfig ec;
    ec.window = 4;
    ec.seed = 77;
    Grid4f pred = run_protocol(ep, gen, "cam00", "cam01", ec);
    CHECK(pred.d0 == 8);
    CHECK(pred.d1 == 16);
    CHECK(pred.d3 == 3);
    for (float v : pred.data) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
    Grid4f again = run_protocol(ep, gen, "cam00", "cam01", ec);
    CHECK(again.data == pred.data);

    // A window that the codec cannot tile is a data error.
    EvalConfig bad;
    bad.window = 3;
    CHECK_THROWS_AS(run_protocol(ep, gen, "cam00", "cam01", bad), DataError);
}

TEST_CASE("train writes checkpoints and a parseable loss log") {
    TempDir dir("train");
    std::string ds = dir.path() + "/ds";
    run_command("gen-data", parse_run_config(dataset_config(ds, 11)));

    std::ostringstream cfg;
    cfg << "{\"seed\": 11, \"out\": \"" << dir.path() << "/run\", \"threads\": 1, " << kTinyModel
        << ", \"train\": {\"steps\": 6, \"checkpoint_every\": 3, \"log_every\": 2, "
        << "\"dataset\": \"" << ds << "\"}}";
    RunConfig rc = parse_run_config(cfg.str());
    run_command("train", rc);

    CHECK(fs::exists(dir.path() + "/run/ckpt_000003.drck"));
    CHECK(fs::exists(dir.path() + "/run/ckpt_000006.drck"));

    std::string log = slurp(dir.path() + "/run/loss_log.txt");
    std::istringstream lines(log);
    std::string line;
    std::regex row("step ([0-9]+) loss ([0-9]+\\.[0-9]{6})");
    std::vector<int> steps;
    while (std::getline(lines, line)) {
        std::smatch m;
        REQUIRE(std::regex_match(line, m, row));
        steps.push_back(std::stoi(m[1]));
    }
    CHECK(steps == std::vector<int>{2, 4, 6});

    Checkpoint ck = load_checkpoint(dir.path() + "/run/ckpt_000006.drck");
    CHECK(ck.step == 6);
    CHECK(ck.seed == 11);
    CHECK(ck.cfg.model_dim == 48);

    SUBCASE("resume continues from the stored step") {
        std::ostringstream more;
        more << "{\"seed\": 11, \"out\": \"" << dir.path() << "/run\", \"threads\": 1, "
             << kTinyModel << ", \"train\": {\"steps\": 8, \"checkpoint_every\": 4, "
             << "\"log_every\": 1, \"dataset\": \"" << ds << "\", \"resume\": \"" << dir.path()
             << "/run/ckpt_000006.drck\"}}";
        run_command("train", parse_run_config(more.str()));
        CHECK(fs::exists(dir.path() + "/run/ckpt_000008.drck"));
        std::string full = slurp(dir.path() + "/run/loss_log.txt");
        CHECK(full.find("step 7 loss") != std::string::npos);
        CHECK(full.find("step 8 loss") != std::string::npos);
    }

    SUBCASE("resume rejects a mismatched model or seed") {
        std::ostringstream wrong;
        wrong << "{\"seed\": 11, \"out\": \"" << dir.path() << "/run2\", \"threads\": 1, "
              << "\"model\": {\"model_dim\": 96, \"depth\": 1, \"heads\": 4}, "
              << "\"train\": {\"steps\": 8, \"dataset\": \"" << ds << "\", \"resume\": \""
              << dir.path() << "/run/ckpt_000006.drck\"}}";
        CHECK_THROWS_AS(run_command("train", parse_run_config(wrong.str())), ConfigError);

        std::ostringstream reseeded;
        reseeded << "{\"seed\": 12, \"out\": \"" << dir.path() << "/run3\", \"threads\": 1, "
                 << kTinyModel << ", \"train\": {\"steps\": 8, \"dataset\": \"" << ds
                 << "\", \"resume\": \"" << dir.path() << "/run/ckpt_000006.drck\"}}";
        CHECK_THROWS_AS(run_command("train", parse_run_config(reseeded.str())), ConfigError);
    }

    SUBCASE("sampling from the checkpoint writes frames and ray maps") {
        std::ostringstream scfg;
        scfg << "{\"seed\": 11, \"out\": \"" << dir.path() << "/samples\", \"threads\": 1, "
             << kTinyModel << ", \"diffusion\": {\"sample_steps\": 4, "
             << "\"samples_per_condition\": 2}, "
             << "\"sample\": {\"checkpoint\": \"" << dir.path() << "/run/ckpt_000006.drck\", "
             << "\"dataset\": \"" << ds << "\", \"dump_pluecker\": true}}";
        run_command("sample", parse_run_config(scfg.str()));

        EpisodeManifest ep = load_manifests(ds)[0];
        fs::path ep_dir = fs::path(dir.path()) / "samples" / ep.episode_id;
        REQUIRE(fs::exists(ep_dir / "sample00" / "00000.png"));
        REQUIRE(fs::exists(ep_dir / "sample01" / "00003.png"));

        // The two seeded samples differ.
        CHECK(read_file_bytes((ep_dir / "sample00" / "00000.png").string()) !=
              read_file_bytes((ep_dir / "sample01" / "00000.png").string()));

        // Dumped ray maps equal an independent recomputation.
        PairBundle b = build_pair_bundle(ep, "cam00", "cam01");
        int ph = 0, pw = 0;
        Grid4f dumped = read_latent((ep_dir / "pluecker_input.f32").string(), &ph, &pw);
        CHECK(ph == 16);
        CHECK(pw == 16);
        CHECK(dumped.data == b.pluecker_x.data);
        Grid4f dumped_y = read_latent((ep_dir / "pluecker_target.f32").string());
        CHECK(dumped_y.data == b.pluecker_y.data);
    }
}

TEST_CASE("eval emits metrics tables and uncertainty maps") {
    TempDir dir("evalcmd");
    std::string ds = dir.path() + "/ds";
    run_command("gen-data", parse_run_config(dataset_config(ds, 21, 8, 16)));

    std::ostringstream cfg;
    cfg << "{\"seed\": 5, \"out\": \"" << dir.path() << "/eval\", \"threads\": 1, "
        << "\"eval\": {\"dataset\": \"" << ds << "\", \"generator\": \"copy\", \"window\": 4, "
        << "\"heatmap_samples\": 2}}";
    run_command("eval", parse_run_config(cfg.str()));

    std::string csv = slurp(dir.path() + "/eval/metrics.csv");
    int rows = 0;
    for (char c : csv) rows += c == '\n';
    CHECK(rows == 1 + 8);  // header plus one row per frame

    nlohmann::json summary = nlohmann::json::parse(slurp(dir.path() + "/eval/summary.json"));
    CHECK(summary["overall"]["episode_count"] == 1);
    double overall = summary["overall"]["psnr_mean"].get<double>();
    CHECK(summary["episodes"][0]["psnr_mean"].get<double>() == doctest::Approx(overall));

    // The copy generator is deterministic, so the spread across repeated
    // runs is exactly zero.
    EpisodeManifest ep = load_manifests(ds)[0];
    UncertaintyMap map = read_heatmap_raw(dir.path() + "/eval/heatmap_" + ep.episode_id + ".raw");
    CHECK(map.height == 16);
    for (float v : map.values) CHECK(v == 0.0f);
    CHECK(fs::exists(dir.path() + "/eval/heatmap_" + ep.episode_id + ".png"));

    // The warp baseline runs off the same dataset.
    std::ostringstream wcfg;
    wcfg << "{\"seed\": 5, \"out\": \"" << dir.path() << "/evalwarp\", \"threads\": 1, "
         << "\"eval\": {\"dataset\": \"" << ds << "\", \"generator\": \"warp\", \"window\": 4}}";
    run_command("eval", parse_run_config(wcfg.str()));
    nlohmann::json wsum = nlohmann::json::parse(slurp(dir.path() + "/evalwarp/summary.json"));
    CHECK(wsum["overall"]["psnr_mean"].get<double>() > 5.0);
}

TEST_CASE("auxiliary commands write their artifacts") {
    TempDir dir("aux");
    std::string ds = dir.path() + "/ds";
    run_command("gen-data", parse_run_config(dataset_config(ds, 33, 4, 16)));
    EpisodeManifest ep = load_manifests(ds)[0];

    std::ostringstream wcfg;
    wcfg << "{\"seed\": 1, \"out\": \"" << dir.path() << "/warp\", \"threads\": 1, "
         << "\"warp\": {\"dataset\": \"" << ds << "\"}}";
    run_command("warp", parse_run_config(wcfg.str()));
    CHECK(fs::exists(dir.path() + "/warp/" + ep.episode_id + "/warp_00000.png"));
    CHECK(fs::exists(dir.path() + "/warp/" + ep.episode_id + "/mask_00003.png"));

    std::ostringstream gcfg;
    gcfg << "{\"seed\": 1, \"out\": \"" << dir.path() << "/gcd\", \"threads\": 1, "
         << "\"project_gcd\": {\"dataset\": \"" << ds << "\", \"anchor\": \"last\"}}";
    run_command("project-gcd", parse_run_config(gcfg.str()));
    nlohmann::json rows = nlohmann::json::parse(slurp(dir.path() + "/gcd/gcd.json"));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0]["anchor"] == "last");
    CHECK(rows[0]["delta"].contains("azimuth"));
    CHECK(rows[0]["input"]["radius"].get<double>() > 0.0);

    std::ostringstream pcfg;
    pcfg << "{\"seed\": 1, \"out\": \"" << dir.path() << "/plk\", \"threads\": 1, "
         << "\"pluecker\": {\"dataset\": \"" << ds << "\", \"camera\": \"cam01\"}}";
    run_command("pluecker", parse_run_config(pcfg.str()));
    Grid4f map = read_latent(dir.path() + "/plk/pluecker_" + ep.episode_id + "_cam01.f32");
    CHECK(map.d0 == 4);
    CHECK(map.d3 == 6);
}

TEST_CASE("commands fail loudly on bad requests") {
    TempDir dir("errors");
    RunConfig rc = parse_run_config("{\"out\": \"" + dir.path() + "/x\", \"threads\": 1}");
    CHECK_THROWS_AS(run_command("transmogrify", rc), ConfigError);
    CHECK_THROWS_AS(run_command("train", rc), ConfigError);    // no dataset configured
    CHECK_THROWS_AS(run_command("sample", rc), ConfigError);   // no checkpoint
    CHECK_THROWS_AS(run_command("eval", rc), ConfigError);     // no dataset

    std::ostringstream missing;
    missing << "{\"out\": \"" << dir.path() << "/y\", \"threads\": 1, "
            << "\"eval\": {\"dataset\": \"" << dir.path() << "/nope\"}}";
    CHECK_THROWS_AS(run_command("eval", parse_run_config(missing.str())), DataError);

    std::ostringstream badgen;
    badgen << "{\"out\": \"" << dir.path() << "/z\", \"threads\": 1, "
           << "\"eval\": {\"dataset\": \"" << dir.path() << "/nope\", "
           << "\"generator\": \"psychic\"}}";
    CHECK_THROWS_AS(run_command("eval", parse_run_config(badgen.str())), ConfigError);

    std::ostringstream sel;
    std::string ds = dir.path() + "/ds";
    run_command("gen-data", parse_run_config(dataset_config(ds, 1)));
    sel << "{\"out\": \"" << dir.path() << "/w\", \"threads\": 1, "
        << "\"warp\": {\"dataset\": \"" << ds << "\", \"episode\": \"ep_missing\"}}";
    CHECK_THROWS_AS(run_command("warp", parse_run_config(sel.str())), DataError);
}
