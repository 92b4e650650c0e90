// Command-line front end. Talks to the core exclusively through the C API;
// flag handling and the config-override merge live here.

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dualray/dualray.h"

using json = nlohmann::json;

namespace {

struct FlagOverrides {
    std::string config_path;
    std::string out;
    uint64_t seed = 0;
    bool has_seed = false;
    int threads = -1;
};

int fail(int code, const std::string& msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    return code;
}

int run(const std::string& command, const FlagOverrides& flags) {
    json config = json::object();
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path, std::ios::binary);
        if (!in) return fail(DR_ERR_CONFIG, "cannot read config " + flags.config_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        try {
            config = json::parse(ss.str());
        } catch (const json::exception& e) {
            return fail(DR_ERR_CONFIG, flags.config_path + ": " + e.what());
        }
        if (!config.is_object())
            return fail(DR_ERR_CONFIG, flags.config_path + ": top level must be an object");
    }
    if (flags.has_seed) config["seed"] = flags.seed;
    if (!flags.out.empty()) config["out"] = flags.out;
    if (flags.threads >= 0) config["threads"] = flags.threads;

    dr_status rc = dr_run(command.c_str(), config.dump().c_str());
    if (rc != DR_OK) return fail(rc, dr_last_error());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-view video synthesis pipeline"};
    app.require_subcommand(0, 1);

    bool show_version = false;
    app.add_flag("--version", show_version, "Print version and schema info as JSON");

    FlagOverrides flags;
    const char* names[] = {"gen-data", "train",       "sample",  "eval",
                           "warp",     "project-gcd", "pluecker"};
    const char* descs[] = {"Render a synthetic multi-view dataset",
                           "Train the dual-view denoiser",
                           "Generate target views from a checkpoint",
                           "Run the windowed evaluation protocol",
                           "Depth-warp one camera into another",
                           "Print pose deltas in azimuth/elevation/radius",
                           "Dump ray maps for one camera"};
    for (size_t i = 0; i < 7; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descs[i]);
        sub->add_option("--config", flags.config_path, "JSON config file");
        sub->add_option("--seed", flags.seed, "Seed override")
            ->each([&](const std::string&) { flags.has_seed = true; });
        sub->add_option("--out", flags.out, "Output directory override");
        sub->add_option("--threads", flags.threads, "Thread count override (0 = auto)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : DR_ERR_CONFIG;
    }

    if (show_version) {
        std::printf("%s\n", dr_version_json());
        return 0;
    }
    auto subs = app.get_subcommands();
    if (subs.empty()) {
        std::fprintf(stderr, "%s", app.help().c_str());
        return DR_ERR_CONFIG;
    }
    return run(subs[0]->get_name(), flags);
}
