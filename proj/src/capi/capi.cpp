#include "dualray/dualray.h"

#include <cstring>
#include <string>

#include "codec/codec.h"
#include "core/error.h"
#include "evalkit/metrics.h"
#include "geometry/geometry.h"
#include "pipeline/commands.h"

namespace {

thread_local std::string g_last_error;

template <typename F>
dr_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return DR_OK;
    } catch (const dualray::Error& e) {
        g_last_error = e.what();
        return dr_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DR_ERR_DATA;
    }
}

dualray::Grid4f wrap_frame(const float* px, int h, int w, int c) {
    if (!px || h <= 0 || w <= 0 || c <= 0) throw dualray::DataError("bad image buffer");
    dualray::Grid4f g(1, h, w, c);
    std::memcpy(g.data.data(), px, g.size() * sizeof(float));
    return g;
}

}  // namespace

struct dr_trajectory {
    dualray::Trajectory traj;
};

extern "C" {

const char* dr_version_json(void) {
    return "{\"library\":\"dualray\",\"version\":\"0.1.0\","
           "\"schemas\":{\"manifest\":1,\"checkpoint\":1,\"config\":1}}";
}

const char* dr_last_error(void) { return g_last_error.c_str(); }

dr_status dr_run(const char* command, const char* config_json) {
    return guarded([&] {
        if (!command) throw dualray::ConfigError("command is null");
        dualray::RunConfig rc =
            dualray::parse_run_config(config_json ? config_json : "{}");
        dualray::run_command(command, rc);
    });
}

dr_status dr_psnr(const float* a, const float* b, int height, int width, int channels,
                  double* out_db) {
    return guarded([&] {
        if (!out_db) throw dualray::DataError("output pointer is null");
        dualray::Grid4f ga = wrap_frame(a, height, width, channels);
        dualray::Grid4f gb = wrap_frame(b, height, width, channels);
        *out_db = dualray::psnr(dualray::frame_view(ga, 0), dualray::frame_view(gb, 0));
    });
}

dr_status dr_ssim(const float* a, const float* b, int height, int width, int channels,
                  double* out) {
    return guarded([&] {
        if (!out) throw dualray::DataError("output pointer is null");
        dualray::Grid4f ga = wrap_frame(a, height, width, channels);
        dualray::Grid4f gb = wrap_frame(b, height, width, channels);
        *out = dualray::ssim(dualray::frame_view(ga, 0), dualray::frame_view(gb, 0));
    });
}

dr_trajectory* dr_trajectory_create(const double* poses16, const double* intrinsics4,
                                    int frames) {
    dr_trajectory* handle = nullptr;
    dr_status rc = guarded([&] {
        if (!poses16 || !intrinsics4 || frames < 1)
            throw dualray::DataError("trajectory needs poses, intrinsics and >= 1 frame");
        auto t = new dr_trajectory;
        for (int f = 0; f < frames; ++f) {
            dualray::Mat4 m;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) m(r, c) = poses16[size_t(f) * 16 + r * 4 + c];
            t->traj.poses.push_back(m);
            dualray::Intrinsics k;
            k.fx = intrinsics4[size_t(f) * 4 + 0];
            k.fy = intrinsics4[size_t(f) * 4 + 1];
            k.cx = intrinsics4[size_t(f) * 4 + 2];
            k.cy = intrinsics4[size_t(f) * 4 + 3];
            t->traj.intrinsics.push_back(k);
        }
        handle = t;
    });
    return rc == DR_OK ? handle : nullptr;
}

void dr_trajectory_destroy(dr_trajectory* traj) { delete traj; }

dr_status dr_canonicalize_pair(dr_trajectory* target, dr_trajectory* input,
                               double normalization) {
    return guarded([&] {
        if (!target || !input) throw dualray::DataError("null trajectory handle");
        dualray::canonicalize_pair(target->traj, input->traj);
        double norm = normalization;
        if (norm == 0)
            norm = dualray::translation_scale({&target->traj.poses, &input->traj.poses});
        if (norm <= 0) throw dualray::DataError("normalization must be positive");
        dualray::normalize_translations(target->traj.poses, norm);
        dualray::normalize_translations(input->traj.poses, norm);
    });
}

dr_status dr_trajectory_pose(const dr_trajectory* traj, int frame, double* out16) {
    return guarded([&] {
        if (!traj || !out16) throw dualray::DataError("null pointer");
        if (frame < 0 || frame >= traj->traj.frame_count())
            throw dualray::DataError("frame index out of range");
        const dualray::Mat4& m = traj->traj.poses[frame];
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) out16[r * 4 + c] = m(r, c);
    });
}

dr_status dr_pluecker_map(const dr_trajectory* traj, int height, int width, float* out) {
    return guarded([&] {
        if (!traj || !out) throw dualray::DataError("null pointer");
        dualray::Grid4f map = dualray::pluecker_from_camera(traj->traj, height, width);
        std::memcpy(out, map.data.data(), map.size() * sizeof(float));
    });
}

dr_status dr_gcd_delta(const dr_trajectory* target, const dr_trajectory* input, int anchor,
                       double out3[3]) {
    return guarded([&] {
        if (!target || !input || !out3) throw dualray::DataError("null pointer");
        if (anchor != 0 && anchor != 1)
            throw dualray::ConfigError("anchor must be 0 (middle) or 1 (last)");
        dualray::GcdControl d = dualray::project_to_gcd(
            target->traj, input->traj,
            anchor == 0 ? dualray::GcdAnchor::Middle : dualray::GcdAnchor::Last);
        out3[0] = d.delta_azimuth;
        out3[1] = d.delta_elevation;
        out3[2] = d.delta_radius;
    });
}

dr_status dr_codec_encode(const float* video, int t, int h, int w, float* latent) {
    return guarded([&] {
        if (!video || !latent) throw dualray::DataError("null pointer");
        dualray::Grid4f in(t, h, w, 3);
        std::memcpy(in.data.data(), video, in.size() * sizeof(float));
        dualray::Grid4f out = dualray::encode_video(in);
        std::memcpy(latent, out.data.data(), out.size() * sizeof(float));
    });
}

dr_status dr_codec_decode(const float* latent, int t, int h, int w, float* video) {
    return guarded([&] {
        if (!latent || !video) throw dualray::DataError("null pointer");
        dualray::Grid4f in(t, h, w, 16);
        std::memcpy(in.data.data(), latent, in.size() * sizeof(float));
        dualray::Grid4f out = dualray::decode_video(in);
        std::memcpy(video, out.data.data(), out.size() * sizeof(float));
    });
}

}  // extern "C"
