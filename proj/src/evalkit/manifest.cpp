#include "evalkit/manifest.h"

#include <filesystem>

#include <nlohmann/json.hpp>

#include "core/bytes.h"
#include "core/error.h"
#include "io/image_io.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace dualray {

namespace {

Mat4 parse_pose(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.size() != 16)
        throw DataError(where + ": pose needs 16 row-major floats");
    Mat4 m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = arr[size_t(r) * 4 + c].get<double>();
    Mat3 rot = m.block<3, 3>(0, 0);
    if ((rot * rot.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-5)
        throw DataError(where + ": rotation not orthonormal");
    if ((m.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-9)
        throw DataError(where + ": bottom row must be 0 0 0 1");
    return m;
}

Intrinsics parse_intrinsics(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.size() != 9)
        throw DataError(where + ": intrinsics need 9 row-major floats");
    Intrinsics k;
    k.fx = arr[0].get<double>();
    k.cx = arr[2].get<double>();
    k.fy = arr[4].get<double>();
    k.cy = arr[5].get<double>();
    if (k.fx <= 0 || k.fy <= 0) throw DataError(where + ": focal lengths must be positive");
    return k;
}

void require_file(const std::string& base, const std::string& rel, const std::string& where) {
    if (!fs::exists(fs::path(base) / rel))
        throw DataError(where + ": missing file " + rel);
}

}  // namespace

std::vector<EpisodeManifest> load_manifests(const std::string& path_in) {
    // Accept either the manifest file itself or a dataset directory holding one.
    std::string path = path_in;
    std::error_code ec;
    if (fs::is_directory(path, ec)) path = (fs::path(path) / "manifest.jsonl").string();
    std::string text = read_file_text(path);
    std::string base = fs::path(path).parent_path().string();
    if (base.empty()) base = ".";

    std::vector<EpisodeManifest> out;
    size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        EpisodeManifest ep;
        ep.base_dir = base;
        try {
            if (j.at("schema").get<int>() != 1)
                throw DataError("unsupported manifest schema");
            ep.episode_id = j.at("episode_id").get<std::string>();
            ep.height = j.at("resolution").at(0).get<int>();
            ep.width = j.at("resolution").at(1).get<int>();
            ep.frame_count = j.at("frame_count").get<int>();
            ep.fps = j.value("fps", 0);
            ep.align_start = j.value("align_start", true);
            if (j.contains("normalization_constant")) {
                ep.has_normalization = true;
                ep.normalization_constant = j["normalization_constant"].get<double>();
            }
            ep.domain = j.value("domain", "");
            if (ep.height <= 0 || ep.width <= 0 || ep.frame_count <= 0)
                throw DataError("nonpositive resolution or frame count");

            for (const json& jc : j.at("cameras")) {
                ManifestCamera cam;
                cam.id = jc.at("id").get<std::string>();
                std::string where = ep.episode_id + "/" + cam.id;
                for (const json& f : jc.at("frames")) cam.frames.push_back(f.get<std::string>());
                if (jc.contains("depth"))
                    for (const json& f : jc["depth"]) cam.depth.push_back(f.get<std::string>());
                for (const json& p : jc.at("poses")) cam.poses.push_back(parse_pose(p, where));
                for (const json& k : jc.at("intrinsics"))
                    cam.intrinsics.push_back(parse_intrinsics(k, where));

                size_t T = size_t(ep.frame_count);
                if (cam.frames.size() != T || cam.poses.size() != T ||
                    cam.intrinsics.size() != T || (!cam.depth.empty() && cam.depth.size() != T))
                    throw DataError(where + ": per-frame list length != frame_count");
                for (const std::string& f : cam.frames) require_file(base, f, where);
                for (const std::string& f : cam.depth) require_file(base, f, where);
                ep.cameras.push_back(std::move(cam));
            }
        } catch (const json::exception& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (ep.cameras.empty())
            throw DataError(path + ":" + std::to_string(line_no) + ": episode has no cameras");
        out.push_back(std::move(ep));
    }
    if (out.empty()) throw DataError(path + ": no episodes");
    return out;
}

const ManifestCamera& find_camera(const EpisodeManifest& ep, const std::string& id) {
    for (const ManifestCamera& cam : ep.cameras)
        if (cam.id == id) return cam;
    throw DataError(ep.episode_id + ": no camera named " + id);
}

double resolve_normalization(const EpisodeManifest& ep, const ManifestCamera& a,
                             const ManifestCamera& b) {
    if (ep.has_normalization) {
        if (ep.normalization_constant <= 0)
            throw DataError(ep.episode_id + ": normalization constant must be positive");
        return ep.normalization_constant;
    }
    return translation_scale({&a.poses, &b.poses});
}

Trajectory camera_trajectory(const ManifestCamera& cam) {
    Trajectory t;
    t.poses = cam.poses;
    t.intrinsics = cam.intrinsics;
    return t;
}

Grid4f load_video(const EpisodeManifest& ep, const ManifestCamera& cam) {
    Grid4f video(ep.frame_count, ep.height, ep.width, 3);
    for (int t = 0; t < ep.frame_count; ++t) {
        std::string path = (fs::path(ep.base_dir) / cam.frames[t]).string();
        if (cam.frames[t].size() > 4 &&
            cam.frames[t].compare(cam.frames[t].size() - 4, 4, ".f32") == 0) {
            read_frame_raw(path, video, t);
        } else {
            ImageU8 img = png_read_file(path);
            if (img.width != ep.width || img.height != ep.height || img.channels != 3)
                throw DataError(path + ": frame does not match manifest resolution");
            image_to_frame(img, video, t);
        }
    }
    return video;
}

Grid4f load_depth(const EpisodeManifest& ep, const ManifestCamera& cam) {
    if (cam.depth.empty()) throw DataError(ep.episode_id + "/" + cam.id + ": no depth maps");
    Grid4f depth(ep.frame_count, ep.height, ep.width, 1);
    for (int t = 0; t < ep.frame_count; ++t) {
        std::vector<float> d = read_depth_raw((fs::path(ep.base_dir) / cam.depth[t]).string(),
                                              ep.height * ep.width);
        std::copy(d.begin(), d.end(),
                  depth.data.begin() + size_t(t) * ep.height * ep.width);
    }
    return depth;
}

}  // namespace dualray
