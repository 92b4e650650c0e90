#include "model/checkpoint.h"

#include <json.hpp>

#include "core/bytes.h"
#include "core/error.h"

namespace dualray {

namespace {

nlohmann::json config_json(const ModelConfig& cfg) {
    return {{"latent_d", cfg.latent_d}, {"model_dim", cfg.model_dim}, {"depth", cfg.depth},
            {"heads", cfg.heads},       {"rope_base", cfg.rope_base}, {"views", cfg.views}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
    ModelConfig cfg;
    cfg.latent_d = j.at("latent_d").get<int>();
    cfg.model_dim = j.at("model_dim").get<int>();
    cfg.depth = j.at("depth").get<int>();
    cfg.heads = j.at("heads").get<int>();
    cfg.rope_base = j.at("rope_base").get<double>();
    cfg.views = j.at("views").get<int>();
    return cfg;
}

}  // namespace

void save_checkpoint(const std::string& path, const Params<float>& params, uint64_t step,
                     uint64_t seed) {
    std::vector<float> flat;
    params_to_flat(params, flat);
    std::string echo = config_json(params.cfg).dump();

    std::vector<uint8_t> buf;
    buf.reserve(24 + echo.size() + flat.size() * 4);
    buf.insert(buf.end(), {'D', 'R', 'C', 'K'});
    put_u32(buf, kCheckpointVersion);
    put_u32(buf, uint32_t(echo.size()));
    buf.insert(buf.end(), echo.begin(), echo.end());
    put_u64(buf, step);
    put_u64(buf, seed);
    put_u64(buf, flat.size());
    for (float v : flat) put_f32(buf, v);
    write_file_bytes(path, buf.data(), buf.size());
}

Checkpoint load_checkpoint(const std::string& path) {
    std::vector<uint8_t> buf = read_file_bytes(path);
    ByteReader r(buf);
    if (!r.ok(12)) throw DataError("checkpoint: truncated header: " + path);
    char magic[4];
    r.bytes(magic, 4);
    if (std::string(magic, 4) != "DRCK") throw DataError("checkpoint: bad magic: " + path);
    uint32_t version = r.u32();
    if (version != kCheckpointVersion)
        throw DataError("checkpoint: unsupported version " + std::to_string(version));
    uint32_t jlen = r.u32();
    if (!r.ok(jlen)) throw DataError("checkpoint: truncated config echo");
    std::string echo(jlen, '\0');
    r.bytes(echo.data(), jlen);

    Checkpoint ck;
    try {
        ck.cfg = config_from_json(nlohmann::json::parse(echo));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("checkpoint: bad config echo: ") + e.what());
    }
    if (!r.ok(24)) throw DataError("checkpoint: truncated trailer");
    ck.step = r.u64();
    ck.seed = r.u64();
    uint64_t count = r.u64();
    if (!r.ok(count * 4)) throw DataError("checkpoint: truncated parameter vector");
    ck.flat.resize(count);
    for (uint64_t i = 0; i < count; ++i) ck.flat[i] = r.f32();
    return ck;
}

Params<float> params_from_checkpoint(const Checkpoint& ck, const ModelConfig& expected) {
    if (ck.cfg.latent_d != expected.latent_d || ck.cfg.model_dim != expected.model_dim ||
        ck.cfg.depth != expected.depth || ck.cfg.heads != expected.heads ||
        ck.cfg.rope_base != expected.rope_base || ck.cfg.views != expected.views)
        throw ConfigError("checkpoint: stored config disagrees with requested config");
    Params<float> p;
    shape_params(p, ck.cfg);
    params_from_flat(p, ck.flat);
    return p;
}

}  // namespace dualray
