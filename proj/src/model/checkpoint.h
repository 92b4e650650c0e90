#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "model/net.h"

namespace dualray {

constexpr uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    ModelConfig cfg;
    uint64_t step = 0;
    uint64_t seed = 0;
    std::vector<float> flat;
};

// On disk: "DRCK", u32 version, u32 json length, config echo as JSON, u64
// step, u64 seed, u64 parameter count, then the flat f32 parameter vector,
// all little-endian.
void save_checkpoint(const std::string& path, const Params<float>& params, uint64_t step,
                     uint64_t seed);
Checkpoint load_checkpoint(const std::string& path);

// Rebuilds a parameter struct; throws when the stored config disagrees with
// the expected one.
Params<float> params_from_checkpoint(const Checkpoint& ck, const ModelConfig& expected);

}  // namespace dualray
