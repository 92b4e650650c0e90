#pragma once

#include <array>

#include "core/error.h"

namespace dualray {

// Dual-view denoiser configuration. Tokens are 3*latent_d wide (RGB latent
// plus the two ray-map latents); the default sizes keep an overfit run
// within a single-core CPU budget.
struct ModelConfig {
    int latent_d = 16;
    int model_dim = 192;
    int depth = 6;
    int heads = 6;
    double rope_base = 10000.0;
    int views = 2;

    int token_width() const { return 3 * latent_d; }
    int head_dim() const { return model_dim / heads; }
    int mlp_dim() const { return 4 * model_dim; }
};

inline void validate_config(const ModelConfig& cfg) {
    if (cfg.latent_d < 1) throw ConfigError("model: latent_d must be positive");
    if (cfg.depth < 1) throw ConfigError("model: depth must be positive");
    if (cfg.heads < 1) throw ConfigError("model: heads must be positive");
    if (cfg.views != 2) throw ConfigError("model: exactly two views supported");
    if (cfg.model_dim % 2 != 0) throw ConfigError("model: model_dim must be even");
    if (cfg.model_dim % cfg.heads != 0)
        throw ConfigError("model: model_dim must be divisible by heads");
    if (cfg.head_dim() % 2 != 0) throw ConfigError("model: head dim must be even");
    if (cfg.head_dim() < 6) throw ConfigError("model: head dim too small for 3-axis rotations");
    if (cfg.rope_base <= 1.0) throw ConfigError("model: rope base must exceed 1");
}

// Rotation pairs per position axis (temporal, height, width). Pairs are
// split as evenly as possible with leftovers going to the earlier axes.
inline std::array<int, 3> rope_axis_pairs(int head_dim) {
    if (head_dim % 2 != 0 || head_dim < 6)
        throw ConfigError("rope: head dim must be even and at least 6");
    int pairs = head_dim / 2;
    std::array<int, 3> split{pairs / 3, pairs / 3, pairs / 3};
    for (int a = 0; a < pairs % 3; ++a) split[a] += 1;
    return split;
}

}  // namespace dualray
