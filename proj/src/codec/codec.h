#pragma once

#include <array>
#include <vector>

#include "core/grid.h"

namespace dualray {

// Fixed spectral video codec. Each (4, 8, 8) spatiotemporal block of each
// color channel goes through an orthonormal 3D type-II DCT; the 16 latent
// channels keep the lowest-frequency coefficients in zigzag order, split
// (6, 5, 5) across R, G, B. Because the basis is orthonormal the kept
// latent energy never exceeds the signal energy, and an all-ones video
// produces a DC-only latent with no extra scaling.
struct CodecSpec {
    int temporal_factor = 4;
    int spatial_factor = 8;
    int latent_width = 16;
    std::array<int, 3> channel_budget = {6, 5, 5};
};

// Zigzag order over (ft, fh, fw) frequency triples: ascending by total
// frequency, ties by (ft, fh, fw). Returns the first `count` triples.
std::vector<std::array<int, 3>> zigzag_order(const CodecSpec& spec, int count);

// (T, H, W, 3) in [-1, 1] -> (T/4, H/8, W/8, 16).
Grid4f encode_video(const Grid4f& video, const CodecSpec& spec = {});

// (t, h, w, 16) -> (4t, 8h, 8w, 3); discarded coefficients are zero-filled
// and the result is clamped to [-1, 1].
Grid4f decode_video(const Grid4f& latent, const CodecSpec& spec = {});

// (T, H, W, 6) ray map -> (T/4, H/8, W/8, 32): ray channels and moment
// channels encoded independently as two 3-channel videos, concatenated.
Grid4f encode_pluecker(const Grid4f& map, const CodecSpec& spec = {});

}  // namespace dualray
