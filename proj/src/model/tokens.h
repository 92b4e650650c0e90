#pragma once

#include <vector>

#include "core/grid.h"

namespace dualray {

// Joint dual-view token sequence: for each view, per latent cell, the RGB
// latent (d) concatenated with the ray-map latent (2d) gives a 3d-wide
// token. View 0 holds the clean input view, view 1 the noisy target view;
// view-0 tokens precede view-1 tokens, row-major in (ti, hi, wi).
struct TokenPos {
    int view, ti, hi, wi;
};

struct TokenSequence {
    int t = 0, h = 0, w = 0, d = 0;
    std::vector<float> tokens;  // row-major, rows() x width()
    std::vector<TokenPos> pos;

    int rows() const { return 2 * t * h * w; }
    int width() const { return 3 * d; }
    float* row(int i) { return tokens.data() + size_t(i) * width(); }
    const float* row(int i) const { return tokens.data() + size_t(i) * width(); }
};

TokenSequence assemble_tokens(const Grid4f& v_x, const Grid4f& p_x, const Grid4f& v_y,
                              const Grid4f& p_y);

// Inverse of assemble_tokens: recovers the four latent grids from the
// sequence using its position metadata.
void disassemble_tokens(const TokenSequence& seq, Grid4f& v_x, Grid4f& p_x, Grid4f& v_y,
                        Grid4f& p_y);

}  // namespace dualray
