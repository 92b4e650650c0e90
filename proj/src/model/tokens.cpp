#include "model/tokens.h"

#include "core/error.h"

namespace dualray {

TokenSequence assemble_tokens(const Grid4f& v_x, const Grid4f& p_x, const Grid4f& v_y,
                              const Grid4f& p_y) {
    if (!(v_x.d0 == p_x.d0 && v_x.d1 == p_x.d1 && v_x.d2 == p_x.d2) ||
        !v_x.same_shape(v_y) ||
        !(p_x.same_shape(p_y)))
        throw DataError("assemble_tokens: grid shapes disagree");
    if (p_x.d0 != v_x.d0 || p_x.d1 != v_x.d1 || p_x.d2 != v_x.d2)
        throw DataError("assemble_tokens: ray latent grid mismatch");
    if (p_x.d3 != 2 * v_x.d3) throw DataError("assemble_tokens: ray latent width must be 2d");

    TokenSequence seq;
    seq.t = v_x.d0;
    seq.h = v_x.d1;
    seq.w = v_x.d2;
    seq.d = v_x.d3;
    seq.tokens.resize(size_t(seq.rows()) * seq.width());
    seq.pos.resize(seq.rows());

    int row = 0;
    for (int view = 0; view < 2; ++view) {
        const Grid4f& v = view == 0 ? v_x : v_y;
        const Grid4f& p = view == 0 ? p_x : p_y;
        for (int ti = 0; ti < seq.t; ++ti)
            for (int hi = 0; hi < seq.h; ++hi)
                for (int wi = 0; wi < seq.w; ++wi) {
                    float* dst = seq.row(row);
                    for (int c = 0; c < seq.d; ++c) dst[c] = v(ti, hi, wi, c);
                    for (int c = 0; c < 2 * seq.d; ++c) dst[seq.d + c] = p(ti, hi, wi, c);
                    seq.pos[row] = {view, ti, hi, wi};
                    ++row;
                }
    }
    return seq;
}

void disassemble_tokens(const TokenSequence& seq, Grid4f& v_x, Grid4f& p_x, Grid4f& v_y,
                        Grid4f& p_y) {
    v_x.resize(seq.t, seq.h, seq.w, seq.d);
    v_y.resize(seq.t, seq.h, seq.w, seq.d);
    p_x.resize(seq.t, seq.h, seq.w, 2 * seq.d);
    p_y.resize(seq.t, seq.h, seq.w, 2 * seq.d);
    for (int i = 0; i < seq.rows(); ++i) {
        const TokenPos& p = seq.pos[i];
        Grid4f& v = p.view == 0 ? v_x : v_y;
        Grid4f& pl = p.view == 0 ? p_x : p_y;
        const float* src = seq.row(i);
        for (int c = 0; c < seq.d; ++c) v(p.ti, p.hi, p.wi, c) = src[c];
        for (int c = 0; c < 2 * seq.d; ++c) pl(p.ti, p.hi, p.wi, c) = src[seq.d + c];
    }
}

}  // namespace dualray
