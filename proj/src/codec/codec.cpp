#include "codec/codec.h"

#include <algorithm>
#include <cmath>

#include "core/error.h"

namespace dualray {

namespace {

// Orthonormal DCT-II basis: row k, column i = c_k cos(pi (2i+1) k / 2n).
std::vector<double> dct_basis(int n) {
    std::vector<double> b(size_t(n) * n);
    for (int k = 0; k < n; ++k) {
        double ck = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        for (int i = 0; i < n; ++i)
            b[size_t(k) * n + i] = ck * std::cos(M_PI * (2 * i + 1) * k / (2.0 * n));
    }
    return b;
}

struct BlockPlan {
    int bt, bh, bw;                    // block factors
    std::vector<double> basis_t, basis_s;
    // Per color channel, the kept frequency triples in zigzag order and the
    // latent channel each one lands in.
    std::vector<std::vector<std::array<int, 3>>> kept;
    std::vector<std::vector<int>> slot;

    explicit BlockPlan(const CodecSpec& spec) {
        bt = spec.temporal_factor;
        bh = bw = spec.spatial_factor;
        basis_t = dct_basis(bt);
        basis_s = dct_basis(bh);
        int budget_total = 0;
        for (int b : spec.channel_budget) budget_total += b;
        if (budget_total != spec.latent_width)
            throw ConfigError("codec: channel budget does not sum to latent width");
        int max_budget = *std::max_element(spec.channel_budget.begin(), spec.channel_budget.end());
        auto order = zigzag_order(spec, max_budget);
        kept.resize(3);
        slot.resize(3);
        int next = 0;
        for (int c = 0; c < 3; ++c) {
            for (int j = 0; j < spec.channel_budget[c]; ++j) {
                kept[c].push_back(order[j]);
                slot[c].push_back(next++);
            }
        }
    }
};

void check_dims(const Grid4f& video, const BlockPlan& plan, int channels, const char* who) {
    if (video.d3 != channels) throw DataError(std::string(who) + ": wrong channel count");
    if (video.d0 % plan.bt != 0 || video.d1 % plan.bh != 0 || video.d2 % plan.bw != 0)
        throw DataError(std::string(who) + ": dims not divisible by block factors");
    if (video.d0 == 0 || video.d1 == 0 || video.d2 == 0)
        throw DataError(std::string(who) + ": empty video");
}

// Encodes 3 interleaved channels starting at channel_base of the source into
// latent channels [slot + latent_base].
void encode_channels(const Grid4f& video, int channel_base, const BlockPlan& plan,
                     Grid4f& latent, int latent_base) {
    int t = latent.d0, h = latent.d1, w = latent.d2;
    for (int zt = 0; zt < t; ++zt)
        for (int zh = 0; zh < h; ++zh)
            for (int zw = 0; zw < w; ++zw)
                for (int c = 0; c < 3; ++c)
                    for (size_t j = 0; j < plan.kept[c].size(); ++j) {
                        auto [ft, fh, fw] = plan.kept[c][j];
                        double acc = 0.0;
                        for (int i = 0; i < plan.bt; ++i) {
                            double wt = plan.basis_t[size_t(ft) * plan.bt + i];
                            for (int p = 0; p < plan.bh; ++p) {
                                double wh = plan.basis_s[size_t(fh) * plan.bh + p];
                                for (int q = 0; q < plan.bw; ++q) {
                                    double ww = plan.basis_s[size_t(fw) * plan.bw + q];
                                    acc += wt * wh * ww *
                                           video(zt * plan.bt + i, zh * plan.bh + p,
                                                 zw * plan.bw + q, channel_base + c);
                                }
                            }
                        }
                        latent(zt, zh, zw, latent_base + plan.slot[c][j]) = float(acc);
                    }
}

}  // namespace

std::vector<std::array<int, 3>> zigzag_order(const CodecSpec& spec, int count) {
    std::vector<std::array<int, 3>> all;
    for (int ft = 0; ft < spec.temporal_factor; ++ft)
        for (int fh = 0; fh < spec.spatial_factor; ++fh)
            for (int fw = 0; fw < spec.spatial_factor; ++fw) all.push_back({ft, fh, fw});
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        int sa = a[0] + a[1] + a[2], sb = b[0] + b[1] + b[2];
        if (sa != sb) return sa < sb;
        return a < b;
    });
    if (count < 0 || count > int(all.size())) throw ConfigError("zigzag_order: bad count");
    all.resize(count);
    return all;
}

Grid4f encode_video(const Grid4f& video, const CodecSpec& spec) {
    BlockPlan plan(spec);
    check_dims(video, plan, 3, "encode_video");
    Grid4f latent(video.d0 / plan.bt, video.d1 / plan.bh, video.d2 / plan.bw, spec.latent_width);
    encode_channels(video, 0, plan, latent, 0);
    return latent;
}

Grid4f decode_video(const Grid4f& latent, const CodecSpec& spec) {
    BlockPlan plan(spec);
    if (latent.d3 != spec.latent_width) throw DataError("decode_video: wrong latent width");
    if (latent.d0 == 0 || latent.d1 == 0 || latent.d2 == 0)
        throw DataError("decode_video: empty latent");
    Grid4f video(latent.d0 * plan.bt, latent.d1 * plan.bh, latent.d2 * plan.bw, 3);
    for (int zt = 0; zt < latent.d0; ++zt)
        for (int zh = 0; zh < latent.d1; ++zh)
            for (int zw = 0; zw < latent.d2; ++zw)
                for (int c = 0; c < 3; ++c)
                    for (int i = 0; i < plan.bt; ++i)
                        for (int p = 0; p < plan.bh; ++p)
                            for (int q = 0; q < plan.bw; ++q) {
                                double acc = 0.0;
                                for (size_t j = 0; j < plan.kept[c].size(); ++j) {
                                    auto [ft, fh, fw] = plan.kept[c][j];
                                    acc += double(latent(zt, zh, zw, plan.slot[c][j])) *
                                           plan.basis_t[size_t(ft) * plan.bt + i] *
                                           plan.basis_s[size_t(fh) * plan.bh + p] *
                                           plan.basis_s[size_t(fw) * plan.bw + q];
                                }
                                acc = std::min(1.0, std::max(-1.0, acc));
                                video(zt * plan.bt + i, zh * plan.bh + p, zw * plan.bw + q, c) =
                                    float(acc);
                            }
    return video;
}

Grid4f encode_pluecker(const Grid4f& map, const CodecSpec& spec) {
    BlockPlan plan(spec);
    check_dims(map, plan, 6, "encode_pluecker");
    Grid4f latent(map.d0 / plan.bt, map.d1 / plan.bh, map.d2 / plan.bw, 2 * spec.latent_width);
    encode_channels(map, 0, plan, latent, 0);                       // rays
    encode_channels(map, 3, plan, latent, spec.latent_width);       // moments
    return latent;
}

}  // namespace dualray
