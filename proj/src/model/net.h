#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "core/error.h"
#include "core/rng.h"
#include "model/config.h"
#include "model/rope.h"
#include "model/tokens.h"

namespace dualray {

template <typename S>
using MatRM = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using VecD = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// All linear layers use the row-vector convention y = x * W + b, W shaped
// in x out. Blocks are pre-norm with per-view adaptive modulation: the
// no-affine LayerNorm output is scaled/shifted per view, and residual
// branches are gated. Modulation, gates, and the output head start at zero
// so an untrained model predicts exactly zero.
template <typename S>
struct BlockParams {
    MatRM<S> w_mod;  // model_dim x 6*model_dim
    VecD<S> b_mod;
    MatRM<S> wq, wk, wv, wo;  // model_dim x model_dim
    VecD<S> bq, bk, bv, bo;
    MatRM<S> w1;  // model_dim x mlp_dim
    VecD<S> b1;
    MatRM<S> w2;  // mlp_dim x model_dim
    VecD<S> b2;
};

template <typename S>
struct Params {
    ModelConfig cfg;
    MatRM<S> w_in;       // token_width x model_dim
    VecD<S> b_in;
    MatRM<S> view_embed; // views x model_dim
    MatRM<S> wc1, wc2;   // model_dim x model_dim (sigma conditioning MLP)
    VecD<S> bc1, bc2;
    std::vector<BlockParams<S>> blocks;
    MatRM<S> w_out;  // model_dim x latent_d
    VecD<S> b_out;
};

template <typename S, typename F>
void visit_params(Params<S>& p, F&& f) {
    f(p.w_in);
    f(p.b_in);
    f(p.view_embed);
    f(p.wc1);
    f(p.bc1);
    f(p.wc2);
    f(p.bc2);
    for (auto& b : p.blocks) {
        f(b.w_mod);
        f(b.b_mod);
        f(b.wq);
        f(b.bq);
        f(b.wk);
        f(b.bk);
        f(b.wv);
        f(b.bv);
        f(b.wo);
        f(b.bo);
        f(b.w1);
        f(b.b1);
        f(b.w2);
        f(b.b2);
    }
    f(p.w_out);
    f(p.b_out);
}

template <typename S, typename F>
void visit_params(const Params<S>& p, F&& f) {
    f(p.w_in);
    f(p.b_in);
    f(p.view_embed);
    f(p.wc1);
    f(p.bc1);
    f(p.wc2);
    f(p.bc2);
    for (const auto& b : p.blocks) {
        f(b.w_mod);
        f(b.b_mod);
        f(b.wq);
        f(b.bq);
        f(b.wk);
        f(b.bk);
        f(b.wv);
        f(b.bv);
        f(b.wo);
        f(b.bo);
        f(b.w1);
        f(b.b1);
        f(b.w2);
        f(b.b2);
    }
    f(p.w_out);
    f(p.b_out);
}

template <typename S>
void shape_params(Params<S>& p, const ModelConfig& cfg) {
    validate_config(cfg);
    p.cfg = cfg;
    int d = cfg.model_dim, tw = cfg.token_width(), mlp = cfg.mlp_dim();
    p.w_in.setZero(tw, d);
    p.b_in.setZero(d);
    p.view_embed.setZero(cfg.views, d);
    p.wc1.setZero(d, d);
    p.bc1.setZero(d);
    p.wc2.setZero(d, d);
    p.bc2.setZero(d);
    p.blocks.resize(cfg.depth);
    for (auto& b : p.blocks) {
        b.w_mod.setZero(d, 6 * d);
        b.b_mod.setZero(6 * d);
        b.wq.setZero(d, d);
        b.bq.setZero(d);
        b.wk.setZero(d, d);
        b.bk.setZero(d);
        b.wv.setZero(d, d);
        b.bv.setZero(d);
        b.wo.setZero(d, d);
        b.bo.setZero(d);
        b.w1.setZero(d, mlp);
        b.b1.setZero(mlp);
        b.w2.setZero(mlp, d);
        b.b2.setZero(d);
    }
    p.w_out.setZero(d, cfg.latent_d);
    p.b_out.setZero(cfg.latent_d);
}

template <typename S>
size_t param_count(const Params<S>& p) {
    size_t n = 0;
    visit_params(p, [&n](const auto& t) { n += size_t(t.size()); });
    return n;
}

template <typename S>
void params_to_flat(const Params<S>& p, std::vector<S>& out) {
    out.clear();
    out.reserve(param_count(p));
    visit_params(p, [&out](const auto& t) { out.insert(out.end(), t.data(), t.data() + t.size()); });
}

template <typename S>
void params_from_flat(Params<S>& p, const std::vector<S>& flat) {
    size_t pos = 0;
    visit_params(p, [&](auto& t) {
        if (pos + size_t(t.size()) > flat.size()) throw DataError("params_from_flat: short vector");
        std::copy(flat.begin() + pos, flat.begin() + pos + t.size(), t.data());
        pos += size_t(t.size());
    });
    if (pos != flat.size()) throw DataError("params_from_flat: length mismatch");
}

template <typename S>
void zero_params(Params<S>& p) {
    visit_params(p, [](auto& t) { t.setZero(); });
}

namespace detail {

template <typename S, typename M>
void init_uniform(M& m, Rng& rng, double fan_in, double fan_out) {
    double a = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = S(rng.uniform(-a, a));
}

}  // namespace detail

// Scaled-uniform init; modulation and output head stay zero so residual
// branches and the prediction are disabled until trained.
template <typename S>
void init_params(Params<S>& p, const ModelConfig& cfg, uint64_t seed) {
    shape_params(p, cfg);
    Rng rng(mix_seed(seed, 0x70617261));
    int d = cfg.model_dim, tw = cfg.token_width(), mlp = cfg.mlp_dim();
    detail::init_uniform<S>(p.w_in, rng, tw, d);
    for (Eigen::Index i = 0; i < p.view_embed.size(); ++i)
        p.view_embed.data()[i] = S(rng.uniform(-0.02, 0.02));
    detail::init_uniform<S>(p.wc1, rng, d, d);
    detail::init_uniform<S>(p.wc2, rng, d, d);
    for (auto& b : p.blocks) {
        detail::init_uniform<S>(b.wq, rng, d, d);
        detail::init_uniform<S>(b.wk, rng, d, d);
        detail::init_uniform<S>(b.wv, rng, d, d);
        detail::init_uniform<S>(b.wo, rng, d, d);
        detail::init_uniform<S>(b.w1, rng, d, mlp);
        detail::init_uniform<S>(b.w2, rng, mlp, d);
    }
}

template <typename S>
struct BlockCache {
    MatRM<S> ln1_hat, y1, q_rot, k_rot, v, probs, attn_concat, attn_out;
    MatRM<S> ln2_hat, y2, mlp_pre, mlp_act, mlp_out;
    VecD<S> istd1, istd2;
};

template <typename S>
struct FwdCache {
    MatRM<S> tokens;            // N x token_width
    MatRM<S> femb, a1, s1, c;   // views x model_dim
    std::vector<MatRM<S>> mod;  // per block: views x 6*model_dim
    std::vector<BlockCache<S>> blocks;
    std::vector<int> out_rows;  // sequence rows of view 1 in grid order
    MatRM<S> lnf_hat;
    VecD<S> istdf;
    MatRM<S> out;  // (t*h*w) x latent_d
    Eigen::MatrixXd rope_cos, rope_sin;  // N x head_dim/2
};

namespace detail {

constexpr double kLnEps = 1e-6;

// Row-wise LayerNorm without affine parameters.
template <typename S>
void layer_norm(const MatRM<S>& x, MatRM<S>& hat, VecD<S>& istd) {
    int n = int(x.rows()), d = int(x.cols());
    hat.resize(n, d);
    istd.resize(n);
    for (int i = 0; i < n; ++i) {
        S mu = x.row(i).mean();
        S var = (x.row(i).array() - mu).square().mean();
        S inv = S(1) / std::sqrt(var + S(kLnEps));
        istd[i] = inv;
        hat.row(i) = (x.row(i).array() - mu) * inv;
    }
}

// Given g = dL/d(hat), returns dL/dx.
template <typename S>
MatRM<S> layer_norm_backward(const MatRM<S>& g, const MatRM<S>& hat, const VecD<S>& istd) {
    int n = int(g.rows()), d = int(g.cols());
    MatRM<S> dx(n, d);
    for (int i = 0; i < n; ++i) {
        S gm = g.row(i).mean();
        S gxm = (g.row(i).array() * hat.row(i).array()).mean();
        dx.row(i) = ((g.row(i).array() - gm) - hat.row(i).array() * gxm) * istd[i];
    }
    return dx;
}

template <typename S>
S gelu(S x) {
    const double k = 0.7978845608028654;  // sqrt(2/pi)
    double xd = double(x);
    double u = k * (xd + 0.044715 * xd * xd * xd);
    return S(0.5 * xd * (1.0 + std::tanh(u)));
}

template <typename S>
S gelu_grad(S x) {
    const double k = 0.7978845608028654;
    double xd = double(x);
    double u = k * (xd + 0.044715 * xd * xd * xd);
    double th = std::tanh(u);
    double du = k * (1.0 + 3.0 * 0.044715 * xd * xd);
    return S(0.5 * (1.0 + th) + 0.5 * xd * (1.0 - th * th) * du);
}

template <typename S>
S silu(S x) {
    double xd = double(x);
    double sg = 1.0 / (1.0 + std::exp(-xd));
    return S(xd * sg);
}

template <typename S>
S silu_grad(S x) {
    double xd = double(x);
    double sg = 1.0 / (1.0 + std::exp(-xd));
    return S(sg * (1.0 + xd * (1.0 - sg)));
}

// Sinusoidal embedding of sigma (scaled by 1000): cos halves then sin halves.
template <typename S>
void sigma_embedding(double sigma, int dim, S* out) {
    int half = dim / 2;
    double t = sigma * 1000.0;
    for (int i = 0; i < half; ++i) {
        double freq = std::exp(-std::log(10000.0) * double(i) / double(half));
        out[i] = S(std::cos(t * freq));
        out[half + i] = S(std::sin(t * freq));
    }
}

}  // namespace detail

// Forward pass. sigma conditions the target view; the input view always
// sees sigma 0. Output rows follow grid order (ti, hi, wi) regardless of
// token ordering in the sequence.
template <typename S>
MatRM<S> net_forward(const Params<S>& p, const TokenSequence& seq, double sigma,
                     FwdCache<S>* cache_out = nullptr) {
    const ModelConfig& cfg = p.cfg;
    if (seq.d != cfg.latent_d) throw DataError("net_forward: sequence width disagrees with config");
    int n = seq.rows(), dim = cfg.model_dim, heads = cfg.heads, dh = cfg.head_dim();
    int cells = seq.t * seq.h * seq.w;
    if (n != 2 * cells || int(seq.pos.size()) != n)
        throw DataError("net_forward: malformed token sequence");

    FwdCache<S> local;
    FwdCache<S>& cc = cache_out ? *cache_out : local;

    cc.tokens.resize(n, seq.width());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < seq.width(); ++j) {
            float v = seq.row(i)[j];
            if (!std::isfinite(v))
                throw NumericError("net_forward: non-finite token at row " + std::to_string(i));
            cc.tokens(i, j) = S(v);
        }

    bool params_ok = true;
    visit_params(p, [&params_ok](const auto& t) { params_ok = params_ok && t.allFinite(); });
    if (!params_ok) throw NumericError("net_forward: non-finite parameter tensor");

    // Rope angles per row; identical for every head.
    cc.rope_cos.resize(n, dh / 2);
    cc.rope_sin.resize(n, dh / 2);
    {
        std::vector<double> cs, sn;
        for (int i = 0; i < n; ++i) {
            rope_angles(dh, cfg.rope_base, seq.pos[i].ti, seq.pos[i].hi, seq.pos[i].wi, cs, sn);
            for (int j = 0; j < dh / 2; ++j) {
                cc.rope_cos(i, j) = cs[j];
                cc.rope_sin(i, j) = sn[j];
            }
        }
    }

    // Conditioning per view.
    cc.femb.resize(cfg.views, dim);
    for (int v = 0; v < cfg.views; ++v)
        detail::sigma_embedding(v == 0 ? 0.0 : sigma, dim, cc.femb.row(v).data());
    cc.a1 = cc.femb * p.wc1;
    cc.a1.rowwise() += p.bc1.transpose();
    cc.s1 = cc.a1.unaryExpr([](S x) { return detail::silu(x); });
    cc.c = cc.s1 * p.wc2;
    cc.c.rowwise() += p.bc2.transpose();

    cc.mod.resize(cfg.depth);
    for (int b = 0; b < cfg.depth; ++b) {
        cc.mod[b] = cc.c * p.blocks[b].w_mod;
        cc.mod[b].rowwise() += p.blocks[b].b_mod.transpose();
    }

    MatRM<S> x = cc.tokens * p.w_in;
    x.rowwise() += p.b_in.transpose();
    for (int i = 0; i < n; ++i) x.row(i) += p.view_embed.row(seq.pos[i].view);

    cc.blocks.resize(cfg.depth);
    S inv_sqrt_dh = S(1.0 / std::sqrt(double(dh)));

    for (int b = 0; b < cfg.depth; ++b) {
        const BlockParams<S>& bp = p.blocks[b];
        BlockCache<S>& bc = cc.blocks[b];
        const MatRM<S>& mod = cc.mod[b];

        MatRM<S> scale1p = mod.block(0, dim, cfg.views, dim);
        scale1p.array() += S(1);
        MatRM<S> scale2p = mod.block(0, 4 * dim, cfg.views, dim);
        scale2p.array() += S(1);
        auto shift1 = mod.block(0, 0, cfg.views, dim);
        auto gate1 = mod.block(0, 2 * dim, cfg.views, dim);
        auto shift2 = mod.block(0, 3 * dim, cfg.views, dim);
        auto gate2 = mod.block(0, 5 * dim, cfg.views, dim);

        detail::layer_norm(x, bc.ln1_hat, bc.istd1);
        bc.y1.resize(n, dim);
        for (int i = 0; i < n; ++i) {
            int v = seq.pos[i].view;
            bc.y1.row(i) = bc.ln1_hat.row(i).cwiseProduct(scale1p.row(v)) + shift1.row(v);
        }

        MatRM<S> q = bc.y1 * bp.wq;
        q.rowwise() += bp.bq.transpose();
        MatRM<S> k = bc.y1 * bp.wk;
        k.rowwise() += bp.bk.transpose();
        bc.v = bc.y1 * bp.wv;
        bc.v.rowwise() += bp.bv.transpose();

        bc.q_rot = q;
        bc.k_rot = k;
        {
            std::vector<double> cs(dh / 2), sn(dh / 2);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < dh / 2; ++j) {
                    cs[j] = cc.rope_cos(i, j);
                    sn[j] = cc.rope_sin(i, j);
                }
                for (int h = 0; h < heads; ++h) {
                    rope_rotate_head(bc.q_rot.row(i).data() + h * dh, dh, cs, sn);
                    rope_rotate_head(bc.k_rot.row(i).data() + h * dh, dh, cs, sn);
                }
            }
        }

        bc.probs.resize(size_t(heads) * n, n);
        bc.attn_concat.resize(n, dim);
        for (int h = 0; h < heads; ++h) {
            auto qh = bc.q_rot.block(0, h * dh, n, dh);
            auto kh = bc.k_rot.block(0, h * dh, n, dh);
            auto vh = bc.v.block(0, h * dh, n, dh);
            MatRM<S> scores = (qh * kh.transpose()) * inv_sqrt_dh;
            for (int i = 0; i < n; ++i) {
                S mx = scores.row(i).maxCoeff();
                Eigen::Array<S, 1, Eigen::Dynamic> e = (scores.row(i).array() - mx).exp();
                bc.probs.row(size_t(h) * n + i) = (e / e.sum()).matrix();
            }
            bc.attn_concat.block(0, h * dh, n, dh) =
                bc.probs.block(h * n, 0, n, n) * vh;
        }
        bc.attn_out = bc.attn_concat * bp.wo;
        bc.attn_out.rowwise() += bp.bo.transpose();

        for (int i = 0; i < n; ++i)
            x.row(i) += bc.attn_out.row(i).cwiseProduct(gate1.row(seq.pos[i].view));

        detail::layer_norm(x, bc.ln2_hat, bc.istd2);
        bc.y2.resize(n, dim);
        for (int i = 0; i < n; ++i) {
            int v = seq.pos[i].view;
            bc.y2.row(i) = bc.ln2_hat.row(i).cwiseProduct(scale2p.row(v)) + shift2.row(v);
        }
        bc.mlp_pre = bc.y2 * bp.w1;
        bc.mlp_pre.rowwise() += bp.b1.transpose();
        bc.mlp_act = bc.mlp_pre.unaryExpr([](S xv) { return detail::gelu(xv); });
        bc.mlp_out = bc.mlp_act * bp.w2;
        bc.mlp_out.rowwise() += bp.b2.transpose();

        for (int i = 0; i < n; ++i)
            x.row(i) += bc.mlp_out.row(i).cwiseProduct(gate2.row(seq.pos[i].view));
    }

    // Project view-1 rows to the latent grid, addressed by position.
    cc.out_rows.assign(cells, -1);
    for (int i = 0; i < n; ++i) {
        const TokenPos& tp = seq.pos[i];
        if (tp.view == 1) cc.out_rows[(size_t(tp.ti) * seq.h + tp.hi) * seq.w + tp.wi] = i;
    }
    for (int cell = 0; cell < cells; ++cell)
        if (cc.out_rows[cell] < 0) throw DataError("net_forward: missing target-view token");

    MatRM<S> gathered(cells, dim);
    for (int cell = 0; cell < cells; ++cell) gathered.row(cell) = x.row(cc.out_rows[cell]);
    detail::layer_norm(gathered, cc.lnf_hat, cc.istdf);
    cc.out = cc.lnf_hat * p.w_out;
    cc.out.rowwise() += p.b_out.transpose();
    return cc.out;
}

// Mean-squared-error loss against a target grid plus full reverse-mode
// gradients. grad must be shaped like p (shape_params); it is zeroed here.
template <typename S>
S net_loss_grad(const Params<S>& p, const TokenSequence& seq, double sigma,
                const MatRM<S>& target, Params<S>& grad) {
    const ModelConfig& cfg = p.cfg;
    FwdCache<S> cc;
    MatRM<S> out = net_forward(p, seq, sigma, &cc);
    if (out.rows() != target.rows() || out.cols() != target.cols())
        throw DataError("net_loss_grad: target shape mismatch");

    int n = seq.rows(), dim = cfg.model_dim, heads = cfg.heads, dh = cfg.head_dim();
    int cells = int(out.rows());
    S count = S(double(cells) * cfg.latent_d);

    MatRM<S> diff = out - target;
    S loss = diff.squaredNorm() / count;
    if (!std::isfinite(double(loss))) throw NumericError("net_loss_grad: non-finite loss");

    zero_params(grad);

    MatRM<S> dout = diff * (S(2) / count);

    // Output head.
    grad.w_out += cc.lnf_hat.transpose() * dout;
    grad.b_out += dout.colwise().sum().transpose();
    MatRM<S> dlnf = dout * p.w_out.transpose();
    MatRM<S> dgathered = detail::layer_norm_backward(dlnf, cc.lnf_hat, cc.istdf);

    MatRM<S> dx = MatRM<S>::Zero(n, dim);
    for (int cell = 0; cell < cells; ++cell) dx.row(cc.out_rows[cell]) = dgathered.row(cell);

    MatRM<S> dc = MatRM<S>::Zero(cfg.views, dim);
    S inv_sqrt_dh = S(1.0 / std::sqrt(double(dh)));

    for (int b = cfg.depth - 1; b >= 0; --b) {
        const BlockParams<S>& bp = p.blocks[b];
        BlockParams<S>& bg = grad.blocks[b];
        const BlockCache<S>& bc = cc.blocks[b];
        const MatRM<S>& mod = cc.mod[b];
        MatRM<S> dmod = MatRM<S>::Zero(cfg.views, 6 * dim);

        MatRM<S> scale1p = mod.block(0, dim, cfg.views, dim);
        scale1p.array() += S(1);
        MatRM<S> scale2p = mod.block(0, 4 * dim, cfg.views, dim);
        scale2p.array() += S(1);
        auto gate1 = mod.block(0, 2 * dim, cfg.views, dim);
        auto gate2 = mod.block(0, 5 * dim, cfg.views, dim);

        // MLP branch: x_out = x_mid + gate2 (.) mlp_out.
        MatRM<S> dmlp_out(n, dim);
        for (int i = 0; i < n; ++i) {
            int v = seq.pos[i].view;
            dmlp_out.row(i) = dx.row(i).cwiseProduct(gate2.row(v));
            dmod.row(v).segment(5 * dim, dim) += dx.row(i).cwiseProduct(bc.mlp_out.row(i));
        }
        bg.w2 += bc.mlp_act.transpose() * dmlp_out;
        bg.b2 += dmlp_out.colwise().sum().transpose();
        MatRM<S> dact = dmlp_out * bp.w2.transpose();
        MatRM<S> dpre =
            dact.cwiseProduct(bc.mlp_pre.unaryExpr([](S xv) { return detail::gelu_grad(xv); }));
        bg.w1 += bc.y2.transpose() * dpre;
        bg.b1 += dpre.colwise().sum().transpose();
        MatRM<S> dy2 = dpre * bp.w1.transpose();

        MatRM<S> dln2(n, dim);
        for (int i = 0; i < n; ++i) {
            int v = seq.pos[i].view;
            dln2.row(i) = dy2.row(i).cwiseProduct(scale2p.row(v));
            dmod.row(v).segment(4 * dim, dim) += dy2.row(i).cwiseProduct(bc.ln2_hat.row(i));
            dmod.row(v).segment(3 * dim, dim) += dy2.row(i);
        }
        dx += detail::layer_norm_backward(dln2, bc.ln2_hat, bc.istd2);

        // Attention branch: x_mid = x_in + gate1 (.) attn_out.
        MatRM<S> dattn_out(n, dim);
        for (int i = 0; i < n; ++i) {
            int v = seq.pos[i].view;
            dattn_out.row(i) = dx.row(i).cwiseProduct(gate1.row(v));
            dmod.row(v).segment(2 * dim, dim) += dx.row(i).cwiseProduct(bc.attn_out.row(i));
        }
        bg.wo += bc.attn_concat.transpose() * dattn_out;
        bg.bo += dattn_out.colwise().sum().transpose();
        MatRM<S> do_concat = dattn_out * bp.wo.transpose();

        MatRM<S> dq_rot = MatRM<S>::Zero(n, dim);
        MatRM<S> dk_rot = MatRM<S>::Zero(n, dim);
        MatRM<S> dv = MatRM<S>::Zero(n, dim);
        for (int h = 0; h < heads; ++h) {
            auto dOh = do_concat.block(0, h * dh, n, dh);
            auto vh = bc.v.block(0, h * dh, n, dh);
            auto ph = bc.probs.block(h * n, 0, n, n);
            MatRM<S> dp = dOh * vh.transpose();
            dv.block(0, h * dh, n, dh) += ph.transpose() * dOh;
            MatRM<S> ds(n, n);
            for (int i = 0; i < n; ++i) {
                S dot = ph.row(i).cwiseProduct(dp.row(i)).sum();
                ds.row(i) = (ph.row(i).array() * (dp.row(i).array() - dot)).matrix();
            }
            auto qh = bc.q_rot.block(0, h * dh, n, dh);
            auto kh = bc.k_rot.block(0, h * dh, n, dh);
            dq_rot.block(0, h * dh, n, dh) += (ds * kh) * inv_sqrt_dh;
            dk_rot.block(0, h * dh, n, dh) += (ds.transpose() * qh) * inv_sqrt_dh;
        }

        // Undo the rotations (their transpose is the inverse rotation).
        {
            std::vector<double> cs(dh / 2), sn(dh / 2);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < dh / 2; ++j) {
                    cs[j] = cc.rope_cos(i, j);
                    sn[j] = cc.rope_sin(i, j);
                }
                for (int h = 0; h < heads; ++h) {
                    rope_rotate_head(dq_rot.row(i).data() + h * dh, dh, cs, sn, true);
                    rope_rotate_head(dk_rot.row(i).data() + h * dh, dh, cs, sn, true);
                }
            }
        }

        bg.wq += bc.y1.transpose() * dq_rot;
        bg.bq += dq_rot.colwise().sum().transpose();
        bg.wk += bc.y1.transpose() * dk_rot;
        bg.bk += dk_rot.colwise().sum().transpose();
        bg.wv += bc.y1.transpose() * dv;
        bg.bv += dv.colwise().sum().transpose();
        MatRM<S> dy1 = dq_rot * bp.wq.transpose() + dk_rot * bp.wk.transpose() +
                       dv * bp.wv.transpose();

        MatRM<S> dln1(n, dim);
        for (int i = 0; i < n; ++i) {
            int v = seq.pos[i].view;
            dln1.row(i) = dy1.row(i).cwiseProduct(scale1p.row(v));
            dmod.row(v).segment(dim, dim) += dy1.row(i).cwiseProduct(bc.ln1_hat.row(i));
            dmod.row(v).segment(0, dim) += dy1.row(i);
        }
        dx += detail::layer_norm_backward(dln1, bc.ln1_hat, bc.istd1);

        bg.w_mod += cc.c.transpose() * dmod;
        bg.b_mod += dmod.colwise().sum().transpose();
        dc += dmod * bp.w_mod.transpose();
    }

    // Conditioning MLP.
    grad.wc2 += cc.s1.transpose() * dc;
    grad.bc2 += dc.colwise().sum().transpose();
    MatRM<S> ds1 = dc * p.wc2.transpose();
    MatRM<S> da1 =
        ds1.cwiseProduct(cc.a1.unaryExpr([](S xv) { return detail::silu_grad(xv); }));
    grad.wc1 += cc.femb.transpose() * da1;
    grad.bc1 += da1.colwise().sum().transpose();

    // Input projection and view embeddings.
    for (int i = 0; i < n; ++i) grad.view_embed.row(seq.pos[i].view) += dx.row(i);
    grad.w_in += cc.tokens.transpose() * dx;
    grad.b_in += dx.colwise().sum().transpose();

    return loss;
}

}  // namespace dualray
