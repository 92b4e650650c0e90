#include "diffusion/diffusion.h"

#include <cmath>

#include "core/error.h"
#include "model/tokens.h"

namespace dualray {

void fill_gaussian(Grid4f& g, Rng& rng) {
    for (size_t i = 0; i < g.size(); ++i) g.data[i] = float(rng.normal());
}

Grid4f ddim_step(const Grid4f& x, const Grid4f& eps_hat, const NoiseSchedule& sched, int s_from,
                 int s_to) {
    if (!x.same_shape(eps_hat)) throw DataError("ddim_step: shape mismatch");
    if (s_to > s_from || s_from > sched.steps || s_to < 0)
        throw DataError("ddim_step: bad step pair");
    double sa = sched.sqrt_ab(s_from), sb = sched.sqrt_one_minus_ab(s_from);
    double ta = sched.sqrt_ab(s_to), tb = sched.sqrt_one_minus_ab(s_to);
    Grid4f out = x;
    for (size_t i = 0; i < x.size(); ++i) {
        double x0_hat = (double(x.data[i]) - sb * eps_hat.data[i]) / sa;
        out.data[i] = float(ta * x0_hat + tb * eps_hat.data[i]);
    }
    return out;
}

Grid4f ddim_sample(const NoiseSchedule& sched, const SamplerConfig& cfg, int t, int h, int w,
                   int k, const Denoiser& denoiser) {
    if (cfg.steps < 1) throw ConfigError("sampler: steps must be at least 1");
    if (cfg.steps > sched.steps) throw ConfigError("sampler: more inference steps than schedule");

    std::vector<int> plan(cfg.steps + 1);
    for (int j = 0; j <= cfg.steps; ++j)
        plan[j] = int(std::lround(double(sched.steps) * (cfg.steps - j) / cfg.steps));

    Grid4f x(t, h, w, k);
    Rng rng(mix_seed(cfg.seed, 0x696e6974));
    fill_gaussian(x, rng);

    for (int j = 0; j < cfg.steps; ++j) {
        int s = plan[j], s_next = plan[j + 1];
        if (s == s_next) continue;
        Grid4f eps_hat = denoiser(x, s, sched.sigma(s));
        x = ddim_step(x, eps_hat, sched, s, s_next);
    }
    return x;
}

namespace {

MatRM<float> grid_to_rows(const Grid4f& g) {
    MatRM<float> m(g.d0 * g.d1 * g.d2, g.d3);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g.data[i];
    return m;
}

Grid4f rows_to_grid(const MatRM<float>& m, int t, int h, int w) {
    Grid4f g(t, h, w, int(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) g.data[i] = m.data()[i];
    return g;
}

}  // namespace

double training_loss(const Params<float>& params, const EpisodePair& ep,
                     const NoiseSchedule& sched, Rng& rng, Params<float>* grad) {
    int s = 1 + int(rng.uniform_index(uint64_t(sched.steps)));
    Grid4f eps = ep.v_y;
    fill_gaussian(eps, rng);
    Grid4f noisy = add_noise(ep.v_y, eps, sched, s);
    TokenSequence seq = assemble_tokens(ep.v_x, ep.p_x, noisy, ep.p_y);
    MatRM<float> target = grid_to_rows(eps);
    if (grad) return double(net_loss_grad(params, seq, sched.sigma(s), target, *grad));
    MatRM<float> out = net_forward(params, seq, sched.sigma(s));
    double loss = (out - target).squaredNorm() / double(target.size());
    if (!std::isfinite(loss)) throw NumericError("training_loss: non-finite loss");
    return loss;
}

Grid4f sample_target_latent(const Params<float>& params, const EpisodePair& conditioning,
                            const NoiseSchedule& sched, const SamplerConfig& cfg) {
    const Grid4f& v_x = conditioning.v_x;
    Denoiser den = [&](const Grid4f& x_s, int, double sigma) {
        TokenSequence seq = assemble_tokens(v_x, conditioning.p_x, x_s, conditioning.p_y);
        MatRM<float> out = net_forward(params, seq, sigma);
        return rows_to_grid(out, x_s.d0, x_s.d1, x_s.d2);
    };
    return ddim_sample(sched, cfg, v_x.d0, v_x.d1, v_x.d2, params.cfg.latent_d, den);
}

}  // namespace dualray
