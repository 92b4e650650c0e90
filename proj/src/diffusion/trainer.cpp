#include "diffusion/trainer.h"

#include <cmath>

#include "core/error.h"

namespace dualray {

namespace {

std::vector<std::pair<float*, size_t>> tensor_views(Params<float>& p) {
    std::vector<std::pair<float*, size_t>> out;
    visit_params(p, [&out](auto& t) { out.emplace_back(t.data(), size_t(t.size())); });
    return out;
}

}  // namespace

Adam::Adam(Params<float>& params, double lr) : lr_(lr) {
    views_ = tensor_views(params);
    size_t total = 0;
    for (auto& [ptr, n] : views_) total += n;
    m_.assign(total, 0.0f);
    v_.assign(total, 0.0f);
}

void Adam::step(const Params<float>& grad) {
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++t_;
    double c1 = 1.0 - std::pow(b1, double(t_));
    double c2 = 1.0 - std::pow(b2, double(t_));

    std::vector<std::pair<float*, size_t>> gviews =
        tensor_views(const_cast<Params<float>&>(grad));
    if (gviews.size() != views_.size()) throw DataError("adam: gradient shape mismatch");

    size_t off = 0;
    for (size_t ti = 0; ti < views_.size(); ++ti) {
        auto [p, n] = views_[ti];
        auto [g, gn] = gviews[ti];
        if (gn != n) throw DataError("adam: gradient tensor size mismatch");
        for (size_t i = 0; i < n; ++i) {
            double gi = g[i];
            double m = b1 * m_[off + i] + (1.0 - b1) * gi;
            double v = b2 * v_[off + i] + (1.0 - b2) * gi * gi;
            m_[off + i] = float(m);
            v_[off + i] = float(v);
            double update = lr_ * (m / c1) / (std::sqrt(v / c2) + eps);
            p[i] = float(double(p[i]) - update);
        }
        off += n;
    }
}

void train_loop(Params<float>& params, const std::vector<EpisodePair>& episodes,
                const NoiseSchedule& sched, const TrainConfig& cfg, int start_step,
                const TrainHooks& hooks) {
    if (episodes.empty()) throw DataError("train: no episodes");
    if (cfg.total_steps < start_step) throw ConfigError("train: total steps below start step");

    Adam opt(params, cfg.lr);
    Params<float> grad;
    shape_params(grad, params.cfg);

    for (int step = start_step + 1; step <= cfg.total_steps; ++step) {
        Rng rng(mix_seed(cfg.seed, 0x73746570, uint64_t(step)));
        const EpisodePair& ep = episodes[rng.uniform_index(episodes.size())];
        double loss;
        try {
            loss = training_loss(params, ep, sched, rng, &grad);
        } catch (const NumericError& e) {
            throw NumericError("training diverged at step " + std::to_string(step) + ": " +
                               e.what());
        }
        opt.step(grad);

        bool last = step == cfg.total_steps;
        if (hooks.on_log && ((cfg.log_every > 0 && step % cfg.log_every == 0) || last))
            hooks.on_log(step, loss);
        if (hooks.on_checkpoint &&
            ((cfg.checkpoint_every > 0 && step % cfg.checkpoint_every == 0) || last))
            hooks.on_checkpoint(step, params);
    }
}

}  // namespace dualray
