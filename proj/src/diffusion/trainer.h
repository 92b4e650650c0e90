#pragma once

#include <functional>

#include "diffusion/diffusion.h"

namespace dualray {

struct TrainConfig {
    int total_steps = 2000;
    double lr = 1e-3;
    int checkpoint_every = 500;
    int log_every = 10;
    uint64_t seed = 0;
};

// Adam over the parameter tensors. Moments live only in memory; a resumed
// run restarts them, so checkpoints stay a pure function of (config echo,
// step, seed, parameters).
class Adam {
public:
    Adam(Params<float>& params, double lr);
    void step(const Params<float>& grad);

private:
    std::vector<std::pair<float*, size_t>> views_;
    std::vector<float> m_, v_;
    double lr_;
    int64_t t_ = 0;
};

struct TrainHooks {
    std::function<void(int step, double loss)> on_log;
    std::function<void(int step, const Params<float>&)> on_checkpoint;
};

// Steps are numbered 1..total_steps; a resume passes start_step = stored
// checkpoint step. Every step derives its own RNG stream from (seed, step),
// so the sequence of draws does not depend on where training started.
void train_loop(Params<float>& params, const std::vector<EpisodePair>& episodes,
                const NoiseSchedule& sched, const TrainConfig& cfg, int start_step,
                const TrainHooks& hooks);

}  // namespace dualray
