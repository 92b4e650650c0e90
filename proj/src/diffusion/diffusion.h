#pragma once

#include <functional>

#include "core/rng.h"
#include "diffusion/schedule.h"
#include "model/net.h"

namespace dualray {

// Fills a grid with standard normal draws in storage order.
void fill_gaussian(Grid4f& g, Rng& rng);

// Denoiser callback: given the current noisy latent, the schedule step, and
// the conditioning sigma, return the predicted noise.
using Denoiser = std::function<Grid4f(const Grid4f& x_s, int s, double sigma)>;

struct SamplerConfig {
    int steps = 50;          // inference steps over the schedule
    uint64_t seed = 0;
    int samples_per_condition = 1;
};

// Deterministic update x_{s'} = sqrt(ab(s')) x0_hat + sqrt(1-ab(s')) eps_hat
// over an evenly spaced descending step subsequence ending at 0. The initial
// latent is seeded standard normal of the given shape.
Grid4f ddim_sample(const NoiseSchedule& sched, const SamplerConfig& cfg, int t, int h, int w,
                   int k, const Denoiser& denoiser);

// One sampler update in isolation (exposed for schedule tests).
Grid4f ddim_step(const Grid4f& x, const Grid4f& eps_hat, const NoiseSchedule& sched, int s_from,
                 int s_to);

// Latent-space episode fixture: precomputed codec latents of both views.
struct EpisodePair {
    Grid4f v_x, p_x, v_y, p_y;
};

// Draws a step uniformly from [1, N], noises only the target RGB latent,
// and runs the denoiser; loss is MSE between its prediction and the drawn
// noise. With a grad output the full parameter gradient is produced.
double training_loss(const Params<float>& params, const EpisodePair& ep,
                     const NoiseSchedule& sched, Rng& rng, Params<float>* grad = nullptr);

// Conditional generation of the target RGB latent for one episode.
Grid4f sample_target_latent(const Params<float>& params, const EpisodePair& conditioning,
                            const NoiseSchedule& sched, const SamplerConfig& cfg);

}  // namespace dualray
