#pragma once

#include <vector>

#include "core/grid.h"

namespace dualray {

// Variance-preserving cosine schedule. alpha_bar is built as a running
// product of per-step (1 - beta) with beta clipped at 0.999, so
// alpha_bar(N) stays strictly positive even though the raw cosine profile
// reaches zero at s = N.
struct NoiseSchedule {
    int steps = 0;
    std::vector<double> alpha_bar;  // size steps + 1, alpha_bar[0] = 1

    double sqrt_ab(int s) const;
    double sqrt_one_minus_ab(int s) const;
    // Conditioning value fed to the denoiser: sqrt(1 - alpha_bar(s)).
    double sigma(int s) const;
};

NoiseSchedule make_cosine_schedule(int steps = 1000);

// x_s = sqrt(alpha_bar(s)) * x0 + sqrt(1 - alpha_bar(s)) * eps.
Grid4f add_noise(const Grid4f& x0, const Grid4f& eps, const NoiseSchedule& sched, int s);

}  // namespace dualray
