#include "diffusion/schedule.h"

#include <cmath>

#include "core/error.h"

namespace dualray {

double NoiseSchedule::sqrt_ab(int s) const { return std::sqrt(alpha_bar.at(s)); }
double NoiseSchedule::sqrt_one_minus_ab(int s) const { return std::sqrt(1.0 - alpha_bar.at(s)); }
double NoiseSchedule::sigma(int s) const { return sqrt_one_minus_ab(s); }

NoiseSchedule make_cosine_schedule(int steps) {
    if (steps < 1) throw ConfigError("schedule: steps must be positive");
    auto f = [steps](int s) {
        double v = std::cos((double(s) / steps + 0.008) / 1.008 * M_PI / 2.0);
        return v * v;
    };
    NoiseSchedule sched;
    sched.steps = steps;
    sched.alpha_bar.resize(steps + 1);
    sched.alpha_bar[0] = 1.0;
    double f_prev = f(0);
    for (int s = 1; s <= steps; ++s) {
        double f_cur = f(s);
        double beta = std::min(1.0 - f_cur / f_prev, 0.999);
        sched.alpha_bar[s] = sched.alpha_bar[s - 1] * (1.0 - beta);
        f_prev = f_cur;
    }
    return sched;
}

Grid4f add_noise(const Grid4f& x0, const Grid4f& eps, const NoiseSchedule& sched, int s) {
    if (!x0.same_shape(eps)) throw DataError("add_noise: shape mismatch");
    if (s < 0 || s > sched.steps) throw DataError("add_noise: step out of range");
    float a = float(sched.sqrt_ab(s));
    float b = float(sched.sqrt_one_minus_ab(s));
    Grid4f out = x0;
    for (size_t i = 0; i < out.size(); ++i) out.data[i] = a * x0.data[i] + b * eps.data[i];
    return out;
}

}  // namespace dualray
