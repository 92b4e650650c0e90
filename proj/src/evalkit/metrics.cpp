#include "evalkit/metrics.h"

#include <cmath>

#include "core/error.h"

namespace dualray {

FrameView frame_view(const Grid4f& video, int t) {
    if (t < 0 || t >= video.d0) throw DataError("frame_view: frame index out of range");
    FrameView f;
    f.px = video.data.data() + video.index(t, 0, 0, 0);
    f.h = video.d1;
    f.w = video.d2;
    f.c = video.d3;
    return f;
}

double psnr(FrameView a, FrameView b) {
    if (a.h != b.h || a.w != b.w || a.c != b.c) throw DataError("psnr: shape mismatch");
    size_t n = size_t(a.h) * a.w * a.c;
    if (n == 0) throw DataError("psnr: empty image");
    double acc = 0;
    for (size_t i = 0; i < n; ++i) {
        double d = double(a.px[i]) - double(b.px[i]);
        acc += d * d;
    }
    double mse = acc / double(n);
    if (mse <= 0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

namespace {

std::vector<double> gaussian_window(int side) {
    const double sigma = 1.5;
    std::vector<double> w(size_t(side) * side);
    double c = (side - 1) / 2.0, sum = 0;
    for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j) {
            double d2 = (i - c) * (i - c) + (j - c) * (j - c);
            double v = std::exp(-d2 / (2 * sigma * sigma));
            w[size_t(i) * side + j] = v;
            sum += v;
        }
    for (double& v : w) v /= sum;
    return w;
}

std::vector<double> to_gray(FrameView f) {
    std::vector<double> g(size_t(f.h) * f.w);
    for (size_t i = 0; i < g.size(); ++i) {
        double acc = 0;
        for (int ch = 0; ch < f.c; ++ch) acc += f.px[i * f.c + ch];
        g[i] = acc / f.c;
    }
    return g;
}

}  // namespace

double ssim(FrameView a, FrameView b) {
    if (a.h != b.h || a.w != b.w || a.c != b.c) throw DataError("ssim: shape mismatch");
    if (a.h <= 0 || a.w <= 0) throw DataError("ssim: empty image");
    const double C1 = 0.01 * 0.01, C2 = 0.03 * 0.03;

    int side = std::min(11, std::min(a.h, a.w));
    std::vector<double> win = gaussian_window(side);
    std::vector<double> ga = to_gray(a), gb = to_gray(b);

    double total = 0;
    int count = 0;
    for (int y = 0; y + side <= a.h; ++y) {
        for (int x = 0; x + side <= a.w; ++x) {
            double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
            for (int i = 0; i < side; ++i)
                for (int j = 0; j < side; ++j) {
                    double w = win[size_t(i) * side + j];
                    double va = ga[size_t(y + i) * a.w + (x + j)];
                    double vb = gb[size_t(y + i) * a.w + (x + j)];
                    ma += w * va;
                    mb += w * vb;
                    saa += w * va * va;
                    sbb += w * vb * vb;
                    sab += w * va * vb;
                }
            double var_a = saa - ma * ma;
            double var_b = sbb - mb * mb;
            double cov = sab - ma * mb;
            total += ((2 * ma * mb + C1) * (2 * cov + C2)) /
                     ((ma * ma + mb * mb + C1) * (var_a + var_b + C2));
            ++count;
        }
    }
    return total / count;
}

std::vector<double> psnr_frames(const Grid4f& a, const Grid4f& b) {
    if (!a.same_shape(b)) throw DataError("psnr: shape mismatch");
    std::vector<double> out(a.d0);
    for (int t = 0; t < a.d0; ++t) out[t] = psnr(frame_view(a, t), frame_view(b, t));
    return out;
}

std::vector<double> ssim_frames(const Grid4f& a, const Grid4f& b) {
    if (!a.same_shape(b)) throw DataError("ssim: shape mismatch");
    std::vector<double> out(a.d0);
    for (int t = 0; t < a.d0; ++t) out[t] = ssim(frame_view(a, t), frame_view(b, t));
    return out;
}

std::vector<EvalWindow> plan_windows(int total_frames, int window) {
    if (total_frames <= 0 || window <= 0)
        throw ConfigError("plan_windows: frames and window must be positive");
    std::vector<EvalWindow> plan;
    if (window >= total_frames) {
        plan.push_back({0, total_frames, 0, total_frames});
        return plan;
    }
    int full = total_frames / window;
    for (int k = 0; k < full; ++k)
        plan.push_back({k * window, window, k * window, (k + 1) * window});
    int covered = full * window;
    if (covered < total_frames)
        plan.push_back({total_frames - window, window, covered, total_frames});
    return plan;
}

UncertaintyMap uncertainty_heatmap(const std::vector<Grid4f>& samples) {
    if (samples.size() < 2) throw DataError("uncertainty_heatmap: need at least two samples");
    const Grid4f& first = samples.front();
    for (const Grid4f& s : samples)
        if (!s.same_shape(first)) throw DataError("uncertainty_heatmap: shape mismatch");

    int T = first.d0, H = first.d1, W = first.d2, C = first.d3;
    double K = double(samples.size());
    UncertaintyMap map;
    map.height = H;
    map.width = W;
    map.samples = int(samples.size());
    map.values.assign(size_t(H) * W, 0.0f);

    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            double acc = 0;
            for (int t = 0; t < T; ++t)
                for (int ch = 0; ch < C; ++ch) {
                    double mean = 0;
                    for (const Grid4f& s : samples) mean += s(t, y, x, ch);
                    mean /= K;
                    double var = 0;
                    for (const Grid4f& s : samples) {
                        double d = s(t, y, x, ch) - mean;
                        var += d * d;
                    }
                    acc += std::sqrt(var / K);
                }
            map.values[size_t(y) * W + x] = float(acc / (double(T) * C));
        }
    return map;
}

}  // namespace dualray
