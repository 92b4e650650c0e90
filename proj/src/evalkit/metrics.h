#pragma once

#include <vector>

#include "core/grid.h"

namespace dualray {

constexpr double kPsnrCap = 99.0;  // returned for exact matches

// Borrowed view of frame t of a (T, H, W, C) grid.
struct FrameView {
    const float* px = nullptr;
    int h = 0, w = 0, c = 0;
};

FrameView frame_view(const Grid4f& video, int t);

// 10*log10(1/MSE) over all pixels and channels, capped at kPsnrCap.
// Inputs live in [0, 1].
double psnr(FrameView a, FrameView b);

// Single-scale SSIM on the unweighted channel mean (grayscale), 11x11
// Gaussian window sigma 1.5, K1=0.01 K2=0.03, dynamic range 1, averaged over
// fully-interior window positions. Images smaller than the window use a
// square window of side min(11, H, W).
double ssim(FrameView a, FrameView b);

std::vector<double> psnr_frames(const Grid4f& a, const Grid4f& b);
std::vector<double> ssim_frames(const Grid4f& a, const Grid4f& b);

// One generation window: the model runs on [start, start+frames); metrics
// count frames [count_begin, count_end), attributed to the earliest window.
struct EvalWindow {
    int start = 0;
    int frames = 0;
    int count_begin = 0;
    int count_end = 0;
};

// Windows at 0, W, 2W, ...; when T is not a multiple of W the final window is
// right-aligned at T-W and counts only the uncovered tail. W > T degenerates
// to a single truncated window. Counted ranges partition [0, T).
std::vector<EvalWindow> plan_windows(int total_frames, int window);

struct UncertaintyMap {
    int height = 0, width = 0;
    int samples = 0;
    std::vector<float> values;  // H*W, row-major
};

// Per-pixel population standard deviation across K sample videos, averaged
// over frames and channels. K >= 2.
UncertaintyMap uncertainty_heatmap(const std::vector<Grid4f>& samples);

}  // namespace dualray
