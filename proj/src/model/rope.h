#pragma once

#include <cmath>
#include <vector>

#include "model/config.h"

namespace dualray {

// Rotation angles for one grid position, shared by every head: head_dim/2
// (cos, sin) pairs, axis channels laid out temporal first, then height,
// then width. Pair j within an axis of 2*p channels turns by
// pos * base^(-2j / (2p)).
inline void rope_angles(int head_dim, double base, int ti, int hi, int wi,
                        std::vector<double>& cs, std::vector<double>& sn) {
    std::array<int, 3> split = rope_axis_pairs(head_dim);
    double pos[3] = {double(ti), double(hi), double(wi)};
    cs.resize(head_dim / 2);
    sn.resize(head_dim / 2);
    int out = 0;
    for (int axis = 0; axis < 3; ++axis) {
        for (int j = 0; j < split[axis]; ++j) {
            double theta = pos[axis] * std::pow(base, -double(j) / split[axis]);
            cs[out] = std::cos(theta);
            sn[out] = std::sin(theta);
            ++out;
        }
    }
}

// Rotates one head vector in place; inverse applies the opposite rotation.
template <typename Scalar>
void rope_rotate_head(Scalar* head, int head_dim, const std::vector<double>& cs,
                      const std::vector<double>& sn, bool inverse = false) {
    for (int j = 0; j < head_dim / 2; ++j) {
        double c = cs[j];
        double s = inverse ? -sn[j] : sn[j];
        double x = double(head[2 * j]), y = double(head[2 * j + 1]);
        head[2 * j] = Scalar(x * c - y * s);
        head[2 * j + 1] = Scalar(x * s + y * c);
    }
}

// Convenience form for a single head vector at a grid position.
template <typename Scalar>
void rope_encode(Scalar* head, int head_dim, double base, int ti, int hi, int wi) {
    std::vector<double> cs, sn;
    rope_angles(head_dim, base, ti, hi, wi, cs, sn);
    rope_rotate_head(head, head_dim, cs, sn);
}

}  // namespace dualray
