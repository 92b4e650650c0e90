#pragma once

#include <cstddef>
#include <vector>

#include "core/error.h"

namespace dualray {

// Dense row-major rank-4 array. Videos are (T, H, W, C), latent grids are
// (t, h, w, k); the last axis is the channel axis in both cases.
template <typename Scalar>
struct Grid4 {
    int d0 = 0, d1 = 0, d2 = 0, d3 = 0;
    std::vector<Scalar> data;

    Grid4() = default;
    Grid4(int a, int b, int c, int d) { resize(a, b, c, d); }

    void resize(int a, int b, int c, int d) {
        if (a < 0 || b < 0 || c < 0 || d < 0)
            throw DataError("Grid4: negative dimension");
        d0 = a;
        d1 = b;
        d2 = c;
        d3 = d;
        data.assign(size_t(a) * b * c * d, Scalar(0));
    }

    size_t size() const { return data.size(); }

    size_t index(int a, int b, int c, int d) const {
        return ((size_t(a) * d1 + b) * d2 + c) * d3 + d;
    }

    Scalar& operator()(int a, int b, int c, int d) { return data[index(a, b, c, d)]; }
    Scalar operator()(int a, int b, int c, int d) const { return data[index(a, b, c, d)]; }

    bool same_shape(const Grid4& o) const {
        return d0 == o.d0 && d1 == o.d1 && d2 == o.d2 && d3 == o.d3;
    }

    template <typename Other>
    Grid4<Other> cast() const {
        Grid4<Other> out(d0, d1, d2, d3);
        for (size_t i = 0; i < data.size(); ++i) out.data[i] = Other(data[i]);
        return out;
    }
};

using Grid4f = Grid4<float>;
using Grid4d = Grid4<double>;

}  // namespace dualray
