/**
 * Copyright 2026 The snnforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// Independent reference implementations used as test oracles. These are
// deliberately written against materialized padded tensors with plain
// nested loops, sharing no index arithmetic with the library kernels.

#include <algorithm>
#include <cmath>
#include <vector>

#include "snnforge/dvs.hpp"
#include "snnforge/model.hpp"

namespace oracle {

using snnforge::LayerSpec;
using snnforge::PaddingMode;
using snnforge::Shape;
using snnforge::Tensor;

// Materializes zero padding around a rank-3 tensor.
inline Tensor pad3(const Tensor& in, int pt, int pb, int pl, int pr) {
    Tensor out(Shape({in.shape.dim(0) + pt + pb, in.shape.dim(1) + pl + pr, in.shape.dim(2)}));
    for (int y = 0; y < in.shape.dim(0); ++y)
        for (int x = 0; x < in.shape.dim(1); ++x)
            for (int c = 0; c < in.shape.dim(2); ++c) out.at(y + pt, x + pl, c) = in.at(y, x, c);
    return out;
}

inline Tensor conv2d_ref(const Tensor& input, const LayerSpec& L) {
    Tensor in = input;
    if (L.padding == PaddingMode::Same) {
        int pt, pb, pl, pr;
        snnforge::same_padding(input.shape.dim(0), L.kernel_h, L.stride_h, pt, pb);
        snnforge::same_padding(input.shape.dim(1), L.kernel_w, L.stride_w, pl, pr);
        in = pad3(input, pt, pb, pl, pr);
    }
    const int ih = in.shape.dim(0), iw = in.shape.dim(1), ci = in.shape.dim(2);
    const int oh = (ih - L.kernel_h) / L.stride_h + 1;
    const int ow = (iw - L.kernel_w) / L.stride_w + 1;
    Tensor out(Shape({oh, ow, L.features}));
    for (int oc = 0; oc < L.features; ++oc)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox) {
                double acc = L.biases[(size_t)oc];
                for (int ic = 0; ic < ci; ++ic)
                    for (int ky = 0; ky < L.kernel_h; ++ky)
                        for (int kx = 0; kx < L.kernel_w; ++kx)
                            acc += in.at(oy * L.stride_h + ky, ox * L.stride_w + kx, ic) *
                                   L.weights[(size_t)(((ky * L.kernel_w + kx) * ci + ic) * L.features + oc)];
                out.at(oy, ox, oc) = (float)acc;
            }
    return out;
}

inline Tensor depthwise_ref(const Tensor& input, const LayerSpec& L) {
    Tensor in = input;
    if (L.padding == PaddingMode::Same) {
        int pt, pb, pl, pr;
        snnforge::same_padding(input.shape.dim(0), L.kernel_h, L.stride_h, pt, pb);
        snnforge::same_padding(input.shape.dim(1), L.kernel_w, L.stride_w, pl, pr);
        in = pad3(input, pt, pb, pl, pr);
    }
    const int ih = in.shape.dim(0), iw = in.shape.dim(1), c = in.shape.dim(2);
    const int oh = (ih - L.kernel_h) / L.stride_h + 1;
    const int ow = (iw - L.kernel_w) / L.stride_w + 1;
    Tensor out(Shape({oh, ow, c}));
    for (int ch = 0; ch < c; ++ch)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox) {
                double acc = L.biases[(size_t)ch];
                for (int ky = 0; ky < L.kernel_h; ++ky)
                    for (int kx = 0; kx < L.kernel_w; ++kx)
                        acc += in.at(oy * L.stride_h + ky, ox * L.stride_w + kx, ch) *
                               L.weights[(size_t)((ky * L.kernel_w + kx) * c + ch)];
                out.at(oy, ox, ch) = (float)acc;
            }
    return out;
}

inline Tensor conv1d_ref(const Tensor& in, const LayerSpec& L) {
    const int il = in.shape.dim(0), ci = in.shape.dim(1);
    const int ol = (il - L.kernel_w) / L.stride_w + 1;
    Tensor out(Shape({ol, L.features}));
    for (int oc = 0; oc < L.features; ++oc)
        for (int o = 0; o < ol; ++o) {
            double acc = L.biases[(size_t)oc];
            for (int k = 0; k < L.kernel_w; ++k)
                for (int ic = 0; ic < ci; ++ic)
                    acc += in.at2(o * L.stride_w + k, ic) *
                           L.weights[(size_t)((k * ci + ic) * L.features + oc)];
            out.at2(o, oc) = (float)acc;
        }
    return out;
}

inline Tensor dense_ref(const Tensor& in, const LayerSpec& L) {
    const int ni = in.shape.dim(0);
    Tensor out(Shape({L.features}));
    for (int o = 0; o < L.features; ++o) {
        double acc = L.biases[(size_t)o];
        for (int i = 0; i < ni; ++i) acc += in.data[(size_t)i] * L.weights[(size_t)(i * L.features + o)];
        out.data[(size_t)o] = (float)acc;
    }
    return out;
}

inline Tensor avgpool_ref(const Tensor& in, const LayerSpec& L) {
    const int oh = (in.shape.dim(0) - L.kernel_h) / L.stride_h + 1;
    const int ow = (in.shape.dim(1) - L.kernel_w) / L.stride_w + 1;
    const int c = in.shape.dim(2);
    Tensor out(Shape({oh, ow, c}));
    for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox)
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                for (int ky = 0; ky < L.kernel_h; ++ky)
                    for (int kx = 0; kx < L.kernel_w; ++kx)
                        acc += in.at(oy * L.stride_h + ky, ox * L.stride_w + kx, ch);
                out.at(oy, ox, ch) = (float)(acc / (L.kernel_h * L.kernel_w));
            }
    return out;
}

// Full-sort linear-interpolation percentile (the library uses nth_element).
inline float percentile_sorted(std::vector<float> v, float p) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    double rank = (double)p / 100.0 * (double)(n - 1);
    size_t lo = (size_t)rank;
    if (lo >= n - 1) return v[n - 1];
    return (float)(v[lo] + (rank - (double)lo) * (v[lo + 1] - v[lo]));
}

// Non-overlapping block mean of a (128, 128, c) tensor.
inline Tensor block_mean(const Tensor& in, int block) {
    const int oh = in.shape.dim(0) / block, ow = in.shape.dim(1) / block, c = in.shape.dim(2);
    Tensor out(Shape({oh, ow, c}));
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x)
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                for (int dy = 0; dy < block; ++dy)
                    for (int dx = 0; dx < block; ++dx) acc += in.at(y * block + dy, x * block + dx, ch);
                out.at(y, x, ch) = (float)(acc / (block * block));
            }
    return out;
}

// Window enumeration: frame start offsets for a time-based accumulation,
// derived by scanning candidate starts rather than by the closed formula.
inline std::vector<int64_t> frame_starts_enum(int64_t duration_us, int64_t window_us, int64_t stride_us) {
    std::vector<int64_t> starts;
    for (int64_t s = 0; s + window_us <= duration_us; s += stride_us) starts.push_back(s);
    return starts;
}

// Closed-form spike counts for an isolated neuron under constant integer
// drive d with threshold theta, no leak, starting from v = 0.
inline int64_t soft_reset_count(int64_t d, int64_t theta, int64_t steps) {
    return d <= 0 ? 0 : (steps * d) / theta;  // v stays in [0, theta)
}

inline int64_t hard_reset_count(int64_t d, int64_t theta, int64_t steps) {
    if (d <= 0) return 0;
    int64_t period = (theta + d - 1) / d;  // ceil
    return steps / period;
}

}  // namespace oracle
