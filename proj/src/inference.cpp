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
#include "snnforge/inference.hpp"

#include <algorithm>
#include <cmath>

#include "snnforge/common.hpp"

namespace snnforge {

namespace {

// Direct 2-d convolution; weights (kh, kw, c_in, c_out) row-major.
// pad_* implement "same" mode; coordinates outside the input contribute 0.
Tensor conv2d(const Tensor& in, const LayerSpec& L, const Shape& out_shape) {
    int pt = 0, pl = 0, pb = 0, pr = 0;
    if (L.padding == PaddingMode::Same) {
        same_padding(in.shape.dim(0), L.kernel_h, L.stride_h, pt, pb);
        same_padding(in.shape.dim(1), L.kernel_w, L.stride_w, pl, pr);
    }
    const int ih = in.shape.dim(0), iw = in.shape.dim(1), ci = in.shape.dim(2);
    const int oh = out_shape.dim(0), ow = out_shape.dim(1), co = out_shape.dim(2);
    Tensor out(out_shape);
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            for (int oc = 0; oc < co; ++oc) {
                double acc = L.biases[static_cast<size_t>(oc)];
                for (int ky = 0; ky < L.kernel_h; ++ky) {
                    int iy = oy * L.stride_h + ky - pt;
                    if (iy < 0 || iy >= ih) continue;
                    for (int kx = 0; kx < L.kernel_w; ++kx) {
                        int ix = ox * L.stride_w + kx - pl;
                        if (ix < 0 || ix >= iw) continue;
                        const float* irow = &in.data[static_cast<size_t>((iy * iw + ix) * ci)];
                        const float* wrow =
                            &L.weights[static_cast<size_t>(((ky * L.kernel_w + kx) * ci) * co + oc)];
                        for (int ic = 0; ic < ci; ++ic) acc += irow[ic] * wrow[static_cast<size_t>(ic) * co];
                    }
                }
                out.at(oy, ox, oc) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

// Depthwise 2-d convolution, channel multiplier 1; weights (kh, kw, c).
Tensor depthwise_conv2d(const Tensor& in, const LayerSpec& L, const Shape& out_shape) {
    int pt = 0, pl = 0, pb = 0, pr = 0;
    if (L.padding == PaddingMode::Same) {
        same_padding(in.shape.dim(0), L.kernel_h, L.stride_h, pt, pb);
        same_padding(in.shape.dim(1), L.kernel_w, L.stride_w, pl, pr);
    }
    const int ih = in.shape.dim(0), iw = in.shape.dim(1), c = in.shape.dim(2);
    Tensor out(out_shape);
    for (int oy = 0; oy < out_shape.dim(0); ++oy) {
        for (int ox = 0; ox < out_shape.dim(1); ++ox) {
            for (int ch = 0; ch < c; ++ch) {
                double acc = L.biases[static_cast<size_t>(ch)];
                for (int ky = 0; ky < L.kernel_h; ++ky) {
                    int iy = oy * L.stride_h + ky - pt;
                    if (iy < 0 || iy >= ih) continue;
                    for (int kx = 0; kx < L.kernel_w; ++kx) {
                        int ix = ox * L.stride_w + kx - pl;
                        if (ix < 0 || ix >= iw) continue;
                        acc += in.at(iy, ix, ch) *
                               L.weights[static_cast<size_t>((ky * L.kernel_w + kx) * c + ch)];
                    }
                }
                out.at(oy, ox, ch) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

// 1-d convolution over (len, c_in); weights (k, c_in, c_out).
Tensor conv1d(const Tensor& in, const LayerSpec& L, const Shape& out_shape) {
    int pl = 0, pr = 0;
    if (L.padding == PaddingMode::Same) same_padding(in.shape.dim(0), L.kernel_w, L.stride_w, pl, pr);
    const int il = in.shape.dim(0), ci = in.shape.dim(1), co = L.features;
    Tensor out(out_shape);
    for (int o = 0; o < out_shape.dim(0); ++o) {
        for (int oc = 0; oc < co; ++oc) {
            double acc = L.biases[static_cast<size_t>(oc)];
            for (int k = 0; k < L.kernel_w; ++k) {
                int i = o * L.stride_w + k - pl;
                if (i < 0 || i >= il) continue;
                for (int ic = 0; ic < ci; ++ic)
                    acc += in.at2(i, ic) * L.weights[static_cast<size_t>((k * ci + ic) * co + oc)];
            }
            out.at2(o, oc) = static_cast<float>(acc);
        }
    }
    return out;
}

Tensor dense(const Tensor& in, const LayerSpec& L, const Shape& out_shape) {
    const int n_in = in.shape.dim(0), n_out = L.features;
    Tensor out(out_shape);
    for (int o = 0; o < n_out; ++o) {
        double acc = L.biases[static_cast<size_t>(o)];
        for (int i = 0; i < n_in; ++i)
            acc += in.data[static_cast<size_t>(i)] * L.weights[static_cast<size_t>(i) * n_out + o];
        out.data[static_cast<size_t>(o)] = static_cast<float>(acc);
    }
    return out;
}

Tensor pool2d(const Tensor& in, const LayerSpec& L, const Shape& out_shape, bool take_max) {
    const int c = in.shape.dim(2);
    Tensor out(out_shape);
    for (int oy = 0; oy < out_shape.dim(0); ++oy) {
        for (int ox = 0; ox < out_shape.dim(1); ++ox) {
            for (int ch = 0; ch < c; ++ch) {
                if (take_max) {
                    float best = -std::numeric_limits<float>::infinity();
                    for (int ky = 0; ky < L.kernel_h; ++ky)
                        for (int kx = 0; kx < L.kernel_w; ++kx)
                            best = std::max(best, in.at(oy * L.stride_h + ky, ox * L.stride_w + kx, ch));
                    out.at(oy, ox, ch) = best;
                } else {
                    double acc = 0.0;
                    for (int ky = 0; ky < L.kernel_h; ++ky)
                        for (int kx = 0; kx < L.kernel_w; ++kx)
                            acc += in.at(oy * L.stride_h + ky, ox * L.stride_w + kx, ch);
                    out.at(oy, ox, ch) = static_cast<float>(acc / (L.kernel_h * L.kernel_w));
                }
            }
        }
    }
    return out;
}

Tensor batchnorm(const Tensor& in, const LayerSpec& L) {
    const int c = in.shape.dim(in.shape.rank() - 1);
    const float* gamma = L.weights.data();
    const float* beta = gamma + c;
    const float* mean = beta + c;
    const float* var = mean + c;
    Tensor out = in;
    const int64_t n = in.size();
    for (int64_t i = 0; i < n; ++i) {
        int ch = static_cast<int>(i % c);
        float f = gamma[ch] / std::sqrt(var[ch] + L.epsilon);
        out.data[static_cast<size_t>(i)] = (in.data[static_cast<size_t>(i)] - mean[ch]) * f + beta[ch];
    }
    return out;
}

Tensor zeropad2d(const Tensor& in, const LayerSpec& L, const Shape& out_shape) {
    Tensor out(out_shape);
    const int c = in.shape.dim(2);
    for (int y = 0; y < in.shape.dim(0); ++y)
        for (int x = 0; x < in.shape.dim(1); ++x)
            for (int ch = 0; ch < c; ++ch)
                out.at(y + L.pad_top, x + L.pad_left, ch) = in.at(y, x, ch);
    return out;
}

void relu_inplace(Tensor& t) {
    for (float& x : t.data) x = std::max(x, 0.0f);
}

}  // namespace

std::vector<float> softmax(const std::vector<float>& logits) {
    std::vector<float> out(logits.size());
    float m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - m);
        sum += out[i];
    }
    for (float& x : out) x = static_cast<float>(x / sum);
    return out;
}

InferResult infer(const DnnModel& model, const Tensor& input, bool capture_trace) {
    if (input.shape != model.input_shape)
        throw InputError("input shape " + input.shape.str() + " does not match model input " +
                         model.input_shape.str());

    InferResult result;
    Tensor cur = input;
    for (int i = 0; i < static_cast<int>(model.layers.size()); ++i) {
        const LayerSpec& L = model.layers[static_cast<size_t>(i)];
        Tensor next;
        switch (L.kind) {
            case LayerKind::Conv2D: next = conv2d(cur, L, L.output_shape); break;
            case LayerKind::DepthwiseConv2D: next = depthwise_conv2d(cur, L, L.output_shape); break;
            case LayerKind::Conv1D: next = conv1d(cur, L, L.output_shape); break;
            case LayerKind::Dense: next = dense(cur, L, L.output_shape); break;
            case LayerKind::AvgPool2D: next = pool2d(cur, L, L.output_shape, false); break;
            case LayerKind::MaxPool2D: next = pool2d(cur, L, L.output_shape, true); break;
            case LayerKind::BatchNorm: next = batchnorm(cur, L); break;
            case LayerKind::Dropout: next = cur; break;  // identity at inference
            case LayerKind::Flatten:
            case LayerKind::Reshape:
                next = cur;
                next.shape = L.output_shape;
                break;
            case LayerKind::ZeroPad2D: next = zeropad2d(cur, L, L.output_shape); break;
        }
        if (L.activation == Activation::ReLU) relu_inplace(next);
        // softmax is reporting-only; the trace keeps pre-softmax values
        if (capture_trace && !is_structural(L.kind))
            result.trace.entries.push_back({i, next});
        cur = std::move(next);
    }

    result.class_scores.assign(cur.data.begin(), cur.data.end());
    if (model.layers.back().activation == Activation::Softmax)
        result.class_scores = softmax(result.class_scores);
    return result;
}

}  // namespace snnforge
