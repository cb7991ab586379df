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
#include "snnforge/parser.hpp"

#include <cmath>

#include "snnforge/common.hpp"

namespace snnforge {

namespace {

// Applies gamma/sqrt(var+eps) and the shifted bias to the layer feeding the
// BatchNorm. The scale runs over the layer's output channels/units.
void fold_batchnorm_into(LayerSpec& target, const LayerSpec& bn, const Shape& bn_input, int bn_index) {
    const int c = bn_input.dim(bn_input.rank() - 1);
    const float* gamma = bn.weights.data();
    const float* beta = gamma + c;
    const float* mean = beta + c;
    const float* var = mean + c;

    if (static_cast<int>(target.biases.size()) != c)
        throw InputError("layer " + std::to_string(bn_index) +
                         ": BatchNorm width does not match the preceding layer");

    std::vector<float> factor(static_cast<size_t>(c));
    for (int ch = 0; ch < c; ++ch)
        factor[static_cast<size_t>(ch)] = gamma[ch] / std::sqrt(var[ch] + bn.epsilon);

    // weights are row-major with the output channel fastest for every
    // weighted kind except DepthwiseConv2D, where the channel itself is fastest
    const size_t n = target.weights.size();
    for (size_t i = 0; i < n; ++i) target.weights[i] *= factor[i % static_cast<size_t>(c)];
    for (int ch = 0; ch < c; ++ch) {
        float b = target.biases[static_cast<size_t>(ch)];
        target.biases[static_cast<size_t>(ch)] = (b - mean[ch]) * factor[static_cast<size_t>(ch)] + beta[ch];
    }
}

}  // namespace

bool is_backend_supported(LayerKind k) {
    switch (k) {
        case LayerKind::Dense:
        case LayerKind::Flatten:
        case LayerKind::Reshape:
        case LayerKind::ZeroPad2D:
        case LayerKind::AvgPool2D:
        case LayerKind::DepthwiseConv2D:
        case LayerKind::Conv1D:
        case LayerKind::Conv2D:
            return true;
        default:
            return false;
    }
}

ParsedModel parse(const DnnModel& model, const ParseOptions& options) {
    DnnModel src = model;
    infer_shapes(src);

    DnnModel out;
    out.format_version = src.format_version;
    out.name = src.name;
    out.input_shape = src.input_shape;

    Shape cur = src.input_shape;
    for (int i = 0; i < static_cast<int>(src.layers.size()); ++i) {
        LayerSpec L = src.layers[static_cast<size_t>(i)];
        switch (L.kind) {
            case LayerKind::Dropout:
                continue;  // identity at inference
            case LayerKind::BatchNorm: {
                if (options.fold_batchnorm) {
                    if (out.layers.empty() || !is_weighted(out.layers.back().kind))
                        throw InputError("unconvertible layer " + std::to_string(i) +
                                         " (BatchNorm without a preceding weighted layer)");
                    fold_batchnorm_into(out.layers.back(), L, cur, i);
                }
                continue;
            }
            case LayerKind::MaxPool2D:
                L.kind = LayerKind::AvgPool2D;
                break;
            case LayerKind::Conv2D:
            case LayerKind::DepthwiseConv2D: {
                if (L.padding == PaddingMode::Same) {
                    LayerSpec pad;
                    pad.kind = LayerKind::ZeroPad2D;
                    same_padding(cur.dim(0), L.kernel_h, L.stride_h, pad.pad_top, pad.pad_bottom);
                    same_padding(cur.dim(1), L.kernel_w, L.stride_w, pad.pad_left, pad.pad_right);
                    if (pad.pad_top || pad.pad_bottom || pad.pad_left || pad.pad_right) {
                        pad.output_shape = infer_output_shape(pad, cur, i);
                        out.layers.push_back(pad);
                    }
                    L.padding = PaddingMode::Valid;
                }
                break;
            }
            default:
                if (!is_backend_supported(L.kind))
                    throw InputError("unconvertible layer " + std::to_string(i) + " (" +
                                     to_string(L.kind) + ")");
                break;
        }
        L.output_shape = Shape{};  // re-infer below
        if (!out.layers.empty())
            L.output_shape = infer_output_shape(L, out.layers.back().output_shape, i);
        else
            L.output_shape = infer_output_shape(L, out.input_shape, i);
        if (L.output_shape != src.layers[static_cast<size_t>(i)].output_shape)
            throw InputError("layer " + std::to_string(i) + ": parsing changed the output shape from " +
                             src.layers[static_cast<size_t>(i)].output_shape.str() + " to " +
                             L.output_shape.str());
        out.layers.push_back(std::move(L));
        cur = src.layers[static_cast<size_t>(i)].output_shape;
    }

    if (out.layers.empty()) throw InputError("empty model after parsing");
    infer_shapes(out);
    return ParsedModel{std::move(out)};
}

}  // namespace snnforge
