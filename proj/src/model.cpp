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
#include "snnforge/model.hpp"

#include <algorithm>
#include <cmath>

#include "snnforge/common.hpp"

namespace snnforge {

namespace {

[[noreturn]] void fail(int layer_index, const std::string& msg) {
    if (layer_index >= 0) {
        throw InputError("layer " + std::to_string(layer_index) + ": " + msg);
    }
    throw InputError(msg);
}

int conv_out(int in, int kernel, int stride, PaddingMode pad) {
    if (pad == PaddingMode::Same) return (in + stride - 1) / stride;
    if (in < kernel) return -1;
    return (in - kernel) / stride + 1;
}

}  // namespace

const char* to_string(LayerKind k) {
    switch (k) {
        case LayerKind::Conv2D: return "Conv2D";
        case LayerKind::Conv1D: return "Conv1D";
        case LayerKind::DepthwiseConv2D: return "DepthwiseConv2D";
        case LayerKind::Dense: return "Dense";
        case LayerKind::AvgPool2D: return "AvgPool2D";
        case LayerKind::Flatten: return "Flatten";
        case LayerKind::Reshape: return "Reshape";
        case LayerKind::ZeroPad2D: return "ZeroPad2D";
        case LayerKind::Dropout: return "Dropout";
        case LayerKind::BatchNorm: return "BatchNorm";
        case LayerKind::MaxPool2D: return "MaxPool2D";
    }
    return "?";
}

const char* to_string(PaddingMode p) { return p == PaddingMode::Valid ? "valid" : "same"; }

const char* to_string(Activation a) {
    switch (a) {
        case Activation::None: return "none";
        case Activation::ReLU: return "relu";
        case Activation::Softmax: return "softmax";
    }
    return "?";
}

LayerKind layer_kind_from_string(const std::string& s) {
    static const std::pair<const char*, LayerKind> table[] = {
        {"Conv2D", LayerKind::Conv2D},       {"Conv1D", LayerKind::Conv1D},
        {"DepthwiseConv2D", LayerKind::DepthwiseConv2D},
        {"Dense", LayerKind::Dense},         {"AvgPool2D", LayerKind::AvgPool2D},
        {"Flatten", LayerKind::Flatten},     {"Reshape", LayerKind::Reshape},
        {"ZeroPad2D", LayerKind::ZeroPad2D}, {"Dropout", LayerKind::Dropout},
        {"BatchNorm", LayerKind::BatchNorm}, {"MaxPool2D", LayerKind::MaxPool2D},
    };
    for (const auto& [name, kind] : table) {
        if (s == name) return kind;
    }
    throw InputError("unknown layer kind '" + s + "'");
}

PaddingMode padding_from_string(const std::string& s) {
    if (s == "valid") return PaddingMode::Valid;
    if (s == "same") return PaddingMode::Same;
    throw InputError("unknown padding mode '" + s + "'");
}

Activation activation_from_string(const std::string& s) {
    if (s == "none" || s.empty()) return Activation::None;
    if (s == "relu") return Activation::ReLU;
    if (s == "softmax") return Activation::Softmax;
    throw InputError("unknown activation '" + s + "'");
}

bool is_structural(LayerKind k) {
    return k == LayerKind::Flatten || k == LayerKind::Reshape || k == LayerKind::ZeroPad2D;
}

bool is_weighted(LayerKind k) {
    return k == LayerKind::Conv2D || k == LayerKind::Conv1D ||
           k == LayerKind::DepthwiseConv2D || k == LayerKind::Dense;
}

void same_padding(int in, int kernel, int stride, int& pad_begin, int& pad_end) {
    int out = (in + stride - 1) / stride;
    int total = std::max(0, (out - 1) * stride + kernel - in);
    pad_begin = total / 2;
    pad_end = total - pad_begin;
}

Shape infer_output_shape(const LayerSpec& layer, const Shape& input, int idx) {
    switch (layer.kind) {
        case LayerKind::Conv2D:
        case LayerKind::DepthwiseConv2D: {
            if (input.rank() != 3) fail(idx, "2-d convolution needs a rank-3 input, got " + input.str());
            if (layer.kernel_h <= 0 || layer.kernel_w <= 0 || layer.stride_h <= 0 || layer.stride_w <= 0)
                fail(idx, "kernel and stride must be positive");
            int oh = conv_out(input.dim(0), layer.kernel_h, layer.stride_h, layer.padding);
            int ow = conv_out(input.dim(1), layer.kernel_w, layer.stride_w, layer.padding);
            if (oh <= 0 || ow <= 0) fail(idx, "kernel larger than input " + input.str());
            int oc = layer.kind == LayerKind::Conv2D ? layer.features : input.dim(2);
            if (oc <= 0) fail(idx, "features must be positive");
            return Shape({oh, ow, oc});
        }
        case LayerKind::Conv1D: {
            if (input.rank() != 2) fail(idx, "Conv1D needs a rank-2 input, got " + input.str());
            if (layer.kernel_w <= 0 || layer.stride_w <= 0) fail(idx, "kernel and stride must be positive");
            int ol = conv_out(input.dim(0), layer.kernel_w, layer.stride_w, layer.padding);
            if (ol <= 0) fail(idx, "kernel larger than input " + input.str());
            if (layer.features <= 0) fail(idx, "features must be positive");
            return Shape({ol, layer.features});
        }
        case LayerKind::Dense: {
            if (input.rank() != 1) fail(idx, "Dense needs a rank-1 input (add Flatten), got " + input.str());
            if (layer.features <= 0) fail(idx, "features must be positive");
            return Shape({layer.features});
        }
        case LayerKind::AvgPool2D:
        case LayerKind::MaxPool2D: {
            if (input.rank() != 3) fail(idx, "pooling needs a rank-3 input, got " + input.str());
            if (layer.padding != PaddingMode::Valid) fail(idx, "same-padded pooling is not supported");
            int oh = conv_out(input.dim(0), layer.kernel_h, layer.stride_h, PaddingMode::Valid);
            int ow = conv_out(input.dim(1), layer.kernel_w, layer.stride_w, PaddingMode::Valid);
            if (oh <= 0 || ow <= 0) fail(idx, "pool kernel larger than input " + input.str());
            return Shape({oh, ow, input.dim(2)});
        }
        case LayerKind::Flatten:
            return Shape({static_cast<int>(input.count())});
        case LayerKind::Reshape: {
            if (layer.target_shape.empty()) fail(idx, "Reshape needs a target shape");
            if (layer.target_shape.count() != input.count())
                fail(idx, "Reshape to " + layer.target_shape.str() + " does not preserve element count of " + input.str());
            return layer.target_shape;
        }
        case LayerKind::ZeroPad2D: {
            if (input.rank() != 3) fail(idx, "ZeroPad2D needs a rank-3 input, got " + input.str());
            if (layer.pad_top < 0 || layer.pad_bottom < 0 || layer.pad_left < 0 || layer.pad_right < 0)
                fail(idx, "negative padding");
            return Shape({input.dim(0) + layer.pad_top + layer.pad_bottom,
                          input.dim(1) + layer.pad_left + layer.pad_right, input.dim(2)});
        }
        case LayerKind::Dropout:
        case LayerKind::BatchNorm:
            return input;
    }
    fail(idx, "unhandled layer kind");
}

int64_t expected_weight_count(const LayerSpec& layer, const Shape& input) {
    switch (layer.kind) {
        case LayerKind::Conv2D:
            return static_cast<int64_t>(layer.kernel_h) * layer.kernel_w * input.dim(2) * layer.features;
        case LayerKind::DepthwiseConv2D:
            return static_cast<int64_t>(layer.kernel_h) * layer.kernel_w * input.dim(2);
        case LayerKind::Conv1D:
            return static_cast<int64_t>(layer.kernel_w) * input.dim(1) * layer.features;
        case LayerKind::Dense:
            return static_cast<int64_t>(input.dim(0)) * layer.features;
        case LayerKind::BatchNorm:
            return 4 * static_cast<int64_t>(input.dim(input.rank() - 1));
        default:
            return 0;
    }
}

int64_t expected_bias_count(const LayerSpec& layer, const Shape& input) {
    switch (layer.kind) {
        case LayerKind::Conv2D:
        case LayerKind::Conv1D:
        case LayerKind::Dense:
            return layer.features;
        case LayerKind::DepthwiseConv2D:
            return input.dim(2);
        default:
            return 0;
    }
}

void infer_shapes(DnnModel& model) {
    if (model.layers.empty()) throw InputError("empty model");
    if (model.input_shape.empty()) throw InputError("model has no input shape");
    Shape cur = model.input_shape;
    for (int i = 0; i < static_cast<int>(model.layers.size()); ++i) {
        LayerSpec& layer = model.layers[static_cast<size_t>(i)];
        if (layer.kind == LayerKind::DepthwiseConv2D && layer.features == 0) layer.features = cur.dim(2);
        Shape out = infer_output_shape(layer, cur, i);
        if (!layer.output_shape.empty() && layer.output_shape != out)
            fail(i, "declared output shape " + layer.output_shape.str() + " does not match inferred " + out.str());
        layer.output_shape = out;

        int64_t want_w = expected_weight_count(layer, cur);
        int64_t want_b = expected_bias_count(layer, cur);
        if (static_cast<int64_t>(layer.weights.size()) != want_w)
            fail(i, "expected " + std::to_string(want_w) + " weights, got " + std::to_string(layer.weights.size()));
        if (static_cast<int64_t>(layer.biases.size()) != want_b)
            fail(i, "expected " + std::to_string(want_b) + " biases, got " + std::to_string(layer.biases.size()));
        cur = out;
    }
}

void validate_model(const DnnModel& model) {
    DnnModel copy = model;
    infer_shapes(copy);
    for (int i = 0; i < static_cast<int>(model.layers.size()); ++i) {
        const LayerSpec& layer = model.layers[static_cast<size_t>(i)];
        auto check_finite = [&](const std::vector<float>& v) {
            for (float x : v) {
                if (!std::isfinite(x)) fail(i, "non-finite parameter");
            }
        };
        check_finite(layer.weights);
        check_finite(layer.biases);
        if (layer.output_shape != copy.layers[static_cast<size_t>(i)].output_shape)
            fail(i, "stale output shape; run infer_shapes");
    }
}

}  // namespace snnforge
