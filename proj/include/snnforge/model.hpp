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

#include <cstdint>
#include <string>
#include <vector>

#include "snnforge/tensor.hpp"

namespace snnforge {

enum class LayerKind {
    Conv2D,
    Conv1D,
    DepthwiseConv2D,
    Dense,
    AvgPool2D,
    Flatten,
    Reshape,
    ZeroPad2D,
    Dropout,
    BatchNorm,
    MaxPool2D,
};

enum class PaddingMode { Valid, Same };
enum class Activation { None, ReLU, Softmax };

const char* to_string(LayerKind k);
const char* to_string(PaddingMode p);
const char* to_string(Activation a);
LayerKind layer_kind_from_string(const std::string& s);
PaddingMode padding_from_string(const std::string& s);
Activation activation_from_string(const std::string& s);

/// True for layers that only rearrange or pad values (Flatten, Reshape, ZeroPad2D).
bool is_structural(LayerKind k);
/// True for layers that own trainable weights (convolutions and Dense).
bool is_weighted(LayerKind k);

/**
 * One layer of a feed-forward network. Parameters are stored inline:
 * convolution weights are row-major (kh, kw, c_in, c_out), depthwise
 * weights (kh, kw, c_in), Conv1D weights (k, c_in, c_out), Dense weights
 * (in, out). BatchNorm packs gamma|beta|mean|variance into `weights`
 * (4*C values) with `epsilon` alongside.
 */
struct LayerSpec {
    LayerKind kind = LayerKind::Dense;
    int features = 0;
    int kernel_h = 0, kernel_w = 0;
    int stride_h = 1, stride_w = 1;
    PaddingMode padding = PaddingMode::Valid;
    Activation activation = Activation::None;

    int pad_top = 0, pad_bottom = 0, pad_left = 0, pad_right = 0;  // ZeroPad2D
    float rate = 0.0f;                                             // Dropout
    float epsilon = 1e-3f;                                         // BatchNorm
    Shape target_shape;                                            // Reshape

    Shape output_shape;  // filled in by infer_shapes()

    std::vector<float> weights;
    std::vector<float> biases;
};

/// A trained feed-forward network: a linear chain of layers.
struct DnnModel {
    int format_version = 1;
    std::string name;
    Shape input_shape;
    std::vector<LayerSpec> layers;
};

/// Output shape of `layer` applied to `input`; throws InputError on an invalid combination.
Shape infer_output_shape(const LayerSpec& layer, const Shape& input, int layer_index = -1);

/// Expected parameter vector lengths for a layer given its input shape.
int64_t expected_weight_count(const LayerSpec& layer, const Shape& input);
int64_t expected_bias_count(const LayerSpec& layer, const Shape& input);

/**
 * Runs shape inference over the whole chain, filling every output_shape,
 * and validates parameter counts and finiteness. Throws InputError with
 * the offending layer index on any inconsistency.
 */
void infer_shapes(DnnModel& model);
void validate_model(const DnnModel& model);

/// Same-padding amounts in one dimension (extra padding goes to the end).
void same_padding(int in, int kernel, int stride, int& pad_begin, int& pad_end);

}  // namespace snnforge
