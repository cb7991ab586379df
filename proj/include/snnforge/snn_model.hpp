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

#include "snnforge/model.hpp"

namespace snnforge {

enum class ResetMode { Soft, Hard };

const char* to_string(ResetMode m);
ResetMode reset_mode_from_string(const std::string& s);

/**
 * One spiking layer. Structural layers of the parsed model are folded
 * into the geometry: in_shape is the previous layer's output viewed
 * through any Flatten/Reshape, and pad_top/pad_left absorb a preceding
 * ZeroPad2D (padded positions simply have no presynaptic source).
 *
 * Weight layouts match the float model: Conv2D (kh, kw, c_in, c_out),
 * DepthwiseConv2D (kh, kw, c), Conv1D (k, c_in, c_out), Dense (in, out).
 * AvgPool2D carries a single shared weight.
 */
struct SnnLayer {
    LayerKind kind = LayerKind::Conv2D;
    Shape in_shape;   // logical input shape before padding
    Shape out_shape;
    int kernel_h = 0, kernel_w = 0;
    int stride_h = 1, stride_w = 1;
    int pad_top = 0, pad_left = 0;

    std::vector<int32_t> weights;  // quantized synaptic weights, [-256, 255]
    std::vector<int32_t> biases;   // quantized bias currents (empty for pools)
    int32_t threshold = 1;         // membrane threshold, > 0
    float weight_scale = 1.0f;     // s_l: quantized units per normalized unit
    float lambda = 1.0f;           // activation scale used during normalization
    float rate_factor = 1.0f;      // cumulative prod of threshold/scale up to this layer

    int64_t neuron_count() const { return out_shape.count(); }
};

/** A converted spiking network with hardware-faithful integer parameters. */
struct SnnModel {
    int format_version = 1;
    std::string name;
    Shape input_shape;
    int32_t input_threshold = 1024;  // fixed threshold of the bias-driven input layer
    ResetMode reset_mode = ResetMode::Soft;
    float decay_u = 0.0f;  // synaptic current decay factor per step
    float decay_v = 1.0f;  // membrane potential retention factor per step
    int dthir = 2;
    std::vector<SnnLayer> layers;

    int64_t input_neurons() const { return input_shape.count(); }
};

void validate_snn(const SnnModel& snn);

}  // namespace snnforge
