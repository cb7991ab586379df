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
#include <utility>
#include <vector>

#include "snnforge/parser.hpp"
#include "snnforge/snn_model.hpp"

namespace snnforge {

/**
 * Conversion parameters. dthir is the desired threshold-to-input ratio:
 * each layer's integer threshold satisfies theta = round(dthir * s_l),
 * where s_l maps normalized weights onto the quantized range. Must be a
 * power of two (2^1 .. 2^5 are the practically useful levels; large
 * values starve deep layers of spikes).
 */
struct ConversionConfig {
    int dthir = 2;
    float percentile = 99.9f;         // activation percentile for scale estimation
    ResetMode reset_mode = ResetMode::Soft;
    int32_t input_threshold = 1024;
    float decay_u = 0.0f;
    float decay_v = 1.0f;

    // s_l selection details. Weights always participate; biases only when
    // include_bias_in_scale is set (guarded by the wider bias range). A
    // weight_clip_percentile below 100 trades outlier clipping for scale
    // resolution.
    bool include_bias_in_scale = false;
    float weight_clip_percentile = 100.0f;
    bool allow_bias_only_layers = false;

    int32_t bias_min = -4096, bias_max = 4095;  // quantized bias current range
};

inline constexpr int32_t kWeightMin = -256;
inline constexpr int32_t kWeightMax = 255;

/// Per-model-layer activation scales. Structural and pooling layers
/// inherit the previous neural layer's scale so the rescaling chain
/// stays exact end to end.
struct ScaleSet {
    std::vector<float> lambda;      // one per model layer
    std::vector<uint8_t> fallback;  // 1 where all-zero activations forced lambda = 1
    std::vector<uint8_t> inherited; // 1 where the scale was carried over
};

struct LayerConversionReport {
    int layer_index = -1;      // index into the parsed model
    std::string kind;
    double lambda = 1.0;
    bool lambda_fallback = false;
    bool lambda_inherited = false;
    double max_abs_weight = 0.0;   // max |w| after normalization
    double weight_scale = 0.0;     // s_l
    int64_t threshold = 0;
    double quantization_mse = 0.0;
    int64_t clipped_weights = 0;
    int64_t clipped_biases = 0;
    double bias_rate_compensation = 1.0;  // cumulative rate factor applied to the bias
};

struct NormalizationReport {
    double percentile = 0.0;
    int dthir = 0;
    int64_t calibration_samples = 0;
    std::vector<LayerConversionReport> layers;
};

/**
 * Estimates per-layer activation scales: the given percentile of the
 * positive activations over the calibration set. Layers whose
 * activations are all zero fall back to scale 1 with a warning flag.
 */
ScaleSet estimate_scales(const ParsedModel& model, const std::vector<Tensor>& calibration,
                         float percentile);

/**
 * Rescales weights and biases so activations stay within the unit range
 * at the chosen percentile: w' = w * l_prev / l, b' = b / l (input scale
 * is 1; inputs are already normalized to [0,1]). Argmax of the final
 * layer is preserved on every input.
 */
ParsedModel normalize(const ParsedModel& model, const ScaleSet& scales);

/**
 * Quantizes a normalized model into integer synaptic weights, bias
 * currents and thresholds. Per layer: s = 255 / max|w'|, w_q =
 * clamp(round(w'*s), -256, 255), theta = round(dthir*s). Bias currents
 * are divided by the cumulative realized threshold/scale ratio of the
 * upstream layers so spike rates stay proportional to activations at
 * every depth. Rounding is half away from zero throughout.
 */
std::pair<SnnModel, NormalizationReport> quantize(const ParsedModel& normalized,
                                                  const ConversionConfig& config,
                                                  const ScaleSet* scales = nullptr);

/// parse -> estimate_scales -> normalize -> quantize.
std::pair<SnnModel, NormalizationReport> convert(const DnnModel& model,
                                                 const std::vector<Tensor>& calibration,
                                                 const ConversionConfig& config);

/// Linear-interpolation percentile (rank p/100*(n-1)); v is consumed.
float percentile_value(std::vector<float>& v, float p);

bool is_power_of_two(int64_t v);
void validate_conversion_config(const ConversionConfig& config);

}  // namespace snnforge
