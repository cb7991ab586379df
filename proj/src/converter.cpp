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
#include "snnforge/converter.hpp"

#include <algorithm>
#include <cmath>

#include "snnforge/common.hpp"
#include "snnforge/inference.hpp"

namespace snnforge {

namespace {

constexpr float kScaleFloor = 1e-6f;
constexpr int64_t kThresholdCeiling = int64_t{1} << 30;

bool is_neural(LayerKind k) { return is_weighted(k) || k == LayerKind::AvgPool2D; }

int32_t round_away(double x) { return static_cast<int32_t>(std::llround(x)); }

int32_t clamp_count(double x, int32_t lo, int32_t hi, int64_t& clipped) {
    int64_t r = std::llround(x);
    if (r < lo) {
        ++clipped;
        return lo;
    }
    if (r > hi) {
        ++clipped;
        return hi;
    }
    return static_cast<int32_t>(r);
}

}  // namespace

const char* to_string(ResetMode m) { return m == ResetMode::Soft ? "soft" : "hard"; }

ResetMode reset_mode_from_string(const std::string& s) {
    if (s == "soft") return ResetMode::Soft;
    if (s == "hard") return ResetMode::Hard;
    throw InputError("unknown reset mode '" + s + "'");
}

bool is_power_of_two(int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

void validate_conversion_config(const ConversionConfig& config) {
    if (!is_power_of_two(config.dthir)) throw InputError("dthir must be a power of two");
    if (!(config.percentile > 0.0f && config.percentile <= 100.0f))
        throw InputError("percentile must be in (0, 100]");
    if (!(config.weight_clip_percentile > 0.0f && config.weight_clip_percentile <= 100.0f))
        throw InputError("weight clip percentile must be in (0, 100]");
    if (config.input_threshold <= 0) throw InputError("input threshold must be positive");
    if (config.decay_u < 0.0f || config.decay_u > 1.0f || config.decay_v < 0.0f || config.decay_v > 1.0f)
        throw InputError("decay factors must be in [0, 1]");
    if (config.bias_min >= 0 || config.bias_max <= 0) throw InputError("bias range must straddle zero");
}

float percentile_value(std::vector<float>& v, float p) {
    if (v.empty()) throw InputError("percentile of an empty set");
    const size_t n = v.size();
    double rank = static_cast<double>(p) / 100.0 * static_cast<double>(n - 1);
    size_t lo = static_cast<size_t>(rank);
    if (lo >= n - 1) {
        std::nth_element(v.begin(), v.begin() + static_cast<long>(n - 1), v.end());
        return v[n - 1];
    }
    std::nth_element(v.begin(), v.begin() + static_cast<long>(lo), v.end());
    float vlo = v[lo];
    float vhi = *std::min_element(v.begin() + static_cast<long>(lo) + 1, v.end());
    double frac = rank - static_cast<double>(lo);
    return static_cast<float>(vlo + frac * (vhi - vlo));
}

ScaleSet estimate_scales(const ParsedModel& parsed, const std::vector<Tensor>& calibration,
                         float percentile) {
    if (calibration.empty()) throw InputError("calibration set is empty");
    if (!(percentile > 0.0f && percentile <= 100.0f))
        throw InputError("percentile must be in (0, 100]");

    const DnnModel& model = parsed.model;
    const size_t n_layers = model.layers.size();

    // positive activations per model layer, pooled over the calibration set
    std::vector<std::vector<float>> positives(n_layers);
    for (const Tensor& sample : calibration) {
        InferResult r = infer(model, sample, true);
        for (const ActivationEntry& e : r.trace.entries) {
            auto& bucket = positives[static_cast<size_t>(e.layer_index)];
            for (float a : e.values.data)
                if (a > 0.0f) bucket.push_back(a);
        }
    }

    ScaleSet scales;
    scales.lambda.assign(n_layers, 1.0f);
    scales.fallback.assign(n_layers, 0);
    scales.inherited.assign(n_layers, 0);

    float prev = 1.0f;
    for (size_t i = 0; i < n_layers; ++i) {
        const LayerKind kind = model.layers[i].kind;
        if (is_weighted(kind)) {
            auto& bucket = positives[i];
            if (bucket.empty()) {
                scales.lambda[i] = 1.0f;
                scales.fallback[i] = 1;
            } else {
                scales.lambda[i] = std::max(percentile_value(bucket, percentile), kScaleFloor);
            }
        } else {
            // pooling and structural layers carry the previous scale so the
            // chain w' = w * l_prev / l stays exact without layer weights
            scales.lambda[i] = prev;
            scales.inherited[i] = 1;
        }
        prev = scales.lambda[i];
    }
    return scales;
}

ParsedModel normalize(const ParsedModel& parsed, const ScaleSet& scales) {
    const DnnModel& src = parsed.model;
    if (scales.lambda.size() != src.layers.size())
        throw InputError("scale set does not match the model layer count");
    for (float l : scales.lambda)
        if (!(l > 0.0f) || !std::isfinite(l)) throw InputError("scales must be positive and finite");

    DnnModel out = src;
    float prev = 1.0f;  // input scale: pixels are already in [0, 1]
    for (size_t i = 0; i < out.layers.size(); ++i) {
        LayerSpec& L = out.layers[i];
        const float own = scales.lambda[i];
        if (is_weighted(L.kind)) {
            const float wf = prev / own;
            for (float& w : L.weights) w *= wf;
            for (float& b : L.biases) b /= own;
        }
        prev = own;
    }
    return ParsedModel{std::move(out)};
}

std::pair<SnnModel, NormalizationReport> quantize(const ParsedModel& normalized,
                                                  const ConversionConfig& config,
                                                  const ScaleSet* scales) {
    validate_conversion_config(config);
    const DnnModel& model = normalized.model;

    SnnModel snn;
    snn.name = model.name;
    snn.input_shape = model.input_shape;
    snn.input_threshold = config.input_threshold;
    snn.reset_mode = config.reset_mode;
    snn.decay_u = config.decay_u;
    snn.decay_v = config.decay_v;
    snn.dthir = config.dthir;

    NormalizationReport report;
    report.percentile = config.percentile;
    report.dthir = config.dthir;

    Shape cur = model.input_shape;   // logical shape entering the next neural layer
    int pad_top = 0, pad_left = 0;   // pending zero padding
    bool pending_pad = false;
    double rate_factor = 1.0;        // cumulative theta/s over neural layers

    for (int i = 0; i < static_cast<int>(model.layers.size()); ++i) {
        const LayerSpec& L = model.layers[static_cast<size_t>(i)];
        if (!is_backend_supported(L.kind))
            throw InputError("layer " + std::to_string(i) + ": model is not parsed (" +
                             to_string(L.kind) + ")");

        if (L.kind == LayerKind::Flatten || L.kind == LayerKind::Reshape) {
            if (pending_pad)
                throw InputError("layer " + std::to_string(i) +
                                 ": padding must directly precede a convolution");
            cur = L.output_shape;
            continue;
        }
        if (L.kind == LayerKind::ZeroPad2D) {
            pad_top += L.pad_top;
            pad_left += L.pad_left;
            pending_pad = true;
            continue;
        }
        if (!is_neural(L.kind))
            throw InputError("layer " + std::to_string(i) + ": no spiking equivalent for " +
                             std::string(to_string(L.kind)));
        if (pending_pad && L.kind != LayerKind::Conv2D && L.kind != LayerKind::DepthwiseConv2D)
            throw InputError("layer " + std::to_string(i) +
                             ": padding must directly precede a convolution");
        if (L.padding == PaddingMode::Same &&
            (L.kind == LayerKind::Conv2D || L.kind == LayerKind::DepthwiseConv2D))
            throw InputError("layer " + std::to_string(i) + ": model is not parsed (same padding)");

        SnnLayer sl;
        sl.kind = L.kind;
        sl.in_shape = cur;
        sl.out_shape = L.output_shape;
        sl.kernel_h = L.kernel_h;
        sl.kernel_w = L.kernel_w;
        sl.stride_h = L.stride_h;
        sl.stride_w = L.stride_w;
        sl.pad_top = pad_top;
        sl.pad_left = pad_left;
        pad_top = pad_left = 0;
        pending_pad = false;

        LayerConversionReport lr;
        lr.layer_index = i;
        lr.kind = to_string(L.kind);
        if (scales && i < static_cast<int>(scales->lambda.size())) {
            lr.lambda = scales->lambda[static_cast<size_t>(i)];
            lr.lambda_fallback = scales->fallback[static_cast<size_t>(i)] != 0;
            lr.lambda_inherited = scales->inherited[static_cast<size_t>(i)] != 0;
        }
        sl.lambda = static_cast<float>(lr.lambda);
        lr.bias_rate_compensation = rate_factor;

        // effective float weights: explicit for weighted layers, the uniform
        // window mean for average pooling
        double max_abs_w = 0.0;
        double scale = 0.0;
        if (L.kind == LayerKind::AvgPool2D) {
            const double w = 1.0 / (L.kernel_h * L.kernel_w);
            max_abs_w = w;
            scale = 255.0 / w;
            sl.weights.assign(1, round_away(w * scale));  // exactly 255
        } else {
            for (float w : L.weights) max_abs_w = std::max(max_abs_w, std::fabs(static_cast<double>(w)));
            double scale_basis = max_abs_w;
            if (config.weight_clip_percentile < 100.0f && !L.weights.empty()) {
                std::vector<float> mags(L.weights.size());
                for (size_t k = 0; k < L.weights.size(); ++k) mags[k] = std::fabs(L.weights[k]);
                scale_basis = percentile_value(mags, config.weight_clip_percentile);
            }
            if (config.include_bias_in_scale) {
                // a bias of magnitude m needs s <= bias_max/m, i.e. behaves like
                // a weight of magnitude m * 255/bias_max in the max() below
                for (float b : L.biases)
                    scale_basis = std::max(scale_basis,
                                           std::fabs(static_cast<double>(b)) * 255.0 / config.bias_max);
            }
            if (max_abs_w == 0.0) {
                double max_abs_b = 0.0;
                for (float b : L.biases) max_abs_b = std::max(max_abs_b, std::fabs(static_cast<double>(b)));
                if (!(config.allow_bias_only_layers && max_abs_b > 0.0))
                    throw InputError("degenerate layer " + std::to_string(i) +
                                     " (all weights are zero)");
                scale = static_cast<double>(config.bias_max) / max_abs_b;
            } else {
                scale = 255.0 / std::max(scale_basis, static_cast<double>(kScaleFloor) * 1e-6);
            }
            if (!std::isfinite(scale) || scale <= 0.0)
                throw InputError("degenerate layer " + std::to_string(i));

            sl.weights.resize(L.weights.size());
            double mse = 0.0;
            for (size_t k = 0; k < L.weights.size(); ++k) {
                double w = static_cast<double>(L.weights[k]) * scale;
                sl.weights[k] = clamp_count(w, kWeightMin, kWeightMax, lr.clipped_weights);
                double err = sl.weights[k] / scale - L.weights[k];
                mse += err * err;
            }
            if (!L.weights.empty()) lr.quantization_mse = mse / static_cast<double>(L.weights.size());
        }

        int64_t theta = std::llround(static_cast<double>(config.dthir) * scale);
        if (theta < 1 || theta > kThresholdCeiling)
            throw InputError("layer " + std::to_string(i) + ": threshold " + std::to_string(theta) +
                             " is outside the representable range");
        sl.threshold = static_cast<int32_t>(theta);
        sl.weight_scale = static_cast<float>(scale);

        // bias currents: divide by the upstream rate attenuation so deeper
        // layers keep rate/activation proportionality
        sl.biases.resize(L.biases.size());
        for (size_t k = 0; k < L.biases.size(); ++k) {
            double b = static_cast<double>(L.biases[k]) * scale / rate_factor;
            sl.biases[k] = clamp_count(b, config.bias_min, config.bias_max, lr.clipped_biases);
        }

        rate_factor *= static_cast<double>(theta) / scale;
        sl.rate_factor = static_cast<float>(rate_factor);

        lr.max_abs_weight = max_abs_w;
        lr.weight_scale = scale;
        lr.threshold = theta;
        report.layers.push_back(std::move(lr));
        snn.layers.push_back(std::move(sl));
        cur = L.output_shape;
    }

    if (snn.layers.empty()) throw InputError("model has no spiking layers");
    validate_snn(snn);
    return {std::move(snn), std::move(report)};
}

std::pair<SnnModel, NormalizationReport> convert(const DnnModel& model,
                                                 const std::vector<Tensor>& calibration,
                                                 const ConversionConfig& config) {
    validate_conversion_config(config);
    ParsedModel parsed = parse(model);
    ScaleSet scales = estimate_scales(parsed, calibration, config.percentile);
    ParsedModel normalized = normalize(parsed, scales);
    auto [snn, report] = quantize(normalized, config, &scales);
    report.calibration_samples = static_cast<int64_t>(calibration.size());
    return {std::move(snn), std::move(report)};
}

void validate_snn(const SnnModel& snn) {
    if (snn.input_shape.empty()) throw InputError("snn model has no input shape");
    if (snn.input_threshold <= 0) throw InputError("input threshold must be positive");
    Shape cur = snn.input_shape;
    for (int i = 0; i < static_cast<int>(snn.layers.size()); ++i) {
        const SnnLayer& L = snn.layers[static_cast<size_t>(i)];
        if (L.threshold <= 0)
            throw InputError("snn layer " + std::to_string(i) + ": threshold must be positive");
        if (L.in_shape.count() != cur.count())
            throw InputError("snn layer " + std::to_string(i) + ": input " + L.in_shape.str() +
                             " does not chain from " + cur.str());
        for (int32_t w : L.weights)
            if (w < kWeightMin || w > kWeightMax)
                throw InputError("snn layer " + std::to_string(i) + ": weight outside [-256, 255]");
        cur = L.out_shape;
    }
}

}  // namespace snnforge
