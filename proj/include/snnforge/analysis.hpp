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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "snnforge/converter.hpp"
#include "snnforge/inference.hpp"
#include "snnforge/simulator.hpp"

namespace snnforge {

/**
 * Per-layer scatter of float activations against spike-rate estimates.
 * Both axes live in the normalized model's units: the estimate is
 * rate * threshold/scale, multiplied by the upstream rate factors so a
 * faithful conversion concentrates on the unit diagonal at every depth.
 */
struct LayerCorrelation {
    int layer = 0;  // spiking layer index (0-based)
    std::string kind;
    std::vector<std::pair<float, float>> pairs;  // (activation, estimate)
    double pearson_r = 0.0;
    bool r_defined = false;  // false when either axis has zero variance
    double max_deviation = 0.0;
    double saturation_fraction = 0.0;  // neurons pinned at rate 1
    std::string verdict;               // good | degraded | uncorrelated | undefined
};

struct CorrelationThresholds {
    double good = 0.99;
    double degraded = 0.90;
};

struct CorrelationReport {
    std::vector<LayerCorrelation> layers;
};

double pearson(std::span<const std::pair<float, float>> pairs, bool* defined = nullptr);

/// Correlates one or more probe samples. Activation traces must come from
/// the normalized parsed model and align 1:1 with the SNN layers.
CorrelationReport correlate(std::span<const ActivationTrace> traces,
                            std::span<const SpikeTrace> spikes, const SnnModel& snn,
                            const CorrelationThresholds& thresholds = {});
CorrelationReport correlate(const ActivationTrace& trace, const SpikeTrace& spikes,
                            const SnnModel& snn, const CorrelationThresholds& thresholds = {});

/// Fraction of samples where both argmax predictions agree (1.0 when empty).
double agreement(const std::vector<int>& a, const std::vector<int>& b);

struct SweepGrid {
    std::vector<ResetMode> resets;
    std::vector<int> dthirs;
    std::vector<int> durations;
};

struct SweepRow {
    ResetMode reset = ResetMode::Soft;
    int dthir = 0;
    int duration = 0;
    double agreement = 0.0;  // SNN argmax vs DNN argmax
    double accuracy = 0.0;   // vs labels; NaN when unlabeled
    int cores = 0;
};

/// Converts once per (reset, dthir) cell and simulates every duration,
/// reporting DNN/SNN agreement, accuracy and the partitioned core count.
std::vector<SweepRow> sweep(const DnnModel& model, const std::vector<Tensor>& calibration,
                            const std::vector<Tensor>& inputs, const std::vector<int>& labels,
                            const SweepGrid& grid, const ConversionConfig& base_config,
                            const SimulationConfig& base_sim);

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);
void save_correlation_report(const CorrelationReport& report, const std::filesystem::path& json_path);
CorrelationReport load_correlation_report(const std::filesystem::path& json_path);
void write_scatter_csv(const LayerCorrelation& layer, const std::filesystem::path& path);

}  // namespace snnforge
