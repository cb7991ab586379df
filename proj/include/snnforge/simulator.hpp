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
#include <optional>
#include <span>
#include <vector>

#include "snnforge/snn_model.hpp"

namespace snnforge {

/**
 * Discrete-time CUBA LIF dynamics with saturating 32-bit integer state.
 * Per step and neuron:
 *
 *   u <- round(decay_u * u) + sum_j w_qj * spike_j + u_bias
 *   v <- round(decay_v * v) + u
 *   if v >= theta: spike; soft reset v <- v - theta, hard reset v <- 0
 *
 * At most one spike per neuron per step. Spikes cross one layer per
 * step (barrier-synchronized mesh), so layer l+1 sees layer l's spikes
 * from the previous step. Overflow saturates and raises a flag instead
 * of wrapping, which almost always indicates a mis-normalized model.
 */
struct SimulationConfig {
    int duration = 256;                     // counted time-steps T
    int warmup_steps = 0;                   // extra uncounted steps before the window
    std::optional<ResetMode> reset_override;  // defaults to the model's mode
    bool record_rasters = false;
};

struct SpikeEvent {
    int step;    // 0-based within the counted window
    int layer;   // 0 = input layer
    int neuron;
};

struct SpikeTrace {
    int duration = 0;  // counted steps
    std::vector<std::vector<int32_t>> counts;  // [layer][neuron], layer 0 = input
    std::vector<SpikeEvent> raster;            // only when record_rasters
    bool overflow = false;

    double rate(int layer, int neuron) const {
        return static_cast<double>(counts[static_cast<size_t>(layer)][static_cast<size_t>(neuron)]) /
               duration;
    }
};

struct SimulationResult {
    SpikeTrace trace;
    int predicted_class = 0;  // argmax of output-layer counts, ties to the lowest index
};

/// Per-pixel input bias currents: round(x * input_threshold). Throws on
/// values outside [0, 1].
std::vector<int32_t> encode_input(const Tensor& image, int32_t input_threshold);

/** State of one layer of LIF neurons. */
struct LifLayerState {
    std::vector<int32_t> u, v;
    std::vector<uint8_t> spiked;   // this step's output spikes
    std::vector<int32_t> counts;
    bool overflow = false;

    explicit LifLayerState(int64_t n)
        : u(static_cast<size_t>(n), 0), v(static_cast<size_t>(n), 0),
          spiked(static_cast<size_t>(n), 0), counts(static_cast<size_t>(n), 0) {}
};

/**
 * Advances one layer by one step. weighted_input may be empty (bias-only
 * drive, e.g. the input layer). `count_spikes` gates the spike counters
 * so warm-up steps stay out of the rates.
 */
void lif_step(LifLayerState& state, std::span<const int32_t> weighted_input,
              std::span<const int32_t> bias, int32_t theta, float decay_u, float decay_v,
              ResetMode reset, bool count_spikes);

SimulationResult simulate(const SnnModel& snn, const Tensor& image, const SimulationConfig& config);

struct BatchResult {
    double accuracy = 0.0;  // NaN when the label set is empty
    std::vector<int> predictions;
    int64_t total_output_spikes = 0;
    bool overflow = false;
};

/// Sequential per-sample simulation; accuracy is the mean over labeled samples.
BatchResult batch_simulate(const SnnModel& snn, const std::vector<Tensor>& images,
                           const std::vector<int>& labels, const SimulationConfig& config);

void write_spike_counts_csv(const SpikeTrace& trace, const std::string& path);
void write_raster_csv(const SpikeTrace& trace, const std::string& path);

}  // namespace snnforge
