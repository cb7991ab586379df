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
#include "snnforge/simulator.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "snnforge/common.hpp"

namespace snnforge {

namespace {

int32_t saturate(int64_t x, bool& overflow) {
    if (x > std::numeric_limits<int32_t>::max()) {
        overflow = true;
        return std::numeric_limits<int32_t>::max();
    }
    if (x < std::numeric_limits<int32_t>::min()) {
        overflow = true;
        return std::numeric_limits<int32_t>::min();
    }
    return static_cast<int32_t>(x);
}

int64_t decayed(float decay, int32_t value) {
    if (decay == 0.0f) return 0;
    if (decay == 1.0f) return value;
    return std::llround(static_cast<double>(decay) * static_cast<double>(value));
}

// Integer weighted spike sums per layer kind. Spike buffers are flat in
// the source layer's row-major order; padded positions have no source.

void weighted_conv2d(const SnnLayer& L, const uint8_t* spikes, int32_t* out) {
    const int ih = L.in_shape.dim(0), iw = L.in_shape.dim(1), ci = L.in_shape.dim(2);
    const int oh = L.out_shape.dim(0), ow = L.out_shape.dim(1), co = L.out_shape.dim(2);
    int32_t* o = out;
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            for (int oc = 0; oc < co; ++oc) *o++ = 0;
            o -= co;
            for (int ky = 0; ky < L.kernel_h; ++ky) {
                int iy = oy * L.stride_h + ky - L.pad_top;
                if (iy < 0 || iy >= ih) continue;
                for (int kx = 0; kx < L.kernel_w; ++kx) {
                    int ix = ox * L.stride_w + kx - L.pad_left;
                    if (ix < 0 || ix >= iw) continue;
                    const uint8_t* srow = &spikes[(iy * iw + ix) * ci];
                    const int32_t* wbase = &L.weights[static_cast<size_t>(((ky * L.kernel_w + kx) * ci)) *
                                                      static_cast<size_t>(co)];
                    for (int ic = 0; ic < ci; ++ic) {
                        if (!srow[ic]) continue;
                        const int32_t* wrow = wbase + static_cast<size_t>(ic) * co;
                        for (int oc = 0; oc < co; ++oc) o[oc] += wrow[oc];
                    }
                }
            }
            o += co;
        }
    }
}

void weighted_depthwise(const SnnLayer& L, const uint8_t* spikes, int32_t* out) {
    const int ih = L.in_shape.dim(0), iw = L.in_shape.dim(1), c = L.in_shape.dim(2);
    const int oh = L.out_shape.dim(0), ow = L.out_shape.dim(1);
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            for (int ch = 0; ch < c; ++ch) {
                int32_t acc = 0;
                for (int ky = 0; ky < L.kernel_h; ++ky) {
                    int iy = oy * L.stride_h + ky - L.pad_top;
                    if (iy < 0 || iy >= ih) continue;
                    for (int kx = 0; kx < L.kernel_w; ++kx) {
                        int ix = ox * L.stride_w + kx - L.pad_left;
                        if (ix < 0 || ix >= iw) continue;
                        if (spikes[(iy * iw + ix) * c + ch])
                            acc += L.weights[static_cast<size_t>((ky * L.kernel_w + kx) * c + ch)];
                    }
                }
                out[(oy * ow + ox) * c + ch] = acc;
            }
        }
    }
}

void weighted_conv1d(const SnnLayer& L, const uint8_t* spikes, int32_t* out) {
    const int il = L.in_shape.dim(0), ci = L.in_shape.dim(1);
    const int ol = L.out_shape.dim(0), co = L.out_shape.dim(1);
    for (int o = 0; o < ol; ++o) {
        for (int oc = 0; oc < co; ++oc) {
            int32_t acc = 0;
            for (int k = 0; k < L.kernel_w; ++k) {
                int i = o * L.stride_w + k - L.pad_left;
                if (i < 0 || i >= il) continue;
                for (int ic = 0; ic < ci; ++ic)
                    if (spikes[i * ci + ic])
                        acc += L.weights[static_cast<size_t>((k * ci + ic) * co + oc)];
            }
            out[o * co + oc] = acc;
        }
    }
}

void weighted_dense(const SnnLayer& L, const uint8_t* spikes, int32_t* out) {
    const int n_in = L.in_shape.dim(0), n_out = L.out_shape.dim(0);
    for (int o = 0; o < n_out; ++o) out[o] = 0;
    for (int i = 0; i < n_in; ++i) {
        if (!spikes[i]) continue;
        const int32_t* wrow = &L.weights[static_cast<size_t>(i) * n_out];
        for (int o = 0; o < n_out; ++o) out[o] += wrow[o];
    }
}

void weighted_pool(const SnnLayer& L, const uint8_t* spikes, int32_t* out) {
    const int ih = L.in_shape.dim(0), iw = L.in_shape.dim(1), c = L.in_shape.dim(2);
    const int oh = L.out_shape.dim(0), ow = L.out_shape.dim(1);
    const int32_t w0 = L.weights[0];
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            for (int ch = 0; ch < c; ++ch) {
                int32_t hits = 0;
                for (int ky = 0; ky < L.kernel_h; ++ky) {
                    int iy = oy * L.stride_h + ky;
                    if (iy >= ih) continue;
                    for (int kx = 0; kx < L.kernel_w; ++kx) {
                        int ix = ox * L.stride_w + kx;
                        if (ix >= iw) continue;
                        hits += spikes[(iy * iw + ix) * c + ch];
                    }
                }
                out[(oy * ow + ox) * c + ch] = w0 * hits;
            }
        }
    }
}

void weighted_input_for(const SnnLayer& L, const uint8_t* spikes, int32_t* out) {
    switch (L.kind) {
        case LayerKind::Conv2D: weighted_conv2d(L, spikes, out); break;
        case LayerKind::DepthwiseConv2D: weighted_depthwise(L, spikes, out); break;
        case LayerKind::Conv1D: weighted_conv1d(L, spikes, out); break;
        case LayerKind::Dense: weighted_dense(L, spikes, out); break;
        case LayerKind::AvgPool2D: weighted_pool(L, spikes, out); break;
        default: throw InputError("layer kind has no spiking implementation");
    }
}

// Bias currents are stored per output channel (matching the float model's
// layout); the stepper wants one entry per neuron.
std::vector<int32_t> per_neuron_bias(const SnnLayer& L) {
    const int64_t n = L.neuron_count();
    std::vector<int32_t> bias(static_cast<size_t>(n), 0);
    if (L.biases.empty()) return bias;  // pooling layers have no bias
    if (L.kind == LayerKind::Dense) {
        if (static_cast<int64_t>(L.biases.size()) != n)
            throw InputError("dense bias vector does not match the neuron count");
        return std::vector<int32_t>(L.biases.begin(), L.biases.end());
    }
    const int channels = L.out_shape.dim(L.out_shape.rank() - 1);
    if (static_cast<int>(L.biases.size()) != channels)
        throw InputError("bias vector does not match the channel count");
    for (int64_t i = 0; i < n; ++i)
        bias[static_cast<size_t>(i)] = L.biases[static_cast<size_t>(i % channels)];
    return bias;
}

}  // namespace

std::vector<int32_t> encode_input(const Tensor& image, int32_t input_threshold) {
    std::vector<int32_t> bias(image.data.size());
    for (size_t i = 0; i < image.data.size(); ++i) {
        float x = image.data[i];
        if (!(x >= 0.0f && x <= 1.0f))
            throw InputError("input pixel " + std::to_string(i) + " = " + std::to_string(x) +
                             " outside [0, 1]");
        bias[i] = static_cast<int32_t>(std::llround(static_cast<double>(x) * input_threshold));
    }
    return bias;
}

void lif_step(LifLayerState& state, std::span<const int32_t> weighted_input,
              std::span<const int32_t> bias, int32_t theta, float decay_u, float decay_v,
              ResetMode reset, bool count_spikes) {
    const size_t n = state.v.size();
    for (size_t i = 0; i < n; ++i) {
        int64_t u = decayed(decay_u, state.u[i]);
        if (!weighted_input.empty()) u += weighted_input[i];
        if (!bias.empty()) u += bias[i];
        state.u[i] = saturate(u, state.overflow);

        int64_t v = decayed(decay_v, state.v[i]) + state.u[i];
        int32_t v32 = saturate(v, state.overflow);

        if (v32 >= theta) {
            state.spiked[i] = 1;
            if (count_spikes) ++state.counts[i];
            v32 = reset == ResetMode::Soft ? v32 - theta : 0;
        } else {
            state.spiked[i] = 0;
        }
        state.v[i] = v32;
    }
}

SimulationResult simulate(const SnnModel& snn, const Tensor& image, const SimulationConfig& config) {
    if (config.duration < 1) throw InputError("duration must be at least 1");
    if (config.warmup_steps < 0) throw InputError("warmup must be non-negative");
    if (image.shape != snn.input_shape)
        throw InputError("input shape " + image.shape.str() + " does not match model input " +
                         snn.input_shape.str());

    const ResetMode reset = config.reset_override.value_or(snn.reset_mode);
    const int n_layers = static_cast<int>(snn.layers.size());

    std::vector<int32_t> input_bias = encode_input(image, snn.input_threshold);

    std::vector<LifLayerState> states;
    states.reserve(static_cast<size_t>(n_layers) + 1);
    states.emplace_back(snn.input_neurons());
    for (const SnnLayer& L : snn.layers) states.emplace_back(L.neuron_count());

    // double-buffered spike planes: layer l reads prev[l-1], writes next[l]
    std::vector<std::vector<uint8_t>> prev(static_cast<size_t>(n_layers) + 1);
    for (int l = 0; l <= n_layers; ++l)
        prev[static_cast<size_t>(l)].assign(states[static_cast<size_t>(l)].v.size(), 0);

    std::vector<std::vector<int32_t>> drive(static_cast<size_t>(n_layers));
    std::vector<std::vector<int32_t>> layer_bias(static_cast<size_t>(n_layers));
    for (int l = 0; l < n_layers; ++l) {
        drive[static_cast<size_t>(l)].assign(
            static_cast<size_t>(snn.layers[static_cast<size_t>(l)].neuron_count()), 0);
        layer_bias[static_cast<size_t>(l)] = per_neuron_bias(snn.layers[static_cast<size_t>(l)]);
    }

    SimulationResult result;
    SpikeTrace& trace = result.trace;
    trace.duration = config.duration;

    const int total_steps = config.warmup_steps + config.duration;
    for (int step = 0; step < total_steps; ++step) {
        const bool counting = step >= config.warmup_steps;

        lif_step(states[0], {}, input_bias, snn.input_threshold, snn.decay_u, snn.decay_v, reset,
                 counting);
        for (int l = 0; l < n_layers; ++l) {
            const SnnLayer& L = snn.layers[static_cast<size_t>(l)];
            weighted_input_for(L, prev[static_cast<size_t>(l)].data(), drive[static_cast<size_t>(l)].data());
            lif_step(states[static_cast<size_t>(l) + 1], drive[static_cast<size_t>(l)], L.biases,
                     L.threshold, snn.decay_u, snn.decay_v, reset, counting);
        }

        for (int l = 0; l <= n_layers; ++l) {
            auto& st = states[static_cast<size_t>(l)];
            std::copy(st.spiked.begin(), st.spiked.end(), prev[static_cast<size_t>(l)].begin());
            if (counting && config.record_rasters) {
                for (int n = 0; n < static_cast<int>(st.spiked.size()); ++n)
                    if (st.spiked[static_cast<size_t>(n)])
                        trace.raster.push_back({step - config.warmup_steps, l, n});
            }
        }
    }

    trace.counts.reserve(states.size());
    for (auto& st : states) {
        trace.counts.push_back(std::move(st.counts));
        trace.overflow = trace.overflow || st.overflow;
    }

    std::vector<float> out_counts(trace.counts.back().begin(), trace.counts.back().end());
    result.predicted_class = argmax(out_counts);
    return result;
}

BatchResult batch_simulate(const SnnModel& snn, const std::vector<Tensor>& images,
                           const std::vector<int>& labels, const SimulationConfig& config) {
    if (!labels.empty() && labels.size() != images.size())
        throw InputError("label count does not match sample count");

    BatchResult batch;
    batch.predictions.reserve(images.size());
    int64_t correct = 0;
    for (size_t i = 0; i < images.size(); ++i) {
        SimulationResult r = simulate(snn, images[i], config);
        batch.predictions.push_back(r.predicted_class);
        batch.overflow = batch.overflow || r.trace.overflow;
        for (int32_t c : r.trace.counts.back()) batch.total_output_spikes += c;
        if (!labels.empty() && r.predicted_class == labels[i]) ++correct;
    }
    batch.accuracy = labels.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : static_cast<double>(correct) / static_cast<double>(labels.size());
    return batch;
}

void write_spike_counts_csv(const SpikeTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "layer,neuron,count,rate\n";
    for (size_t l = 0; l < trace.counts.size(); ++l)
        for (size_t n = 0; n < trace.counts[l].size(); ++n)
            out << l << ',' << n << ',' << trace.counts[l][n] << ','
                << static_cast<double>(trace.counts[l][n]) / trace.duration << '\n';
}

void write_raster_csv(const SpikeTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "step,layer,neuron\n";
    for (const SpikeEvent& e : trace.raster) out << e.step << ',' << e.layer << ',' << e.neuron << '\n';
}

}  // namespace snnforge
