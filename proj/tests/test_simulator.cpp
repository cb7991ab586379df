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
#include <limits>

#include "doctest.h"
#include "snnforge/common.hpp"
#include "snnforge/converter.hpp"
#include "snnforge/inference.hpp"
#include "snnforge/simulator.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace snnforge;

namespace {

// Isolated neuron with constant bias drive. Returns the spike count.
int64_t run_neuron(int32_t bias, int32_t theta, int steps, ResetMode reset, float decay_u = 0.0f,
                   float decay_v = 1.0f) {
    LifLayerState state(1);
    std::vector<int32_t> b{bias};
    for (int t = 0; t < steps; ++t) lif_step(state, {}, b, theta, decay_u, decay_v, reset, true);
    return state.counts[0];
}

// 1-input, 1-output chain: w_q equals the output threshold, no bias.
SnnModel single_path(int layers) {
    SnnModel snn;
    snn.input_shape = Shape({1});
    snn.input_threshold = 1024;
    for (int i = 0; i < layers; ++i) {
        SnnLayer L;
        L.kind = LayerKind::Dense;
        L.in_shape = Shape({1});
        L.out_shape = Shape({1});
        L.threshold = 100;
        L.weights = {100};
        L.biases = {0};
        snn.layers.push_back(L);
    }
    return snn;
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("input encoding: bias = round(pixel * threshold)") {
    Tensor x(Shape({3}));
    x.data = {0.0f, 0.5f, 1.0f};
    auto bias = encode_input(x, 1024);
    CHECK(bias == std::vector<int32_t>{0, 512, 1024});
    x.data[1] = 1.5f;
    CHECK_THROWS_AS(encode_input(x, 1024), InputError);
    x.data[1] = -0.1f;
    CHECK_THROWS_AS(encode_input(x, 1024), InputError);
}

TEST_CASE("encoded pixel rates: 0.0 silent, 1.0 every step, 0.5 every other step") {
    CHECK(run_neuron(0, 1024, 256, ResetMode::Soft) == 0);
    CHECK(run_neuron(1024, 1024, 256, ResetMode::Soft) == 256);
    CHECK(run_neuron(512, 1024, 256, ResetMode::Soft) == 128);
}

TEST_CASE("constant drive 0.75*theta: hard reset at rate 1/2, soft reset at 3/4") {
    // hard: v walks 768, 1536 -> spike -> 0, ... period 2
    CHECK(run_neuron(768, 1024, 256, ResetMode::Hard) == 128);
    // soft: 768, 1536->512, 1280->256, 1024->0: period 4, three spikes
    CHECK(run_neuron(768, 1024, 256, ResetMode::Soft) == 192);
}

TEST_CASE("zero input and zero bias stays silent") {
    CHECK(run_neuron(0, 1, 64, ResetMode::Soft) == 0);
    CHECK(run_neuron(0, 1, 64, ResetMode::Hard) == 0);
}

TEST_CASE("soft and hard closed forms hold for arbitrary drives") {
    for (int32_t theta : {7, 64, 1000}) {
        for (int32_t d = 0; d <= theta; d += std::max(1, theta / 11)) {
            for (int steps : {1, 5, 64, 257}) {
                CHECK(run_neuron(d, theta, steps, ResetMode::Soft) ==
                      oracle::soft_reset_count(d, theta, steps));
                CHECK(run_neuron(d, theta, steps, ResetMode::Hard) ==
                      oracle::hard_reset_count(d, theta, steps));
                CHECK(run_neuron(d, theta, steps, ResetMode::Hard) <=
                      run_neuron(d, theta, steps, ResetMode::Soft));
            }
        }
    }
}

TEST_CASE("with no spiking and no leak the potential integrates the drive exactly") {
    LifLayerState state(1);
    std::vector<int32_t> b{37};
    const int32_t huge = std::numeric_limits<int32_t>::max();
    for (int t = 0; t < 100; ++t) lif_step(state, {}, b, huge, 0.0f, 1.0f, ResetMode::Soft, true);
    CHECK(state.v[0] == 3700);
    CHECK(state.counts[0] == 0);
}

TEST_CASE("overflow saturates and raises the trace flag") {
    LifLayerState state(1);
    std::vector<int32_t> b{std::numeric_limits<int32_t>::max()};
    for (int t = 0; t < 3; ++t)
        lif_step(state, {}, b, std::numeric_limits<int32_t>::max(), 0.0f, 1.0f, ResetMode::Hard, true);
    CHECK(state.overflow);
    CHECK(state.v[0] <= std::numeric_limits<int32_t>::max());
}

TEST_CASE("T = 1: only the input layer can spike; prediction falls to index 0") {
    SnnModel snn = single_path(2);
    Tensor x(Shape({1}));
    x.data = {1.0f};
    SimulationConfig cfg;
    cfg.duration = 1;
    SimulationResult r = simulate(snn, x, cfg);
    CHECK(r.trace.counts[0][0] == 1);  // input
    CHECK(r.trace.counts[1][0] == 0);
    CHECK(r.trace.counts[2][0] == 0);
    CHECK(r.predicted_class == 0);
}

TEST_CASE("single-path delay accounting: output rate is 1 - L/T") {
    for (int layers : {1, 2, 3}) {
        SnnModel snn = single_path(layers);
        Tensor x(Shape({1}));
        x.data = {1.0f};
        SimulationConfig cfg;
        cfg.duration = 64;
        SimulationResult r = simulate(snn, x, cfg);
        CHECK(r.trace.counts.back()[0] == 64 - layers);
    }
}

TEST_CASE("warm-up steps keep the pipeline fill out of the counting window") {
    SnnModel snn = single_path(3);
    Tensor x(Shape({1}));
    x.data = {1.0f};
    SimulationConfig cfg;
    cfg.duration = 64;
    cfg.warmup_steps = 3;
    SimulationResult r = simulate(snn, x, cfg);
    CHECK(r.trace.counts.back()[0] == 64);  // full rate once the pipeline is filled
}

TEST_CASE("simulation is deterministic") {
    DnnModel m = testgen::random_conv3_net(40);
    auto calib = testgen::random_inputs(m.input_shape, 8, 7);
    auto [snn, report] = convert(m, calib, ConversionConfig{});
    Tensor x = testgen::random_input(m.input_shape, 1234);
    SimulationConfig cfg;
    cfg.duration = 128;
    cfg.record_rasters = true;
    SimulationResult a = simulate(snn, x, cfg);
    SimulationResult b = simulate(snn, x, cfg);
    CHECK(a.trace.counts == b.trace.counts);
    CHECK(a.predicted_class == b.predicted_class);
    REQUIRE(a.trace.raster.size() == b.trace.raster.size());
    for (size_t i = 0; i < a.trace.raster.size(); ++i) {
        CHECK(a.trace.raster[i].step == b.trace.raster[i].step);
        CHECK(a.trace.raster[i].layer == b.trace.raster[i].layer);
        CHECK(a.trace.raster[i].neuron == b.trace.raster[i].neuron);
    }
}

TEST_CASE("raster counts are consistent with the spike counters") {
    DnnModel m = testgen::random_conv3_net(41);
    auto calib = testgen::random_inputs(m.input_shape, 8, 8);
    auto [snn, report] = convert(m, calib, ConversionConfig{});
    Tensor x = testgen::random_input(m.input_shape, 4321);
    SimulationConfig cfg;
    cfg.duration = 96;
    cfg.warmup_steps = 4;
    cfg.record_rasters = true;
    SpikeTrace trace = simulate(snn, x, cfg).trace;

    std::vector<std::vector<int32_t>> from_raster(trace.counts.size());
    for (size_t l = 0; l < trace.counts.size(); ++l)
        from_raster[l].assign(trace.counts[l].size(), 0);
    for (const SpikeEvent& e : trace.raster) {
        CHECK(e.step >= 0);
        CHECK(e.step < cfg.duration);
        ++from_raster[(size_t)e.layer][(size_t)e.neuron];
    }
    CHECK(from_raster == trace.counts);
}

TEST_CASE("rates stay within [0, 1]") {
    DnnModel m = testgen::random_conv3_net(42);
    auto calib = testgen::random_inputs(m.input_shape, 8, 9);
    auto [snn, report] = convert(m, calib, ConversionConfig{});
    Tensor x = testgen::random_input(m.input_shape, 77);
    SimulationConfig cfg;
    cfg.duration = 64;
    SpikeTrace trace = simulate(snn, x, cfg).trace;
    for (size_t l = 0; l < trace.counts.size(); ++l)
        for (size_t n = 0; n < trace.counts[l].size(); ++n) {
            CHECK(trace.rate((int)l, (int)n) >= 0.0);
            CHECK(trace.rate((int)l, (int)n) <= 1.0);
        }
}

TEST_CASE("converted net: spike rates track float activations (rate coding)") {
    DnnModel m = testgen::random_conv3_net(50);
    auto calib = testgen::random_inputs(m.input_shape, 12, 19);
    ConversionConfig cfg;
    cfg.percentile = 100.0f;
    auto [snn, report] = convert(m, calib, cfg);

    ParsedModel normalized = normalize(parse(m), estimate_scales(parse(m), calib, 100.0f));
    Tensor x = testgen::random_input(m.input_shape, 3);
    InferResult ref = infer(normalized.model, x, true);

    SimulationConfig sim;
    sim.duration = 512;
    sim.warmup_steps = (int)snn.layers.size();
    SpikeTrace trace = simulate(snn, x, sim).trace;

    for (size_t l = 0; l < snn.layers.size(); ++l) {
        const auto& acts = ref.trace.entries[l].values.data;
        std::vector<std::pair<float, float>> pairs;
        for (size_t n = 0; n < acts.size(); ++n)
            pairs.emplace_back(acts[n],
                               (float)(trace.rate((int)l + 1, (int)n) * snn.layers[l].rate_factor));
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        for (auto& [a, e] : pairs) {
            sx += a; sy += e; sxx += (double)a * a; syy += (double)e * e; sxy += (double)a * e;
        }
        double n = (double)pairs.size();
        double r = (sxy - sx * sy / n) /
                   std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
        CHECK(r >= 0.98);
    }
}

TEST_CASE("batch accuracy on one labeled sample is 0 or 1, and spikes grow with T") {
    DnnModel m = testgen::random_conv3_net(60);
    auto calib = testgen::random_inputs(m.input_shape, 8, 29);
    auto [snn, report] = convert(m, calib, ConversionConfig{});
    std::vector<Tensor> xs{testgen::random_input(m.input_shape, 5)};
    std::vector<int> labels{1};

    SimulationConfig short_cfg;
    short_cfg.duration = 64;
    SimulationConfig long_cfg;
    long_cfg.duration = 128;
    BatchResult a = batch_simulate(snn, xs, labels, short_cfg);
    BatchResult b = batch_simulate(snn, xs, labels, long_cfg);
    CHECK((a.accuracy == 0.0 || a.accuracy == 1.0));
    CHECK(b.total_output_spikes >= a.total_output_spikes);
}

TEST_CASE("duration validation") {
    SnnModel snn = single_path(1);
    Tensor x(Shape({1}));
    x.data = {1.0f};
    SimulationConfig cfg;
    cfg.duration = 0;
    CHECK_THROWS_AS(simulate(snn, x, cfg), InputError);
}

}  // TEST_SUITE
