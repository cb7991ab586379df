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
#include <cmath>

#include "doctest.h"
#include "snnforge/common.hpp"
#include "snnforge/converter.hpp"
#include "snnforge/inference.hpp"
#include "snnforge/model_zoo.hpp"
#include "snnforge/simulator.hpp"
#include "snnforge/snn_io.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace snnforge;

namespace {

// single dense layer taking a 3-pixel input; used to pin activations exactly
ParsedModel tiny_dense(const std::vector<float>& weights, const std::vector<float>& biases) {
    DnnModel m;
    m.input_shape = Shape({(int)(weights.size() / biases.size())});
    LayerSpec L;
    L.kind = LayerKind::Dense;
    L.features = (int)biases.size();
    L.activation = Activation::ReLU;
    L.weights = weights;
    L.biases = biases;
    m.layers.push_back(L);
    infer_shapes(m);
    return ParsedModel{m};
}

}  // namespace

TEST_SUITE("converter") {

TEST_CASE("percentile 100 of {0, 0.5, 1} positives is the max") {
    // identity layer exposing the three activations directly
    ParsedModel p = tiny_dense({1, 0, 0, 0, 1, 0, 0, 0, 1}, {0, 0, 0});
    Tensor x(Shape({3}));
    x.data = {0.0f, 0.5f, 1.0f};
    ScaleSet s = estimate_scales(p, {x}, 100.0f);
    CHECK(s.lambda[0] == doctest::Approx(1.0f));
    CHECK(s.fallback[0] == 0);
}

TEST_CASE("percentile matches an independent sort-based oracle") {
    SeededNormal rng(17);
    std::vector<float> acts(1000);
    for (auto& a : acts) a = rng.uniform(0.001f, 3.0f);
    for (float p : {50.0f, 90.0f, 99.0f, 99.9f, 100.0f}) {
        std::vector<float> copy = acts;
        CHECK(percentile_value(copy, p) == doctest::Approx(oracle::percentile_sorted(acts, p)));
    }
}

TEST_CASE("an all-zero layer falls back to scale 1 with a warning flag") {
    ParsedModel p = tiny_dense({0, 0, 0}, {0, 0, 0});
    Tensor x(Shape({1}));
    x.data = {1.0f};
    ScaleSet s = estimate_scales(p, {x}, 99.9f);
    CHECK(s.lambda[0] == 1.0f);
    CHECK(s.fallback[0] == 1);
}

TEST_CASE("identity scales leave the model unchanged") {
    DnnModel m = make_cnet(Shape({12, 12, 1}), 4, 2);
    ParsedModel p = parse(m);
    ScaleSet s;
    s.lambda.assign(p.model.layers.size(), 1.0f);
    s.fallback.assign(p.model.layers.size(), 0);
    s.inherited.assign(p.model.layers.size(), 0);
    ParsedModel n = normalize(p, s);
    for (size_t i = 0; i < p.model.layers.size(); ++i) {
        CHECK(n.model.layers[i].weights == p.model.layers[i].weights);
        CHECK(n.model.layers[i].biases == p.model.layers[i].biases);
    }
}

TEST_CASE("hand-propagated scales: lambda {2, 4}") {
    // two 1x1 dense layers, weights 1, biases {1, 1}
    DnnModel m;
    m.input_shape = Shape({1});
    for (int i = 0; i < 2; ++i) {
        LayerSpec L;
        L.kind = LayerKind::Dense;
        L.features = 1;
        L.activation = Activation::ReLU;
        L.weights = {1.0f};
        L.biases = {1.0f};
        m.layers.push_back(L);
    }
    infer_shapes(m);
    ParsedModel p{m};
    ScaleSet s;
    s.lambda = {2.0f, 4.0f};
    s.fallback = {0, 0};
    s.inherited = {0, 0};
    ParsedModel n = normalize(p, s);
    CHECK(n.model.layers[0].weights[0] == doctest::Approx(0.5f));   // 1 * 1/2
    CHECK(n.model.layers[1].weights[0] == doctest::Approx(0.5f));   // 1 * 2/4
    CHECK(n.model.layers[0].biases[0] == doctest::Approx(0.5f));    // 1/2
    CHECK(n.model.layers[1].biases[0] == doctest::Approx(0.25f));   // 1/4

    Tensor x(Shape({1}));
    x.data = {1.0f};
    float orig = infer(m, x, false).class_scores[0];
    float norm = infer(n.model, x, false).class_scores[0];
    CHECK(norm == doctest::Approx(orig / 4.0f));
}

TEST_CASE("normalization preserves the calibration argmax") {
    DnnModel m = make_cnet(Shape({12, 12, 1}), 6, 13);
    ParsedModel p = parse(m);
    auto calib = testgen::random_inputs(m.input_shape, 12, 99);
    ScaleSet s = estimate_scales(p, calib, 99.9f);
    ParsedModel n = normalize(p, s);
    for (const Tensor& x : calib)
        CHECK(argmax(infer(p.model, x, false).class_scores) ==
              argmax(infer(n.model, x, false).class_scores));
}

TEST_CASE("normalized activations stay at or below 1 at the percentile") {
    DnnModel m = make_cnet(Shape({12, 12, 1}), 6, 29);
    ParsedModel p = parse(m);
    auto calib = testgen::random_inputs(m.input_shape, 8, 123);
    ScaleSet s = estimate_scales(p, calib, 100.0f);
    ParsedModel n = normalize(p, s);
    for (const Tensor& x : calib) {
        InferResult r = infer(n.model, x, true);
        for (const auto& e : r.trace.entries) {
            if (!is_weighted(n.model.layers[(size_t)e.layer_index].kind)) continue;
            for (float v : e.values.data) CHECK(v <= 1.0f + 1e-4f);
        }
    }
}

TEST_CASE("quantization pins the reference code points") {
    ParsedModel p = tiny_dense({1.0f, -1.0f, 0.5f}, {0.0f});
    ConversionConfig cfg;
    auto [snn, report] = quantize(p, cfg);
    REQUIRE(snn.layers.size() == 1);
    CHECK(snn.layers[0].weight_scale == doctest::Approx(255.0));
    CHECK(snn.layers[0].weights[0] == 255);
    CHECK(snn.layers[0].weights[1] == -255);
    CHECK(snn.layers[0].weights[2] == 128);  // round(127.5) away from zero
    CHECK(snn.layers[0].threshold == 510);   // round(2 * 255)
    CHECK(report.layers[0].clipped_weights == 0);
}

TEST_CASE("an all-zero-weight layer is degenerate unless bias-only mode is set") {
    ParsedModel p = tiny_dense({0.0f, 0.0f, 0.0f}, {0.4f});
    ConversionConfig cfg;
    CHECK_THROWS_WITH_AS(quantize(p, cfg), doctest::Contains("degenerate layer"), InputError);
    cfg.allow_bias_only_layers = true;
    auto [snn, report] = quantize(p, cfg);
    CHECK(snn.layers[0].biases[0] == 4095);  // bias mapped to the top of its range
}

TEST_CASE("quantization round-trip bound |w_q/s - w| <= 0.5/s for non-clipped weights") {
    for (uint32_t seed : {3u, 14u, 15u}) {
        DnnModel m = testgen::random_conv3_net(seed);
        auto calib = testgen::random_inputs(m.input_shape, 8, seed * 3 + 1);
        ConversionConfig cfg;
        cfg.percentile = 100.0f;
        auto [snn, report] = convert(m, calib, cfg);
        ParsedModel normalized = normalize(parse(m), estimate_scales(parse(m), calib, 100.0f));
        for (size_t l = 0; l < snn.layers.size(); ++l) {
            CHECK(report.layers[l].clipped_weights == 0);  // max|w| defines s
            const double s = snn.layers[l].weight_scale;
            const auto& wq = snn.layers[l].weights;
            const auto& wf = normalized.model.layers[(size_t)report.layers[l].layer_index].weights;
            REQUIRE(wq.size() == wf.size());
            for (size_t k = 0; k < wq.size(); ++k)
                CHECK(std::fabs(wq[k] / s - wf[k]) <= 0.5 / s * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("threshold relation and dthir proportionality") {
    DnnModel m = testgen::random_conv3_net(21);
    auto calib = testgen::random_inputs(m.input_shape, 8, 64);
    ConversionConfig c2;
    c2.dthir = 2;
    ConversionConfig c32;
    c32.dthir = 32;
    auto [snn2, r2] = convert(m, calib, c2);
    auto [snn32, r32] = convert(m, calib, c32);
    for (size_t l = 0; l < snn2.layers.size(); ++l) {
        const double s = snn2.layers[l].weight_scale;
        CHECK(snn2.layers[l].threshold == (int32_t)std::llround(2.0 * s));
        CHECK(snn32.layers[l].threshold == (int32_t)std::llround(32.0 * s));
        CHECK(snn32.layers[l].threshold > snn2.layers[l].threshold);  // strict growth
        // proportional up to the independent roundings of round(2s) and round(32s)
        CHECK(std::llabs(snn32.layers[l].threshold - 16ll * snn2.layers[l].threshold) <= 16);
    }
}

TEST_CASE("raising dthir never increases any neuron's spike count") {
    DnnModel m = testgen::random_conv3_net(33);
    auto calib = testgen::random_inputs(m.input_shape, 8, 5);
    Tensor x = testgen::random_input(m.input_shape, 321);
    SimulationConfig sim;
    sim.duration = 128;

    std::vector<std::vector<int32_t>> prev_counts;
    for (int dthir : {2, 8, 32}) {
        ConversionConfig cfg;
        cfg.dthir = dthir;
        cfg.percentile = 100.0f;
        auto [snn, report] = convert(m, calib, cfg);
        SpikeTrace trace = simulate(snn, x, sim).trace;
        if (!prev_counts.empty()) {
            for (size_t l = 0; l < trace.counts.size(); ++l)
                for (size_t n = 0; n < trace.counts[l].size(); ++n)
                    CHECK(trace.counts[l][n] <= prev_counts[l][n]);
        }
        prev_counts = trace.counts;
    }
}

TEST_CASE("invalid dthir values are rejected") {
    ConversionConfig cfg;
    cfg.dthir = 3;
    CHECK_THROWS_WITH_AS(validate_conversion_config(cfg), doctest::Contains("power of two"),
                         InputError);
    cfg.dthir = 0;
    CHECK_THROWS_AS(validate_conversion_config(cfg), InputError);
}

TEST_CASE("snn model round-trips through the directory format") {
    testgen::TempDir tmp("snn-roundtrip");
    DnnModel m = testgen::random_conv3_net(8);
    auto calib = testgen::random_inputs(m.input_shape, 6, 2);
    auto [snn, report] = convert(m, calib, ConversionConfig{});
    save_snn(snn, tmp.path() / "snn");
    SnnModel back = load_snn(tmp.path() / "snn");
    REQUIRE(back.layers.size() == snn.layers.size());
    CHECK(back.input_threshold == snn.input_threshold);
    CHECK(back.reset_mode == snn.reset_mode);
    CHECK(back.dthir == snn.dthir);
    for (size_t l = 0; l < snn.layers.size(); ++l) {
        CHECK(back.layers[l].weights == snn.layers[l].weights);
        CHECK(back.layers[l].biases == snn.layers[l].biases);
        CHECK(back.layers[l].threshold == snn.layers[l].threshold);
        CHECK(back.layers[l].weight_scale == snn.layers[l].weight_scale);
        CHECK(back.layers[l].rate_factor == snn.layers[l].rate_factor);
    }

    testgen::TempDir tmp2("report-roundtrip");
    save_report(report, tmp2.path() / "r.json");
    NormalizationReport back_r = load_report(tmp2.path() / "r.json");
    REQUIRE(back_r.layers.size() == report.layers.size());
    for (size_t l = 0; l < report.layers.size(); ++l) {
        CHECK(back_r.layers[l].lambda == report.layers[l].lambda);
        CHECK(back_r.layers[l].weight_scale == report.layers[l].weight_scale);
        CHECK(back_r.layers[l].threshold == report.layers[l].threshold);
    }
}

}  // TEST_SUITE
