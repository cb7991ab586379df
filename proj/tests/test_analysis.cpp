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
#include <fstream>
#include <random>

#include "doctest.h"
#include "snnforge/analysis.hpp"
#include "snnforge/common.hpp"
#include "snnforge/model_zoo.hpp"
#include "support/generators.hpp"

using namespace snnforge;

TEST_SUITE("analysis") {

TEST_CASE("pearson r is 1 for proportional data and scale-invariant") {
    std::vector<std::pair<float, float>> pairs;
    SeededNormal rng(4);
    for (int i = 0; i < 500; ++i) {
        float a = rng.uniform(0.0f, 2.0f);
        pairs.emplace_back(a, 0.5f * a);
    }
    bool defined = false;
    CHECK(pearson(pairs, &defined) == doctest::Approx(1.0));
    CHECK(defined);

    // rescaling one axis by any positive factor leaves r unchanged
    std::vector<std::pair<float, float>> scaled = pairs;
    for (auto& [a, e] : scaled) a *= 37.5f;
    CHECK(pearson(scaled) == doctest::Approx(pearson(pairs)).epsilon(1e-9));
}

TEST_CASE("shuffled pairs are uncorrelated") {
    SeededNormal rng(9);
    std::vector<float> xs(1000), ys(1000);
    for (int i = 0; i < 1000; ++i) {
        xs[(size_t)i] = rng.uniform(0.0f, 1.0f);
        ys[(size_t)i] = xs[(size_t)i];
    }
    std::mt19937 shuffler(123);
    std::shuffle(ys.begin(), ys.end(), shuffler);
    std::vector<std::pair<float, float>> pairs;
    for (int i = 0; i < 1000; ++i) pairs.emplace_back(xs[(size_t)i], ys[(size_t)i]);
    CHECK(std::fabs(pearson(pairs)) < 0.2);
}

TEST_CASE("zero variance means r is undefined") {
    std::vector<std::pair<float, float>> pairs(10, {0.0f, 0.0f});
    bool defined = true;
    double r = pearson(pairs, &defined);
    CHECK(!defined);
    CHECK(std::isnan(r));
}

TEST_CASE("correlate labels layers by verdict") {
    DnnModel m = testgen::random_conv3_net(70);
    auto calib = testgen::random_inputs(m.input_shape, 12, 3);
    ConversionConfig cfg;
    cfg.percentile = 100.0f;
    auto [snn, rep] = convert(m, calib, cfg);

    ParsedModel normalized = normalize(parse(m), estimate_scales(parse(m), calib, 100.0f));
    std::vector<ActivationTrace> traces;
    std::vector<SpikeTrace> spikes;
    SimulationConfig sim;
    sim.duration = 512;
    sim.warmup_steps = (int)snn.layers.size();
    for (uint32_t s = 0; s < 2; ++s) {
        Tensor x = testgen::random_input(m.input_shape, 800 + s);
        traces.push_back(infer(normalized.model, x, true).trace);
        spikes.push_back(simulate(snn, x, sim).trace);
    }
    CorrelationReport report = correlate(traces, spikes, snn);
    REQUIRE(report.layers.size() == snn.layers.size());
    for (const auto& lc : report.layers) {
        CHECK(lc.r_defined);
        CHECK(lc.pearson_r >= 0.98);
        CHECK(lc.verdict == "good");
        CHECK(lc.saturation_fraction <= 1.0);
    }
}

TEST_CASE("zero activations and zero rates give the undefined verdict") {
    SnnModel snn;
    snn.input_shape = Shape({2});
    SnnLayer L;
    L.kind = LayerKind::Dense;
    L.in_shape = Shape({2});
    L.out_shape = Shape({2});
    L.threshold = 100;
    L.weights = {100, 0, 0, 100};
    L.biases = {0, 0};
    snn.layers.push_back(L);

    ActivationTrace trace;
    ActivationEntry e;
    e.layer_index = 0;
    e.values = Tensor(Shape({2}));
    trace.entries.push_back(e);

    SpikeTrace spikes;
    spikes.duration = 16;
    spikes.counts = {{0, 0}, {0, 0}};

    CorrelationReport report = correlate(trace, spikes, snn);
    CHECK(!report.layers[0].r_defined);
    CHECK(report.layers[0].verdict == "undefined");
}

TEST_CASE("correlation report round-trips through JSON") {
    testgen::TempDir tmp("corr");
    CorrelationReport report;
    LayerCorrelation lc;
    lc.layer = 0;
    lc.kind = "Conv2D";
    lc.pearson_r = 0.9987654321;
    lc.r_defined = true;
    lc.max_deviation = 0.0123;
    lc.saturation_fraction = 0.5;
    lc.verdict = "good";
    report.layers.push_back(lc);
    save_correlation_report(report, tmp.path() / "r.json");
    CorrelationReport back = load_correlation_report(tmp.path() / "r.json");
    REQUIRE(back.layers.size() == 1);
    CHECK(back.layers[0].pearson_r == report.layers[0].pearson_r);
    CHECK(back.layers[0].max_deviation == report.layers[0].max_deviation);
    CHECK(back.layers[0].saturation_fraction == report.layers[0].saturation_fraction);
    CHECK(back.layers[0].verdict == report.layers[0].verdict);
}

TEST_CASE("agreement basics") {
    CHECK(agreement({1, 2, 3}, {1, 2, 3}) == 1.0);
    CHECK(agreement({1, 2, 3}, {4, 5, 6}) == 0.0);
    CHECK(agreement({1, 2, 3, 4}, {1, 2, 0, 0}) == 0.5);
    CHECK_THROWS_AS(agreement({1}, {1, 2}), InputError);
}

TEST_CASE("sweep: duration rows are monotone on a fixed net; empty grid is empty") {
    DnnModel m = testgen::random_conv3_net(71);
    auto calib = testgen::random_inputs(m.input_shape, 10, 5);
    auto inputs = testgen::random_inputs(m.input_shape, 6, 55);

    SweepGrid grid;
    grid.resets = {ResetMode::Soft};
    grid.dthirs = {2};
    grid.durations = {64, 256};
    ConversionConfig base;
    base.percentile = 100.0f;
    auto rows = sweep(m, calib, inputs, {}, grid, base, SimulationConfig{});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].duration == 64);
    CHECK(rows[1].duration == 256);
    CHECK(rows[1].agreement >= rows[0].agreement);
    CHECK(rows[0].cores == rows[1].cores);
    CHECK(std::isnan(rows[0].accuracy));  // unlabeled

    CHECK(sweep(m, calib, inputs, {}, SweepGrid{}, base, SimulationConfig{}).empty());
}

TEST_CASE("sweep population: soft reset agrees at least as well as hard") {
    // small population; the acceptance suite runs the full-size version
    double soft_sum = 0.0, hard_sum = 0.0;
    int nets = 0;
    for (uint32_t seed = 200; seed < 212; ++seed) {
        DnnModel m = testgen::random_conv3_net(seed);
        auto calib = testgen::random_inputs(m.input_shape, 10, seed);
        auto inputs = testgen::random_inputs(m.input_shape, 4, seed + 1);
        SweepGrid grid;
        grid.resets = {ResetMode::Soft, ResetMode::Hard};
        grid.dthirs = {2};
        grid.durations = {192};
        ConversionConfig base;
        base.percentile = 100.0f;
        auto rows = sweep(m, calib, inputs, {}, grid, base, SimulationConfig{});
        REQUIRE(rows.size() == 2);
        soft_sum += rows[0].agreement;
        hard_sum += rows[1].agreement;
        ++nets;
    }
    CHECK(soft_sum / nets >= hard_sum / nets);
}

TEST_CASE("sweep csv has one row per grid cell") {
    testgen::TempDir tmp("sweep");
    std::vector<SweepRow> rows(3);
    rows[0] = {ResetMode::Soft, 2, 64, 0.5, 0.25, 7};
    rows[1] = {ResetMode::Soft, 2, 128, 0.75, std::numeric_limits<double>::quiet_NaN(), 7};
    rows[2] = {ResetMode::Hard, 8, 64, 0.25, 0.125, 5};
    write_sweep_csv(rows, tmp.path() / "sweep.csv");
    std::ifstream in(tmp.path() / "sweep.csv");
    std::string line;
    int count = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++count;
    CHECK(count == 4);  // header + 3 rows
}

}  // TEST_SUITE
