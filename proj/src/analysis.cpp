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
#include "snnforge/analysis.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "snnforge/common.hpp"
#include "snnforge/partitioner.hpp"

namespace snnforge {

using nlohmann::json;

double pearson(std::span<const std::pair<float, float>> pairs, bool* defined) {
    const size_t n = pairs.size();
    if (defined) *defined = false;
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();

    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (const auto& [x, y] : pairs) {
        sx += x;
        sy += y;
        sxx += static_cast<double>(x) * x;
        syy += static_cast<double>(y) * y;
        sxy += static_cast<double>(x) * y;
    }
    const double nd = static_cast<double>(n);
    const double vx = sxx - sx * sx / nd;
    const double vy = syy - sy * sy / nd;
    if (vx <= 0.0 || vy <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    if (defined) *defined = true;
    return (sxy - sx * sy / nd) / std::sqrt(vx * vy);
}

CorrelationReport correlate(std::span<const ActivationTrace> traces,
                            std::span<const SpikeTrace> spikes, const SnnModel& snn,
                            const CorrelationThresholds& thresholds) {
    if (traces.size() != spikes.size() || traces.empty())
        throw InputError("correlate needs matching, non-empty trace sets");
    const size_t n_layers = snn.layers.size();
    for (const ActivationTrace& t : traces)
        if (t.entries.size() != n_layers)
            throw InputError("activation trace does not align with the spiking layers");

    CorrelationReport report;
    report.layers.resize(n_layers);
    for (size_t l = 0; l < n_layers; ++l) {
        LayerCorrelation& lc = report.layers[l];
        lc.layer = static_cast<int>(l);
        lc.kind = to_string(snn.layers[l].kind);
        const double rescale = snn.layers[l].rate_factor;  // cumulative theta/s
        int64_t saturated = 0, total = 0;

        for (size_t s = 0; s < traces.size(); ++s) {
            const Tensor& acts = traces[s].entries[l].values;
            const auto& counts = spikes[s].counts[l + 1];  // counts[0] is the input layer
            if (acts.data.size() != counts.size())
                throw InputError("layer " + std::to_string(l) + ": trace sizes disagree");
            const double T = spikes[s].duration;
            for (size_t i = 0; i < counts.size(); ++i) {
                const double rate = counts[i] / T;
                lc.pairs.emplace_back(acts.data[i], static_cast<float>(rate * rescale));
                if (counts[i] == spikes[s].duration) ++saturated;
                ++total;
            }
        }

        lc.pearson_r = pearson(lc.pairs, &lc.r_defined);
        for (const auto& [a, est] : lc.pairs)
            lc.max_deviation = std::max(lc.max_deviation, std::fabs(static_cast<double>(est) - a));
        lc.saturation_fraction = total ? static_cast<double>(saturated) / static_cast<double>(total) : 0.0;
        if (!lc.r_defined)
            lc.verdict = "undefined";
        else if (lc.pearson_r >= thresholds.good)
            lc.verdict = "good";
        else if (lc.pearson_r >= thresholds.degraded)
            lc.verdict = "degraded";
        else
            lc.verdict = "uncorrelated";
    }
    return report;
}

CorrelationReport correlate(const ActivationTrace& trace, const SpikeTrace& spikes,
                            const SnnModel& snn, const CorrelationThresholds& thresholds) {
    return correlate(std::span(&trace, 1), std::span(&spikes, 1), snn, thresholds);
}

double agreement(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw InputError("agreement needs equally sized prediction sets");
    if (a.empty()) return 1.0;
    int64_t equal = 0;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] == b[i]) ++equal;
    return static_cast<double>(equal) / static_cast<double>(a.size());
}

std::vector<SweepRow> sweep(const DnnModel& model, const std::vector<Tensor>& calibration,
                            const std::vector<Tensor>& inputs, const std::vector<int>& labels,
                            const SweepGrid& grid, const ConversionConfig& base_config,
                            const SimulationConfig& base_sim) {
    std::vector<SweepRow> rows;
    if (grid.resets.empty() || grid.dthirs.empty() || grid.durations.empty()) return rows;

    // reference DNN predictions, computed once
    std::vector<int> dnn_preds;
    dnn_preds.reserve(inputs.size());
    for (const Tensor& x : inputs) dnn_preds.push_back(argmax(infer(model, x, false).class_scores));

    for (ResetMode reset : grid.resets) {
        for (int dthir : grid.dthirs) {
            ConversionConfig cfg = base_config;
            cfg.reset_mode = reset;
            cfg.dthir = dthir;
            auto [snn, report] = convert(model, calibration, cfg);
            const int cores = partition(snn).total_cores;
            for (int duration : grid.durations) {
                SimulationConfig sim = base_sim;
                sim.duration = duration;
                BatchResult batch = batch_simulate(snn, inputs, labels, sim);
                SweepRow row;
                row.reset = reset;
                row.dthir = dthir;
                row.duration = duration;
                row.agreement = agreement(dnn_preds, batch.predictions);
                row.accuracy = batch.accuracy;
                row.cores = cores;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << "reset_mode,dthir,duration,agreement,accuracy,cores\n";
    for (const SweepRow& r : rows) {
        out << to_string(r.reset) << ',' << r.dthir << ',' << r.duration << ',' << r.agreement << ',';
        if (std::isnan(r.accuracy))
            out << "";
        else
            out << r.accuracy;
        out << ',' << r.cores << '\n';
    }
}

void save_correlation_report(const CorrelationReport& report, const std::filesystem::path& json_path) {
    json j;
    j["layers"] = json::array();
    for (const LayerCorrelation& lc : report.layers) {
        json lj;
        lj["layer"] = lc.layer;
        lj["kind"] = lc.kind;
        lj["pairs"] = lc.pairs.size();
        if (lc.r_defined)
            lj["pearson_r"] = lc.pearson_r;
        else
            lj["pearson_r"] = nullptr;
        lj["max_deviation"] = lc.max_deviation;
        lj["saturation_fraction"] = lc.saturation_fraction;
        lj["verdict"] = lc.verdict;
        j["layers"].push_back(std::move(lj));
    }
    std::ofstream out(json_path, std::ios::trunc);
    if (!out) throw InputError("cannot write '" + json_path.string() + "'");
    out << j.dump(2) << '\n';
}

CorrelationReport load_correlation_report(const std::filesystem::path& json_path) {
    std::ifstream in(json_path);
    if (!in) throw InputError("cannot open '" + json_path.string() + "'");
    json j;
    in >> j;
    CorrelationReport report;
    for (const auto& lj : j.at("layers")) {
        LayerCorrelation lc;
        lc.layer = lj.at("layer").get<int>();
        lc.kind = lj.at("kind").get<std::string>();
        lc.r_defined = !lj.at("pearson_r").is_null();
        lc.pearson_r = lc.r_defined ? lj.at("pearson_r").get<double>()
                                    : std::numeric_limits<double>::quiet_NaN();
        lc.max_deviation = lj.at("max_deviation").get<double>();
        lc.saturation_fraction = lj.at("saturation_fraction").get<double>();
        lc.verdict = lj.at("verdict").get<std::string>();
        report.layers.push_back(std::move(lc));
    }
    return report;
}

void write_scatter_csv(const LayerCorrelation& layer, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << "activation,estimate\n";
    for (const auto& [a, e] : layer.pairs) out << a << ',' << e << '\n';
}

}  // namespace snnforge
