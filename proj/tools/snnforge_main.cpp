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

// Command-line front end. Exit codes: 0 ok, 1 internal error, 2 input
// error, 3 constraint violation. Logs go to stderr; data goes to files
// (plus the partition table on stdout).

#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "snnforge/analysis.hpp"
#include "snnforge/common.hpp"
#include "snnforge/converter.hpp"
#include "snnforge/dvs.hpp"
#include "snnforge/inference.hpp"
#include "snnforge/model_io.hpp"
#include "snnforge/model_zoo.hpp"
#include "snnforge/partitioner.hpp"
#include "snnforge/run_manifest.hpp"
#include "snnforge/simulator.hpp"
#include "snnforge/snn_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace snnforge;

namespace {

void log_warn(const std::string& msg) { std::cerr << "[snnforge] warning: " << msg << '\n'; }
void log_info(const std::string& msg) { std::cerr << "[snnforge] " << msg << '\n'; }

// Loads --config JSON; a run manifest is accepted too (its "config" object is used).
json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("bad config '" + path + "': " + e.what());
    }
    if (j.contains("config") && j.contains("subcommand")) return j.at("config");
    return j;
}

// Flag > config file > default; a losing config value is noted on stderr.
template <typename T>
void resolve(const CLI::Option* opt, const json& cfg, const char* key, T& value) {
    if (!cfg.contains(key)) return;
    T file_value = cfg.at(key).get<T>();
    if (opt != nullptr && opt->count() > 0) {
        if (file_value != value)
            log_info(std::string("flag --") + key + " overrides config file value");
        return;
    }
    value = file_value;
}

std::vector<Tensor> random_calibration(const Shape& shape, int count, uint32_t seed) {
    SeededNormal rng(seed);
    std::vector<Tensor> out;
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        Tensor t(shape);
        for (float& v : t.data) v = rng.uniform(0.0f, 1.0f);
        out.push_back(std::move(t));
    }
    return out;
}

int parse_dthir(int dthir) {
    if (!is_power_of_two(dthir)) throw InputError("dthir must be a power of two");
    return dthir;
}

struct RecordingEntry {
    fs::path file;
    int label = -1;
    std::string split;  // "", "train" or "test"
};

// recordings.csv rows: file,label[,split]
std::vector<RecordingEntry> read_recordings_index(const fs::path& dir) {
    const fs::path index = dir / "recordings.csv";
    std::ifstream in(index);
    if (!in) throw InputError("cannot open '" + index.string() + "'");
    std::vector<RecordingEntry> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && line.rfind("file", 0) == 0) continue;
        RecordingEntry e;
        std::stringstream ss(line);
        std::string field;
        if (!std::getline(ss, field, ',')) continue;
        e.file = dir / field;
        if (!std::getline(ss, field, ','))
            throw InputError(index.string() + ":" + std::to_string(line_no) + ": missing label");
        e.label = std::stoi(field);
        if (std::getline(ss, field, ',')) e.split = field;
        if (!e.split.empty() && e.split != "train" && e.split != "test")
            throw InputError(index.string() + ":" + std::to_string(line_no) + ": split must be train or test");
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw InputError("'" + index.string() + "' lists no recordings");
    return entries;
}

json accumulation_to_json(const AccumulationConfig& c) {
    return json{{"mode", to_string(c.mode)},
                {"window_ms", c.window_ms},
                {"window_events", c.window_events},
                {"channels", c.channels},
                {"overlap", c.overlap_factor},
                {"polarity", to_string(c.polarity)},
                {"size", c.frame_size}};
}

// ---------------------------------------------------------------- preprocess

int cmd_preprocess(const std::string& events_dir, const std::string& out_dir,
                   const AccumulationConfig& config, int test_every, const json& resolved) {
    if (!fs::is_directory(events_dir)) throw InputError("events directory '" + events_dir + "' not found");
    validate_accumulation_config(config);
    fs::create_directories(out_dir);

    std::vector<RecordingEntry> entries = read_recordings_index(events_dir);
    std::vector<EventStream> recordings;
    std::vector<uint8_t> test_mask;
    std::vector<fs::path> inputs{fs::path(events_dir) / "recordings.csv"};
    int64_t rejected = 0;
    std::map<int, int> per_class_count;
    for (const RecordingEntry& e : entries) {
        ReadReport rr;
        EventStream stream = e.file.extension() == ".bin" ? read_events_bin(e.file, &rr)
                                                          : read_events_csv(e.file, &rr);
        stream.label = e.label;
        if (rr.was_unsorted) log_warn("'" + e.file.string() + "' had unsorted timestamps; sorted");
        rejected += rr.rejected;
        bool to_test = e.split.empty() ? (per_class_count[e.label]++ % test_every == test_every - 1)
                                       : e.split == "test";
        recordings.push_back(std::move(stream));
        test_mask.push_back(to_test ? 1 : 0);
        inputs.push_back(e.file);
    }
    if (rejected > 0) log_warn(std::to_string(rejected) + " events rejected (out of range)");

    DatasetPair pair = build_dataset(recordings, test_mask, config);
    for (const std::string& w : pair.warnings) log_warn(w);

    save_frames(pair.train, fs::path(out_dir) / "train.dvsf");
    save_frames(pair.test, fs::path(out_dir) / "test.dvsf");

    json manifest;
    manifest["config"] = accumulation_to_json(config);
    manifest["frame_shape"] = pair.train.frame_shape.dims();
    manifest["train_frames"] = pair.train.frames.size();
    manifest["test_frames"] = pair.test.frames.size();
    manifest["recordings"] = entries.size();
    manifest["rejected_events"] = rejected;
    std::ofstream mf(fs::path(out_dir) / "dataset_manifest.json", std::ios::trunc);
    mf << manifest.dump(2) << '\n';

    write_run_manifest(out_dir, "preprocess", resolved, inputs);
    log_info("wrote " + std::to_string(pair.train.frames.size()) + " train and " +
             std::to_string(pair.test.frames.size()) + " test frames to " + out_dir);
    return 0;
}

// ------------------------------------------------------------------- convert

int cmd_convert(const std::string& model_path, const std::string& out_dir,
                const ConversionConfig& config, const std::string& calibration_path,
                int calibration_random, uint32_t seed, const json& resolved) {
    DnnModel model = load_model(model_path);
    std::vector<fs::path> inputs{model_path};

    std::vector<Tensor> calibration;
    if (!calibration_path.empty()) {
        FrameDataset frames = load_frames(calibration_path);
        calibration = std::move(frames.frames);
        inputs.push_back(calibration_path);
    } else {
        calibration = random_calibration(model.input_shape, calibration_random, seed);
    }
    if (calibration.empty()) throw InputError("calibration set is empty");

    auto [snn, report] = convert(model, calibration, config);
    fs::create_directories(out_dir);
    save_snn(snn, out_dir);
    save_report(report, fs::path(out_dir) / "normalization_report.json");
    write_run_manifest(out_dir, "convert", resolved, inputs);
    log_info("converted " + model.name + ": " + std::to_string(snn.layers.size()) + " spiking layers, dthir " +
             std::to_string(config.dthir) + ", " + to_string(config.reset_mode) + " reset");
    return 0;
}

// ------------------------------------------------------------------ simulate

int cmd_simulate(const std::string& snn_dir, const std::string& frames_path,
                 const SimulationConfig& config, const std::string& out_dir, int limit,
                 const json& resolved) {
    SnnModel snn = load_snn(snn_dir);
    FrameDataset dataset = load_frames(frames_path);
    fs::create_directories(out_dir);

    if (dataset.frames.empty()) {
        log_warn("dataset has no frames; nothing to simulate");
        write_run_manifest(out_dir, "simulate", resolved,
                           {fs::path(snn_dir) / "manifest.json", frames_path});
        return 0;
    }
    if (limit > 0 && static_cast<size_t>(limit) < dataset.frames.size()) {
        dataset.frames.resize(static_cast<size_t>(limit));
        dataset.labels.resize(static_cast<size_t>(limit));
    }

    BatchResult batch = batch_simulate(snn, dataset.frames, dataset.labels, config);
    if (batch.overflow) log_warn("integer overflow saturated during simulation; check normalization");

    std::ofstream pred(fs::path(out_dir) / "predictions.csv", std::ios::trunc);
    pred << "index,label,predicted\n";
    for (size_t i = 0; i < batch.predictions.size(); ++i)
        pred << i << ',' << dataset.labels[i] << ',' << batch.predictions[i] << '\n';

    json acc;
    acc["samples"] = batch.predictions.size();
    acc["accuracy"] = batch.accuracy;
    acc["total_output_spikes"] = batch.total_output_spikes;
    acc["overflow"] = batch.overflow;
    acc["duration"] = config.duration;
    std::ofstream accf(fs::path(out_dir) / "accuracy.json", std::ios::trunc);
    accf << acc.dump(2) << '\n';

    // detailed trace for the first sample
    SimulationResult first = simulate(snn, dataset.frames[0], config);
    write_spike_counts_csv(first.trace, (fs::path(out_dir) / "spike_counts.csv").string());
    if (config.record_rasters)
        write_raster_csv(first.trace, (fs::path(out_dir) / "raster.csv").string());

    write_run_manifest(out_dir, "simulate", resolved,
                       {fs::path(snn_dir) / "manifest.json", frames_path});
    log_info("accuracy " + std::to_string(batch.accuracy) + " over " +
             std::to_string(batch.predictions.size()) + " samples");
    return 0;
}

// ----------------------------------------------------------------- partition

int cmd_partition(const std::string& snn_dir, const std::string& out_dir,
                  const CoreConstraints& constraints, const json& resolved) {
    SnnModel snn = load_snn(snn_dir);
    PartitionPlan plan = partition(snn, constraints);
    std::vector<Violation> violations = validate_partition(plan, snn, constraints);
    if (!violations.empty()) {
        for (const Violation& v : violations) log_warn("core " + std::to_string(v.core_id) + ": " + v.what);
        throw ConstraintError("partition failed self-validation");
    }
    fs::create_directories(out_dir);
    save_partition(plan, fs::path(out_dir) / "partition.json");
    write_run_manifest(out_dir, "partition", resolved, {fs::path(snn_dir) / "manifest.json"});
    std::cout << partition_table(plan, snn);
    return 0;
}

// ----------------------------------------------------------------- correlate

// Rebuilds the normalized parsed model from the stored per-layer scales.
ParsedModel normalized_from_snn(const DnnModel& model, const SnnModel& snn) {
    ParsedModel parsed = parse(model);
    ScaleSet scales;
    scales.lambda.assign(parsed.model.layers.size(), 1.0f);
    scales.fallback.assign(parsed.model.layers.size(), 0);
    scales.inherited.assign(parsed.model.layers.size(), 0);
    size_t snn_layer = 0;
    float prev = 1.0f;
    for (size_t i = 0; i < parsed.model.layers.size(); ++i) {
        if (is_structural(parsed.model.layers[i].kind)) {
            scales.lambda[i] = prev;
            continue;
        }
        if (snn_layer >= snn.layers.size())
            throw InputError("model does not match the converted network layout");
        scales.lambda[i] = snn.layers[snn_layer].lambda;
        prev = scales.lambda[i];
        ++snn_layer;
    }
    if (snn_layer != snn.layers.size())
        throw InputError("model does not match the converted network layout");
    return normalize(parsed, scales);
}

int cmd_correlate(const std::string& model_path, const std::string& snn_dir,
                  const std::string& frames_path, int samples, const SimulationConfig& config,
                  const std::string& out_dir, const json& resolved) {
    DnnModel model = load_model(model_path);
    SnnModel snn = load_snn(snn_dir);
    FrameDataset dataset = load_frames(frames_path);
    if (dataset.frames.empty()) throw InputError("dataset has no frames");
    samples = std::min<int>(samples, static_cast<int>(dataset.frames.size()));

    ParsedModel normalized = normalized_from_snn(model, snn);

    std::vector<ActivationTrace> traces;
    std::vector<SpikeTrace> spikes;
    for (int i = 0; i < samples; ++i) {
        traces.push_back(infer(normalized.model, dataset.frames[static_cast<size_t>(i)], true).trace);
        spikes.push_back(simulate(snn, dataset.frames[static_cast<size_t>(i)], config).trace);
    }
    CorrelationReport report = correlate(traces, spikes, snn);

    fs::create_directories(out_dir);
    save_correlation_report(report, fs::path(out_dir) / "correlation.json");
    for (const LayerCorrelation& lc : report.layers) {
        char name[48];
        std::snprintf(name, sizeof name, "scatter_layer%02d.csv", lc.layer);
        write_scatter_csv(lc, fs::path(out_dir) / name);
    }
    write_run_manifest(out_dir, "correlate", resolved,
                       {model_path, fs::path(snn_dir) / "manifest.json", frames_path});
    for (const LayerCorrelation& lc : report.layers)
        log_info("layer " + std::to_string(lc.layer) + " (" + lc.kind + "): r = " +
                 (lc.r_defined ? std::to_string(lc.pearson_r) : "undefined") + " [" + lc.verdict + "]");
    return 0;
}

// --------------------------------------------------------------------- sweep

int cmd_sweep(const std::string& model_path, const std::string& calibration_path,
              int calibration_random, uint32_t seed, const std::string& frames_path, int limit,
              const SweepGrid& grid, const ConversionConfig& base_config,
              const SimulationConfig& base_sim, const std::string& out_dir, const json& resolved) {
    DnnModel model = load_model(model_path);
    std::vector<fs::path> inputs{model_path};

    std::vector<Tensor> calibration;
    if (!calibration_path.empty()) {
        calibration = load_frames(calibration_path).frames;
        inputs.push_back(calibration_path);
    } else {
        calibration = random_calibration(model.input_shape, calibration_random, seed);
    }

    std::vector<Tensor> eval_inputs;
    std::vector<int> labels;
    if (!frames_path.empty()) {
        FrameDataset dataset = load_frames(frames_path);
        eval_inputs = std::move(dataset.frames);
        labels = std::move(dataset.labels);
        inputs.push_back(frames_path);
    } else {
        eval_inputs = random_calibration(model.input_shape, std::max(limit, 8), seed + 1);
    }
    if (limit > 0 && static_cast<size_t>(limit) < eval_inputs.size()) {
        eval_inputs.resize(static_cast<size_t>(limit));
        if (!labels.empty()) labels.resize(static_cast<size_t>(limit));
    }

    for (int d : grid.dthirs) parse_dthir(d);
    std::vector<SweepRow> rows = sweep(model, calibration, eval_inputs, labels, grid, base_config, base_sim);
    fs::create_directories(out_dir);
    write_sweep_csv(rows, fs::path(out_dir) / "sweep.csv");
    write_run_manifest(out_dir, "sweep", resolved, inputs);
    log_info("wrote " + std::to_string(rows.size()) + " sweep rows");
    return 0;
}

// --------------------------------------------------------------------- infer

int cmd_infer(const std::string& model_path, const std::string& frames_path,
              const std::string& out_dir, const json& resolved) {
    DnnModel model = load_model(model_path);
    FrameDataset dataset = load_frames(frames_path);
    fs::create_directories(out_dir);

    std::ofstream pred(fs::path(out_dir) / "predictions.csv", std::ios::trunc);
    pred << "index,label,predicted,score\n";
    int64_t correct = 0, labeled = 0;
    for (size_t i = 0; i < dataset.frames.size(); ++i) {
        InferResult r = infer(model, dataset.frames[i], false);
        int cls = argmax(r.class_scores);
        pred << i << ',' << dataset.labels[i] << ',' << cls << ','
             << r.class_scores[static_cast<size_t>(cls)] << '\n';
        if (dataset.labels[i] >= 0) {
            ++labeled;
            if (cls == dataset.labels[i]) ++correct;
        }
    }
    if (labeled > 0)
        log_info("accuracy " + std::to_string(static_cast<double>(correct) / static_cast<double>(labeled)) +
                 " over " + std::to_string(labeled) + " labeled samples");
    write_run_manifest(out_dir, "infer", resolved, {model_path, frames_path});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DNN-to-SNN conversion, simulation and DVS preprocessing toolchain"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    try {
        // ------------------------------------------------------- preprocess
        auto* pre = app.add_subcommand("preprocess", "Accumulate DVS event recordings into frame datasets");
        std::string pre_events, pre_out = "dataset", pre_cfg_path;
        std::string pre_mode = "time_based", pre_polarity = "discard";
        AccumulationConfig acc;
        int test_every = 4;
        pre->add_option("events_dir", pre_events, "directory with recordings.csv and event files")->required();
        pre->add_option("--config", pre_cfg_path, "JSON config file");
        pre->add_option("--out", pre_out, "output directory");
        auto* o_mode = pre->add_option("--mode", pre_mode, "time_based|quantitative");
        auto* o_win = pre->add_option("--window-ms", acc.window_ms, "time window per frame (ms)");
        auto* o_wev = pre->add_option("--window-events", acc.window_events, "events per frame (quantitative)");
        auto* o_ch = pre->add_option("--channels", acc.channels, "sub-window channels per frame");
        auto* o_ov = pre->add_option("--overlap", acc.overlap_factor, "overlap factor (1 or 2)");
        auto* o_pol = pre->add_option("--polarity", pre_polarity, "split|signed|discard");
        auto* o_sz = pre->add_option("--size", acc.frame_size, "output frame size (16/32/64)");
        auto* o_te = pre->add_option("--test-every", test_every, "every Nth recording per class goes to test");

        // ---------------------------------------------------------- convert
        auto* conv = app.add_subcommand("convert", "Convert a trained model into a spiking network");
        std::string conv_model, conv_out = "snn", conv_cfg_path, conv_calib;
        std::string conv_reset = "soft";
        ConversionConfig ccfg;
        int conv_rand = 100;
        uint32_t conv_seed = 7;
        conv->add_option("model", conv_model, "model manifest JSON")->required();
        conv->add_option("--config", conv_cfg_path, "JSON config file");
        conv->add_option("--out", conv_out, "output directory");
        auto* o_dthir = conv->add_option("--dthir", ccfg.dthir, "threshold-to-input ratio (power of two)");
        auto* o_reset = conv->add_option("--reset", conv_reset, "soft|hard");
        auto* o_pct = conv->add_option("--percentile", ccfg.percentile, "activation percentile");
        auto* o_ith = conv->add_option("--input-threshold", ccfg.input_threshold, "input layer threshold");
        conv->add_option("--calibration", conv_calib, "frame container for calibration");
        conv->add_option("--calibration-random", conv_rand, "random calibration sample count");
        conv->add_option("--seed", conv_seed, "seed for random calibration");

        // --------------------------------------------------------- simulate
        auto* sim = app.add_subcommand("simulate", "Run a spiking network on a frame dataset");
        std::string sim_snn, sim_frames, sim_out = "sim", sim_cfg_path, sim_reset;
        SimulationConfig scfg;
        int sim_limit = 0;
        sim->add_option("snn", sim_snn, "converted network directory")->required();
        sim->add_option("frames", sim_frames, "frame container (.dvsf)")->required();
        sim->add_option("--config", sim_cfg_path, "JSON config file");
        sim->add_option("--out", sim_out, "output directory");
        auto* o_steps = sim->add_option("--steps", scfg.duration, "experiment duration in time-steps");
        auto* o_warm = sim->add_option("--warmup", scfg.warmup_steps, "uncounted warm-up steps");
        sim->add_option("--reset", sim_reset, "override the model's reset mode");
        sim->add_flag("--record-rasters", scfg.record_rasters, "write a spike raster for the first sample");
        sim->add_option("--limit", sim_limit, "simulate at most N samples");

        // -------------------------------------------------------- partition
        auto* part = app.add_subcommand("partition", "Map a spiking network onto virtual neurocores");
        std::string part_snn, part_out = "partition", part_cfg_path;
        CoreConstraints constraints;
        part->add_option("snn", part_snn, "converted network directory")->required();
        part->add_option("--config", part_cfg_path, "JSON config file");
        part->add_option("--out", part_out, "output directory");
        auto* o_mc = part->add_option("--max-compartments", constraints.max_compartments);
        auto* o_fi = part->add_option("--max-fan-in", constraints.max_fan_in_axons);
        auto* o_fo = part->add_option("--max-fan-out", constraints.max_fan_out_axons);

        // -------------------------------------------------------- correlate
        auto* corr = app.add_subcommand("correlate", "Compare DNN activations against SNN spike rates");
        std::string corr_model, corr_snn, corr_frames, corr_out = "correlation";
        SimulationConfig corr_sim;
        int corr_samples = 1;
        bool corr_no_warmup = false;
        corr->add_option("--model", corr_model, "original model manifest")->required();
        corr->add_option("--snn", corr_snn, "converted network directory")->required();
        corr->add_option("--frames", corr_frames, "probe frames (.dvsf)")->required();
        corr->add_option("--samples", corr_samples, "probe sample count");
        corr->add_option("--steps", corr_sim.duration, "experiment duration in time-steps");
        corr->add_flag("--no-warmup", corr_no_warmup, "do not exclude the pipeline fill from rates");
        corr->add_option("--out", corr_out, "output directory");

        // ------------------------------------------------------------ sweep
        auto* sw = app.add_subcommand("sweep", "Grid-sweep reset mode, dthir and duration");
        std::string sw_model, sw_calib, sw_frames, sw_out = "sweep";
        std::vector<std::string> sw_resets{"soft"};
        std::vector<int> sw_dthirs{2};
        std::vector<int> sw_steps{256};
        int sw_rand = 50, sw_limit = 32;
        uint32_t sw_seed = 7;
        sw->add_option("--model", sw_model, "model manifest JSON")->required();
        sw->add_option("--calibration", sw_calib, "frame container for calibration");
        sw->add_option("--calibration-random", sw_rand, "random calibration sample count");
        sw->add_option("--frames", sw_frames, "evaluation frames (.dvsf)");
        sw->add_option("--limit", sw_limit, "evaluate at most N samples");
        sw->add_option("--resets", sw_resets, "reset modes")->delimiter(',');
        sw->add_option("--dthirs", sw_dthirs, "dthir values")->delimiter(',');
        sw->add_option("--steps-list", sw_steps, "durations")->delimiter(',');
        sw->add_option("--seed", sw_seed, "seed for random inputs");
        sw->add_option("--out", sw_out, "output directory");

        // ------------------------------------------------------------ infer
        auto* inf = app.add_subcommand("infer", "Float forward pass over a frame dataset");
        std::string inf_model, inf_frames, inf_out = "infer";
        inf->add_option("model", inf_model, "model manifest JSON")->required();
        inf->add_option("frames", inf_frames, "frame container (.dvsf)")->required();
        inf->add_option("--out", inf_out, "output directory");

        // ----------------------------------------------------- example-model
        auto* ex = app.add_subcommand("example-model", "Write the bundled seeded example network");
        std::string ex_out = "models/cnet", ex_input = "28x28x1";
        int ex_classes = 10;
        uint32_t ex_seed = 0x5EED;
        ex->add_option("--out", ex_out, "output directory");
        ex->add_option("--input", ex_input, "input shape, e.g. 32x32x3");
        ex->add_option("--classes", ex_classes, "output class count");
        ex->add_option("--seed", ex_seed, "weight seed");

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) return app.exit(e);
            app.exit(e);
            return 2;
        }

        if (pre->parsed()) {
            json cfg = load_config_file(pre_cfg_path);
            resolve(o_mode, cfg, "mode", pre_mode);
            resolve(o_win, cfg, "window_ms", acc.window_ms);
            resolve(o_wev, cfg, "window_events", acc.window_events);
            resolve(o_ch, cfg, "channels", acc.channels);
            resolve(o_ov, cfg, "overlap", acc.overlap_factor);
            resolve(o_pol, cfg, "polarity", pre_polarity);
            resolve(o_sz, cfg, "size", acc.frame_size);
            resolve(o_te, cfg, "test_every", test_every);
            acc.mode = accumulation_mode_from_string(pre_mode);
            acc.polarity = polarity_policy_from_string(pre_polarity);
            json resolved = accumulation_to_json(acc);
            resolved["test_every"] = test_every;
            return cmd_preprocess(pre_events, pre_out, acc, test_every, resolved);
        }
        if (conv->parsed()) {
            json cfg = load_config_file(conv_cfg_path);
            resolve(o_dthir, cfg, "dthir", ccfg.dthir);
            resolve(o_reset, cfg, "reset", conv_reset);
            resolve(o_pct, cfg, "percentile", ccfg.percentile);
            resolve(o_ith, cfg, "input_threshold", ccfg.input_threshold);
            ccfg.dthir = parse_dthir(ccfg.dthir);
            ccfg.reset_mode = reset_mode_from_string(conv_reset);
            json resolved{{"dthir", ccfg.dthir},
                          {"reset", conv_reset},
                          {"percentile", ccfg.percentile},
                          {"input_threshold", ccfg.input_threshold},
                          {"calibration", conv_calib},
                          {"calibration_random", conv_rand},
                          {"seed", conv_seed}};
            return cmd_convert(conv_model, conv_out, ccfg, conv_calib, conv_rand, conv_seed, resolved);
        }
        if (sim->parsed()) {
            json cfg = load_config_file(sim_cfg_path);
            resolve(o_steps, cfg, "steps", scfg.duration);
            resolve(o_warm, cfg, "warmup", scfg.warmup_steps);
            if (scfg.duration < 1) throw InputError("--steps must be at least 1");
            if (!sim_reset.empty()) scfg.reset_override = reset_mode_from_string(sim_reset);
            json resolved{{"steps", scfg.duration},
                          {"warmup", scfg.warmup_steps},
                          {"reset_override", sim_reset},
                          {"record_rasters", scfg.record_rasters},
                          {"limit", sim_limit}};
            return cmd_simulate(sim_snn, sim_frames, scfg, sim_out, sim_limit, resolved);
        }
        if (part->parsed()) {
            json cfg = load_config_file(part_cfg_path);
            resolve(o_mc, cfg, "max_compartments", constraints.max_compartments);
            resolve(o_fi, cfg, "max_fan_in", constraints.max_fan_in_axons);
            resolve(o_fo, cfg, "max_fan_out", constraints.max_fan_out_axons);
            json resolved{{"max_compartments", constraints.max_compartments},
                          {"max_fan_in", constraints.max_fan_in_axons},
                          {"max_fan_out", constraints.max_fan_out_axons}};
            return cmd_partition(part_snn, part_out, constraints, resolved);
        }
        if (corr->parsed()) {
            SnnModel probe = load_snn(corr_snn);
            corr_sim.warmup_steps = corr_no_warmup ? 0 : static_cast<int>(probe.layers.size());
            json resolved{{"samples", corr_samples},
                          {"steps", corr_sim.duration},
                          {"warmup", corr_sim.warmup_steps}};
            return cmd_correlate(corr_model, corr_snn, corr_frames, corr_samples, corr_sim, corr_out,
                                 resolved);
        }
        if (sw->parsed()) {
            SweepGrid grid;
            for (const std::string& r : sw_resets) grid.resets.push_back(reset_mode_from_string(r));
            grid.dthirs = sw_dthirs;
            grid.durations = sw_steps;
            for (int d : grid.durations)
                if (d < 1) throw InputError("durations must be at least 1");
            json resolved{{"resets", sw_resets},
                          {"dthirs", sw_dthirs},
                          {"steps_list", sw_steps},
                          {"limit", sw_limit},
                          {"seed", sw_seed}};
            return cmd_sweep(sw_model, sw_calib, sw_rand, sw_seed, sw_frames, sw_limit, grid,
                             ConversionConfig{}, SimulationConfig{}, sw_out, resolved);
        }
        if (inf->parsed()) {
            return cmd_infer(inf_model, inf_frames, inf_out, json{{"out", inf_out}});
        }
        if (ex->parsed()) {
            DnnModel model = make_cnet(parse_shape(ex_input), ex_classes, ex_seed);
            fs::create_directories(ex_out);
            save_model(model, fs::path(ex_out) / "model.json");
            write_run_manifest(ex_out, "example-model",
                               json{{"input", ex_input}, {"classes", ex_classes}, {"seed", ex_seed}},
                               {});
            log_info("wrote example model to " + ex_out);
            return 0;
        }
        return 2;
    } catch (const ConstraintError& e) {
        std::cerr << "[snnforge] constraint violation: " << e.what() << '\n';
        return 3;
    } catch (const InputError& e) {
        std::cerr << "[snnforge] error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "[snnforge] internal error: " << e.what() << '\n';
        return 1;
    }
}
