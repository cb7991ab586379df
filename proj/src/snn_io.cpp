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
#include "snnforge/snn_io.hpp"

#include <fstream>

#include "json.hpp"
#include "snnforge/common.hpp"
#include "snnforge/model_io.hpp"

namespace snnforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string blob_name(int layer, const char* tag) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snn.l%02d.%s.bin", layer, tag);
    return buf;
}

Shape shape_from(const json& j) {
    std::vector<int> dims;
    for (const auto& d : j) dims.push_back(d.get<int>());
    return Shape(dims);
}

}  // namespace

void save_snn(const SnnModel& snn, const fs::path& dir) {
    validate_snn(snn);
    fs::create_directories(dir);

    json j;
    j["format_version"] = snn.format_version;
    j["kind"] = "snn_model";
    j["name"] = snn.name;
    j["input_shape"] = snn.input_shape.dims();
    j["input_threshold"] = snn.input_threshold;
    j["reset_mode"] = to_string(snn.reset_mode);
    j["decay_u"] = snn.decay_u;
    j["decay_v"] = snn.decay_v;
    j["dthir"] = snn.dthir;
    j["layers"] = json::array();
    for (int i = 0; i < static_cast<int>(snn.layers.size()); ++i) {
        const SnnLayer& L = snn.layers[static_cast<size_t>(i)];
        json lj;
        lj["kind"] = to_string(L.kind);
        lj["in_shape"] = L.in_shape.dims();
        lj["out_shape"] = L.out_shape.dims();
        lj["kernel"] = {L.kernel_h, L.kernel_w};
        lj["stride"] = {L.stride_h, L.stride_w};
        lj["pad"] = {L.pad_top, L.pad_left};
        lj["threshold"] = L.threshold;
        lj["weight_scale"] = L.weight_scale;
        lj["lambda"] = L.lambda;
        lj["rate_factor"] = L.rate_factor;
        {
            std::string name = blob_name(i, "w");
            write_i32_blob(dir / name, L.weights);
            lj["weights"] = {{"file", name}, {"count", L.weights.size()}};
        }
        if (!L.biases.empty()) {
            std::string name = blob_name(i, "b");
            write_i32_blob(dir / name, L.biases);
            lj["biases"] = {{"file", name}, {"count", L.biases.size()}};
        }
        j["layers"].push_back(std::move(lj));
    }

    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out) throw InputError("cannot write '" + (dir / "manifest.json").string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw InputError("write failed for '" + (dir / "manifest.json").string() + "'");
}

SnnModel load_snn(const fs::path& dir) {
    const fs::path manifest = fs::is_directory(dir) ? dir / "manifest.json" : dir;
    json j;
    {
        std::ifstream in(manifest);
        if (!in) throw InputError("cannot open '" + manifest.string() + "'");
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw InputError("bad snn manifest '" + manifest.string() + "': " + e.what());
        }
    }
    if (j.value("kind", "") != "snn_model")
        throw InputError("'" + manifest.string() + "' is not an snn model manifest");

    SnnModel snn;
    snn.format_version = j.at("format_version").get<int>();
    snn.name = j.value("name", "snn");
    snn.input_shape = shape_from(j.at("input_shape"));
    snn.input_threshold = j.at("input_threshold").get<int32_t>();
    snn.reset_mode = reset_mode_from_string(j.at("reset_mode").get<std::string>());
    snn.decay_u = j.at("decay_u").get<float>();
    snn.decay_v = j.at("decay_v").get<float>();
    snn.dthir = j.at("dthir").get<int>();

    const fs::path base = manifest.parent_path();
    for (const auto& lj : j.at("layers")) {
        SnnLayer L;
        L.kind = layer_kind_from_string(lj.at("kind").get<std::string>());
        L.in_shape = shape_from(lj.at("in_shape"));
        L.out_shape = shape_from(lj.at("out_shape"));
        L.kernel_h = lj.at("kernel").at(0).get<int>();
        L.kernel_w = lj.at("kernel").at(1).get<int>();
        L.stride_h = lj.at("stride").at(0).get<int>();
        L.stride_w = lj.at("stride").at(1).get<int>();
        L.pad_top = lj.at("pad").at(0).get<int>();
        L.pad_left = lj.at("pad").at(1).get<int>();
        L.threshold = lj.at("threshold").get<int32_t>();
        L.weight_scale = lj.at("weight_scale").get<float>();
        L.lambda = lj.at("lambda").get<float>();
        L.rate_factor = lj.at("rate_factor").get<float>();
        {
            const auto& w = lj.at("weights");
            L.weights = read_i32_blob(base / w.at("file").get<std::string>(),
                                      w.at("count").get<int64_t>());
        }
        if (lj.contains("biases")) {
            const auto& b = lj.at("biases");
            L.biases = read_i32_blob(base / b.at("file").get<std::string>(),
                                     b.at("count").get<int64_t>());
        }
        snn.layers.push_back(std::move(L));
    }
    validate_snn(snn);
    return snn;
}

void save_report(const NormalizationReport& report, const fs::path& path) {
    json j;
    j["percentile"] = report.percentile;
    j["dthir"] = report.dthir;
    j["calibration_samples"] = report.calibration_samples;
    j["layers"] = json::array();
    for (const auto& lr : report.layers) {
        j["layers"].push_back({{"layer", lr.layer_index},
                               {"kind", lr.kind},
                               {"lambda", lr.lambda},
                               {"lambda_fallback", lr.lambda_fallback},
                               {"lambda_inherited", lr.lambda_inherited},
                               {"max_abs_weight", lr.max_abs_weight},
                               {"weight_scale", lr.weight_scale},
                               {"threshold", lr.threshold},
                               {"quantization_mse", lr.quantization_mse},
                               {"clipped_weights", lr.clipped_weights},
                               {"clipped_biases", lr.clipped_biases},
                               {"bias_rate_compensation", lr.bias_rate_compensation}});
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

NormalizationReport load_report(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    json j;
    in >> j;
    NormalizationReport report;
    report.percentile = j.at("percentile").get<double>();
    report.dthir = j.at("dthir").get<int>();
    report.calibration_samples = j.at("calibration_samples").get<int64_t>();
    for (const auto& lj : j.at("layers")) {
        LayerConversionReport lr;
        lr.layer_index = lj.at("layer").get<int>();
        lr.kind = lj.at("kind").get<std::string>();
        lr.lambda = lj.at("lambda").get<double>();
        lr.lambda_fallback = lj.at("lambda_fallback").get<bool>();
        lr.lambda_inherited = lj.at("lambda_inherited").get<bool>();
        lr.max_abs_weight = lj.at("max_abs_weight").get<double>();
        lr.weight_scale = lj.at("weight_scale").get<double>();
        lr.threshold = lj.at("threshold").get<int64_t>();
        lr.quantization_mse = lj.at("quantization_mse").get<double>();
        lr.clipped_weights = lj.at("clipped_weights").get<int64_t>();
        lr.clipped_biases = lj.at("clipped_biases").get<int64_t>();
        lr.bias_rate_compensation = lj.at("bias_rate_compensation").get<double>();
        report.layers.push_back(std::move(lr));
    }
    return report;
}

}  // namespace snnforge
