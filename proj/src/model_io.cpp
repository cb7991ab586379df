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
#include "snnforge/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "snnforge/common.hpp"

static_assert(std::endian::native == std::endian::little,
              "blob I/O assumes a little-endian host");

namespace snnforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<char> read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    in.seekg(0, std::ios::end);
    std::vector<char> buf(static_cast<size_t>(in.tellg()));
    in.seekg(0);
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!in) throw InputError("read failed for '" + path.string() + "'");
    return buf;
}

void write_bytes(const fs::path& path, const void* data, size_t bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    out.flush();
    if (!out) throw InputError("write failed for '" + path.string() + "'");
}

template <typename T>
std::vector<T> read_blob(const fs::path& path, int64_t expected_count) {
    std::vector<char> bytes = read_bytes(path);
    if (expected_count >= 0 &&
        bytes.size() != static_cast<size_t>(expected_count) * sizeof(T)) {
        throw InputError("blob '" + path.string() + "' holds " +
                         std::to_string(bytes.size() / sizeof(T)) + " values, expected " +
                         std::to_string(expected_count));
    }
    if (bytes.size() % sizeof(T) != 0)
        throw InputError("blob '" + path.string() + "' is not a whole number of records");
    std::vector<T> values(bytes.size() / sizeof(T));
    std::memcpy(values.data(), bytes.data(), bytes.size());
    return values;
}

json shape_to_json(const Shape& s) { return json(s.dims()); }

Shape shape_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.empty() || j.size() > 3)
        throw InputError(std::string(what) + " must be an array of 1 to 3 dimensions");
    std::vector<int> dims;
    for (const auto& d : j) {
        if (!d.is_number_integer() || d.get<int>() <= 0)
            throw InputError(std::string(what) + " dimensions must be positive integers");
        dims.push_back(d.get<int>());
    }
    return Shape(dims);
}

std::string blob_name(const std::string& stem, int layer, const char* tag) {
    char buf[32];
    std::snprintf(buf, sizeof buf, ".l%02d.%s.bin", layer, tag);
    return stem + buf;
}

}  // namespace

std::vector<float> read_f32_blob(const fs::path& path, int64_t expected_count) {
    return read_blob<float>(path, expected_count);
}

void write_f32_blob(const fs::path& path, const std::vector<float>& values) {
    write_bytes(path, values.data(), values.size() * sizeof(float));
}

std::vector<int32_t> read_i32_blob(const fs::path& path, int64_t expected_count) {
    return read_blob<int32_t>(path, expected_count);
}

void write_i32_blob(const fs::path& path, const std::vector<int32_t>& values) {
    write_bytes(path, values.data(), values.size() * sizeof(int32_t));
}

DnnModel load_model(const fs::path& manifest_path) {
    json j;
    {
        std::ifstream in(manifest_path);
        if (!in) throw InputError("cannot open '" + manifest_path.string() + "'");
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw InputError("bad manifest '" + manifest_path.string() + "': " + e.what());
        }
    }
    if (!j.contains("format_version")) throw InputError("manifest lacks format_version");
    DnnModel model;
    model.format_version = j.at("format_version").get<int>();
    if (model.format_version != 1)
        throw InputError("unsupported format_version " + std::to_string(model.format_version));
    model.name = j.value("name", "model");
    model.input_shape = shape_from_json(j.at("input_shape"), "input_shape");

    if (!j.contains("layers") || !j.at("layers").is_array() || j.at("layers").empty())
        throw InputError("empty model");

    const fs::path dir = manifest_path.parent_path();
    for (const auto& lj : j.at("layers")) {
        LayerSpec layer;
        layer.kind = layer_kind_from_string(lj.at("kind").get<std::string>());
        layer.features = lj.value("features", 0);
        if (lj.contains("kernel")) {
            const auto& k = lj.at("kernel");
            layer.kernel_h = k.at(0).get<int>();
            layer.kernel_w = k.size() > 1 ? k.at(1).get<int>() : layer.kernel_h;
        }
        if (lj.contains("stride")) {
            const auto& s = lj.at("stride");
            layer.stride_h = s.at(0).get<int>();
            layer.stride_w = s.size() > 1 ? s.at(1).get<int>() : layer.stride_h;
        }
        layer.padding = padding_from_string(lj.value("padding", "valid"));
        layer.activation = activation_from_string(lj.value("activation", "none"));
        if (lj.contains("pad")) {
            const auto& p = lj.at("pad");  // [top, bottom, left, right]
            layer.pad_top = p.at(0).get<int>();
            layer.pad_bottom = p.at(1).get<int>();
            layer.pad_left = p.at(2).get<int>();
            layer.pad_right = p.at(3).get<int>();
        }
        layer.rate = lj.value("rate", 0.0f);
        layer.epsilon = lj.value("epsilon", 1e-3f);
        if (lj.contains("shape")) layer.target_shape = shape_from_json(lj.at("shape"), "shape");
        if (lj.contains("output_shape"))
            layer.output_shape = shape_from_json(lj.at("output_shape"), "output_shape");
        if (lj.contains("weights")) {
            const auto& w = lj.at("weights");
            layer.weights = read_f32_blob(dir / w.at("file").get<std::string>(),
                                          w.at("count").get<int64_t>());
        }
        if (lj.contains("biases")) {
            const auto& b = lj.at("biases");
            layer.biases = read_f32_blob(dir / b.at("file").get<std::string>(),
                                         b.at("count").get<int64_t>());
        }
        model.layers.push_back(std::move(layer));
    }

    infer_shapes(model);
    validate_model(model);
    return model;
}

void save_model(const DnnModel& model, const fs::path& manifest_path) {
    validate_model(model);  // rejects non-finite parameters and stale shapes

    DnnModel m = model;
    infer_shapes(m);

    const fs::path dir = manifest_path.parent_path();
    const std::string stem = manifest_path.stem().string();

    json j;
    j["format_version"] = m.format_version;
    j["name"] = m.name;
    j["input_shape"] = shape_to_json(m.input_shape);
    j["layers"] = json::array();
    for (int i = 0; i < static_cast<int>(m.layers.size()); ++i) {
        const LayerSpec& layer = m.layers[static_cast<size_t>(i)];
        json lj;
        lj["kind"] = to_string(layer.kind);
        if (layer.features) lj["features"] = layer.features;
        if (layer.kernel_h || layer.kernel_w) lj["kernel"] = {layer.kernel_h, layer.kernel_w};
        if (layer.kind != LayerKind::Flatten && layer.kind != LayerKind::Reshape &&
            layer.kind != LayerKind::ZeroPad2D && layer.kind != LayerKind::Dropout &&
            layer.kind != LayerKind::BatchNorm)
            lj["stride"] = {layer.stride_h, layer.stride_w};
        if (is_weighted(layer.kind)) lj["padding"] = to_string(layer.padding);
        if (layer.activation != Activation::None) lj["activation"] = to_string(layer.activation);
        if (layer.kind == LayerKind::ZeroPad2D)
            lj["pad"] = {layer.pad_top, layer.pad_bottom, layer.pad_left, layer.pad_right};
        if (layer.kind == LayerKind::Dropout) lj["rate"] = layer.rate;
        if (layer.kind == LayerKind::BatchNorm) lj["epsilon"] = layer.epsilon;
        if (layer.kind == LayerKind::Reshape) lj["shape"] = shape_to_json(layer.target_shape);
        lj["output_shape"] = shape_to_json(layer.output_shape);
        if (!layer.weights.empty()) {
            std::string name = blob_name(stem, i, "w");
            write_f32_blob(dir / name, layer.weights);
            lj["weights"] = {{"file", name}, {"count", layer.weights.size()}};
        }
        if (!layer.biases.empty()) {
            std::string name = blob_name(stem, i, "b");
            write_f32_blob(dir / name, layer.biases);
            lj["biases"] = {{"file", name}, {"count", layer.biases.size()}};
        }
        j["layers"].push_back(std::move(lj));
    }

    std::ofstream out(manifest_path, std::ios::trunc);
    if (!out) throw InputError("cannot write '" + manifest_path.string() + "'");
    out << j.dump(2) << '\n';
    out.flush();
    if (!out) throw InputError("write failed for '" + manifest_path.string() + "'");
}

}  // namespace snnforge
