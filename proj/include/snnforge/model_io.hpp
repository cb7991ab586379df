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
#include <vector>

#include "snnforge/model.hpp"

namespace snnforge {

/**
 * Model file format: a JSON manifest next to raw little-endian float32
 * blobs, one weight blob and one bias blob per parameterized layer.
 * save_model followed by load_model is a bit-exact round trip.
 */
DnnModel load_model(const std::filesystem::path& manifest_path);
void save_model(const DnnModel& model, const std::filesystem::path& manifest_path);

// Raw little-endian blob helpers (shared with the SNN and frame formats).
std::vector<float> read_f32_blob(const std::filesystem::path& path, int64_t expected_count);
void write_f32_blob(const std::filesystem::path& path, const std::vector<float>& values);
std::vector<int32_t> read_i32_blob(const std::filesystem::path& path, int64_t expected_count);
void write_i32_blob(const std::filesystem::path& path, const std::vector<int32_t>& values);

}  // namespace snnforge
