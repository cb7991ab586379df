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

#include "snnforge/converter.hpp"
#include "snnforge/snn_model.hpp"

namespace snnforge {

/// SNN model directory format: manifest.json plus little-endian int32
/// weight/bias blobs per layer. Round trips exactly.
void save_snn(const SnnModel& snn, const std::filesystem::path& dir);
SnnModel load_snn(const std::filesystem::path& dir);

void save_report(const NormalizationReport& report, const std::filesystem::path& path);
NormalizationReport load_report(const std::filesystem::path& path);

}  // namespace snnforge
