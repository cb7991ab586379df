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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace snnforge {

uint64_t fnv1a64(const void* data, size_t bytes);
std::string hash_file(const std::filesystem::path& path);
std::string hash_json(const nlohmann::json& j);

/**
 * Writes <out_dir>/run_manifest.json recording the tool version, the
 * subcommand, the fully resolved configuration and content hashes of
 * every input file. The manifest contains nothing run-dependent, so
 * rerunning the same command reproduces it byte for byte; rerunning
 * with the manifest as --config reproduces the outputs.
 */
void write_run_manifest(const std::filesystem::path& out_dir, const std::string& subcommand,
                        const nlohmann::json& resolved_config,
                        const std::vector<std::filesystem::path>& inputs);

}  // namespace snnforge
