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
#include "snnforge/run_manifest.hpp"

#include <fstream>

#include "snnforge/common.hpp"

namespace snnforge {

namespace fs = std::filesystem;
using nlohmann::json;

uint64_t fnv1a64(const void* data, size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = 0xcbf29ce484222325ull;
    for (size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hash_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    char out[19];
    std::snprintf(out, sizeof out, "0x%016llx", static_cast<unsigned long long>(h));
    return out;
}

std::string hash_json(const json& j) {
    const std::string dump = j.dump();
    uint64_t h = fnv1a64(dump.data(), dump.size());
    char out[19];
    std::snprintf(out, sizeof out, "0x%016llx", static_cast<unsigned long long>(h));
    return out;
}

void write_run_manifest(const fs::path& out_dir, const std::string& subcommand,
                        const json& resolved_config, const std::vector<fs::path>& inputs) {
    json j;
    j["tool"] = std::string(kToolName);
    j["version"] = std::string(kToolVersion);
    j["subcommand"] = subcommand;
    j["config"] = resolved_config;
    j["config_hash"] = hash_json(resolved_config);
    j["inputs"] = json::array();
    for (const fs::path& p : inputs)
        j["inputs"].push_back({{"path", p.string()}, {"fnv1a64", hash_file(p)}});

    std::ofstream out(out_dir / "run_manifest.json", std::ios::trunc);
    if (!out) throw InputError("cannot write '" + (out_dir / "run_manifest.json").string() + "'");
    out << j.dump(2) << '\n';
}

}  // namespace snnforge
