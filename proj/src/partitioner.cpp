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
#include "snnforge/partitioner.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "snnforge/common.hpp"

namespace snnforge {

namespace {

std::vector<int64_t> layer_sizes(const SnnModel& snn) {
    std::vector<int64_t> sizes;
    sizes.push_back(snn.input_neurons());
    for (const SnnLayer& L : snn.layers) sizes.push_back(L.neuron_count());
    return sizes;
}

// core id of every neuron, per layer, reconstructed from the plan's slabs
std::vector<std::vector<int>> core_map(const PartitionPlan& plan, const std::vector<int64_t>& sizes) {
    std::vector<std::vector<int>> map(sizes.size());
    for (size_t l = 0; l < sizes.size(); ++l) map[l].assign(static_cast<size_t>(sizes[l]), -1);
    for (const CoreAssignment& core : plan.cores) {
        if (core.layer < 0 || core.layer >= static_cast<int>(sizes.size())) continue;
        auto& layer_map = map[static_cast<size_t>(core.layer)];
        for (int n = core.first_neuron; n < core.first_neuron + core.neuron_count; ++n) {
            if (n >= 0 && n < static_cast<int>(layer_map.size()))
                layer_map[static_cast<size_t>(n)] = core.core_id;
        }
    }
    return map;
}

}  // namespace

int compartment_cost(ResetMode mode) { return mode == ResetMode::Soft ? 2 : 1; }

void for_each_source(const SnnModel& snn, int layer, int64_t neuron,
                     const std::function<void(int64_t)>& fn) {
    if (layer < 1 || layer > static_cast<int>(snn.layers.size()))
        throw InputError("for_each_source: layer index out of range");
    const SnnLayer& L = snn.layers[static_cast<size_t>(layer - 1)];
    switch (L.kind) {
        case LayerKind::Conv2D: {
            const int iw = L.in_shape.dim(1), ih = L.in_shape.dim(0), ci = L.in_shape.dim(2);
            const int ow = L.out_shape.dim(1), co = L.out_shape.dim(2);
            const int oc_pos = static_cast<int>(neuron / co);  // spatial index
            const int oy = oc_pos / ow, ox = oc_pos % ow;
            for (int ky = 0; ky < L.kernel_h; ++ky) {
                int iy = oy * L.stride_h + ky - L.pad_top;
                if (iy < 0 || iy >= ih) continue;
                for (int kx = 0; kx < L.kernel_w; ++kx) {
                    int ix = ox * L.stride_w + kx - L.pad_left;
                    if (ix < 0 || ix >= iw) continue;
                    for (int ic = 0; ic < ci; ++ic) fn(static_cast<int64_t>(iy * iw + ix) * ci + ic);
                }
            }
            break;
        }
        case LayerKind::DepthwiseConv2D:
        case LayerKind::AvgPool2D: {
            const int iw = L.in_shape.dim(1), ih = L.in_shape.dim(0), c = L.in_shape.dim(2);
            const int ow = L.out_shape.dim(1);
            const int ch = static_cast<int>(neuron % c);
            const int pos = static_cast<int>(neuron / c);
            const int oy = pos / ow, ox = pos % ow;
            const int pt = L.kind == LayerKind::AvgPool2D ? 0 : L.pad_top;
            const int pl = L.kind == LayerKind::AvgPool2D ? 0 : L.pad_left;
            for (int ky = 0; ky < L.kernel_h; ++ky) {
                int iy = oy * L.stride_h + ky - pt;
                if (iy < 0 || iy >= ih) continue;
                for (int kx = 0; kx < L.kernel_w; ++kx) {
                    int ix = ox * L.stride_w + kx - pl;
                    if (ix < 0 || ix >= iw) continue;
                    fn(static_cast<int64_t>(iy * iw + ix) * c + ch);
                }
            }
            break;
        }
        case LayerKind::Conv1D: {
            const int il = L.in_shape.dim(0), ci = L.in_shape.dim(1);
            const int co = L.out_shape.dim(1);
            const int o = static_cast<int>(neuron / co);
            for (int k = 0; k < L.kernel_w; ++k) {
                int i = o * L.stride_w + k - L.pad_left;
                if (i < 0 || i >= il) continue;
                for (int ic = 0; ic < ci; ++ic) fn(static_cast<int64_t>(i) * ci + ic);
            }
            break;
        }
        case LayerKind::Dense: {
            const int64_t n_in = L.in_shape.count();
            for (int64_t i = 0; i < n_in; ++i) fn(i);
            break;
        }
        default:
            throw InputError("layer kind has no connectivity rule");
    }
}

namespace {

PartitionPlan build_plan(const SnnModel& snn, const CoreConstraints& constraints,
                         const std::vector<int64_t>& caps) {
    const std::vector<int64_t> sizes = layer_sizes(snn);
    const int cost = compartment_cost(snn.reset_mode);
    const int n_layers = static_cast<int>(sizes.size());

    PartitionPlan plan;
    plan.constraints = constraints;
    plan.reset_mode = snn.reset_mode;
    plan.cores_per_layer.assign(static_cast<size_t>(n_layers), 0);

    std::vector<std::vector<int>> core_of(static_cast<size_t>(n_layers));
    int core_id = 0;

    for (int l = 0; l < n_layers; ++l) {
        core_of[static_cast<size_t>(l)].assign(static_cast<size_t>(sizes[static_cast<size_t>(l)]), -1);
        const int64_t prev_size = l == 0 ? 0 : sizes[static_cast<size_t>(l) - 1];
        std::vector<int> stamp(static_cast<size_t>(prev_size), -1);

        CoreAssignment core;
        core.core_id = core_id;
        core.layer = l;
        core.first_neuron = 0;
        for (int64_t n = 0; n < sizes[static_cast<size_t>(l)]; ++n) {
            int new_sources = 0;
            if (l > 0) {
                for_each_source(snn, l, n, [&](int64_t s) {
                    if (stamp[static_cast<size_t>(s)] != core.core_id) ++new_sources;
                });
            }
            const bool fits = core.neuron_count + 1 <= caps[static_cast<size_t>(l)] &&
                              core.fan_in_axons + new_sources <= constraints.max_fan_in_axons;
            if (!fits) {
                if (core.neuron_count == 0)
                    throw ConstraintError("unpartitionable layer " + std::to_string(l) + ": neuron " +
                                          std::to_string(n) + " needs " + std::to_string(new_sources) +
                                          " fan-in axons (limit " +
                                          std::to_string(constraints.max_fan_in_axons) + ")");
                core.compartments = core.neuron_count * cost;
                plan.cores.push_back(core);
                ++plan.cores_per_layer[static_cast<size_t>(l)];
                ++core_id;
                core = CoreAssignment{};
                core.core_id = core_id;
                core.layer = l;
                core.first_neuron = static_cast<int>(n);
                new_sources = 0;
                if (l > 0) {
                    for_each_source(snn, l, n, [&](int64_t s) {
                        if (stamp[static_cast<size_t>(s)] != core.core_id) ++new_sources;
                    });
                }
                if (new_sources > constraints.max_fan_in_axons)
                    throw ConstraintError("unpartitionable layer " + std::to_string(l) + ": neuron " +
                                          std::to_string(n) + " needs " + std::to_string(new_sources) +
                                          " fan-in axons (limit " +
                                          std::to_string(constraints.max_fan_in_axons) + ")");
            }
            if (l > 0) {
                for_each_source(snn, l, n,
                                [&](int64_t s) { stamp[static_cast<size_t>(s)] = core.core_id; });
            }
            core.fan_in_axons += new_sources;
            ++core.neuron_count;
            core_of[static_cast<size_t>(l)][static_cast<size_t>(n)] = core.core_id;
        }
        if (core.neuron_count > 0) {
            core.compartments = core.neuron_count * cost;
            plan.cores.push_back(core);
            ++plan.cores_per_layer[static_cast<size_t>(l)];
            ++core_id;
        }
    }
    plan.total_cores = core_id;

    // fan-out bookkeeping: cores are assigned in neuron order, so for a fixed
    // source the destination core ids are non-decreasing and last-seen dedup works
    std::vector<int> fan_out(static_cast<size_t>(core_id), 0);
    for (int l = 1; l < n_layers; ++l) {
        const int64_t prev_size = sizes[static_cast<size_t>(l) - 1];
        std::vector<int> last_dest(static_cast<size_t>(prev_size), -1);
        for (int64_t n = 0; n < sizes[static_cast<size_t>(l)]; ++n) {
            const int dest = core_of[static_cast<size_t>(l)][static_cast<size_t>(n)];
            for_each_source(snn, l, n, [&](int64_t s) {
                if (last_dest[static_cast<size_t>(s)] != dest) {
                    last_dest[static_cast<size_t>(s)] = dest;
                    ++fan_out[static_cast<size_t>(core_of[static_cast<size_t>(l) - 1][static_cast<size_t>(s)])];
                }
            });
        }
    }
    for (CoreAssignment& core : plan.cores) core.fan_out_axons = fan_out[static_cast<size_t>(core.core_id)];
    return plan;
}

}  // namespace

PartitionPlan partition(const SnnModel& snn, const CoreConstraints& constraints) {
    if (constraints.max_compartments <= 0 || constraints.max_fan_in_axons <= 0 ||
        constraints.max_fan_out_axons <= 0)
        throw InputError("core constraints must be positive");

    PartitionPlan plan;
    plan.constraints = constraints;
    plan.reset_mode = snn.reset_mode;
    if (snn.layers.empty()) return plan;  // empty model, empty plan

    const int cost = compartment_cost(snn.reset_mode);
    const int64_t base_cap = constraints.max_compartments / cost;
    if (base_cap < 1)
        throw ConstraintError("compartment cost " + std::to_string(cost) +
                              " exceeds core capacity " + std::to_string(constraints.max_compartments));

    const std::vector<int64_t> sizes = layer_sizes(snn);
    std::vector<int64_t> caps(sizes.size(), base_cap);

    for (int attempt = 0; attempt < 64; ++attempt) {
        plan = build_plan(snn, constraints, caps);
        bool shrunk = false;
        for (const CoreAssignment& core : plan.cores) {
            if (core.fan_out_axons > constraints.max_fan_out_axons) {
                int64_t& cap = caps[static_cast<size_t>(core.layer)];
                if (cap == 1)
                    throw ConstraintError("unpartitionable layer " + std::to_string(core.layer) +
                                          ": a single neuron exceeds the fan-out limit");
                cap = std::max<int64_t>(1, cap / 2);
                shrunk = true;
            }
        }
        if (!shrunk) return plan;
    }
    throw ConstraintError("partition did not converge under the fan-out limit");
}

std::vector<Violation> validate_partition(const PartitionPlan& plan, const SnnModel& snn,
                                          const CoreConstraints& constraints) {
    std::vector<Violation> violations;
    const std::vector<int64_t> sizes = layer_sizes(snn);
    if (snn.layers.empty()) {
        if (!plan.cores.empty()) violations.push_back({-1, "plan has cores for an empty model"});
        return violations;
    }
    if (plan.reset_mode != snn.reset_mode)
        violations.push_back({-1, "plan reset mode does not match the model"});
    const int cost = compartment_cost(snn.reset_mode);

    // coverage: every neuron exactly once
    std::vector<std::vector<int>> map = core_map(plan, sizes);
    for (size_t l = 0; l < sizes.size(); ++l) {
        std::vector<int64_t> seen(static_cast<size_t>(sizes[l]), 0);
        for (const CoreAssignment& core : plan.cores) {
            if (core.layer != static_cast<int>(l)) continue;
            if (core.first_neuron < 0 || core.neuron_count <= 0 ||
                core.first_neuron + core.neuron_count > sizes[l]) {
                violations.push_back({core.core_id, "slab outside layer " + std::to_string(l)});
                continue;
            }
            for (int n = core.first_neuron; n < core.first_neuron + core.neuron_count; ++n)
                ++seen[static_cast<size_t>(n)];
        }
        for (int64_t n = 0; n < sizes[l]; ++n) {
            if (seen[static_cast<size_t>(n)] != 1) {
                violations.push_back({-1, "layer " + std::to_string(l) + " neuron " + std::to_string(n) +
                                              " assigned " + std::to_string(seen[static_cast<size_t>(n)]) +
                                              " times"});
                break;  // one message per layer is enough
            }
        }
    }

    // compartments and fan-in, recomputed from connectivity
    for (const CoreAssignment& core : plan.cores) {
        const int comps = core.neuron_count * cost;
        if (comps > constraints.max_compartments)
            violations.push_back({core.core_id, "compartments " + std::to_string(comps) + " > " +
                                                    std::to_string(constraints.max_compartments)});
        if (core.layer >= 1) {
            std::vector<uint8_t> seen(static_cast<size_t>(sizes[static_cast<size_t>(core.layer) - 1]), 0);
            int64_t fan_in = 0;
            for (int n = core.first_neuron; n < core.first_neuron + core.neuron_count; ++n) {
                for_each_source(snn, core.layer, n, [&](int64_t s) {
                    if (!seen[static_cast<size_t>(s)]) {
                        seen[static_cast<size_t>(s)] = 1;
                        ++fan_in;
                    }
                });
            }
            if (fan_in > constraints.max_fan_in_axons)
                violations.push_back({core.core_id, "fan-in " + std::to_string(fan_in) + " > " +
                                                        std::to_string(constraints.max_fan_in_axons)});
        }
    }

    // fan-out via (source, destination core) pair enumeration; robust to any
    // slab ordering in hand-built plans
    std::vector<int64_t> fan_out;
    {
        int max_core = -1;
        for (const CoreAssignment& core : plan.cores) max_core = std::max(max_core, core.core_id);
        fan_out.assign(static_cast<size_t>(max_core) + 1, 0);
    }
    for (int l = 1; l < static_cast<int>(sizes.size()); ++l) {
        std::vector<std::pair<int64_t, int>> pairs;  // (source neuron, destination core)
        for (int64_t n = 0; n < sizes[static_cast<size_t>(l)]; ++n) {
            const int dest = map[static_cast<size_t>(l)][static_cast<size_t>(n)];
            for_each_source(snn, l, n, [&](int64_t s) { pairs.emplace_back(s, dest); });
        }
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
        for (const auto& [s, dest] : pairs) {
            (void)dest;
            const int src_core = map[static_cast<size_t>(l) - 1][static_cast<size_t>(s)];
            if (src_core >= 0) ++fan_out[static_cast<size_t>(src_core)];
        }
    }
    for (const CoreAssignment& core : plan.cores) {
        if (fan_out[static_cast<size_t>(core.core_id)] > constraints.max_fan_out_axons)
            violations.push_back({core.core_id,
                                  "fan-out " + std::to_string(fan_out[static_cast<size_t>(core.core_id)]) +
                                      " > " + std::to_string(constraints.max_fan_out_axons)});
    }
    return violations;
}

void save_partition(const PartitionPlan& plan, const std::filesystem::path& path) {
    nlohmann::json j;
    j["constraints"] = {{"max_compartments", plan.constraints.max_compartments},
                        {"max_fan_in_axons", plan.constraints.max_fan_in_axons},
                        {"max_fan_out_axons", plan.constraints.max_fan_out_axons}};
    j["reset_mode"] = to_string(plan.reset_mode);
    j["total_cores"] = plan.total_cores;
    j["cores_per_layer"] = plan.cores_per_layer;
    j["cores"] = nlohmann::json::array();
    for (const CoreAssignment& core : plan.cores) {
        j["cores"].push_back({{"core", core.core_id},
                              {"layer", core.layer},
                              {"first_neuron", core.first_neuron},
                              {"neurons", core.neuron_count},
                              {"compartments", core.compartments},
                              {"fan_in_axons", core.fan_in_axons},
                              {"fan_out_axons", core.fan_out_axons}});
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

std::string partition_table(const PartitionPlan& plan, const SnnModel& snn) {
    std::ostringstream os;
    os << "layer  kind              neurons  cores\n";
    const std::vector<int64_t> sizes = layer_sizes(snn);
    for (size_t l = 0; l < plan.cores_per_layer.size(); ++l) {
        const char* kind = l == 0 ? "input" : to_string(snn.layers[l - 1].kind);
        char buf[96];
        std::snprintf(buf, sizeof buf, "%-6zu %-17s %8lld %6d\n", l, kind,
                      static_cast<long long>(sizes[l]), plan.cores_per_layer[l]);
        os << buf;
    }
    os << "total cores: " << plan.total_cores << " (" << to_string(plan.reset_mode) << " reset, "
       << compartment_cost(plan.reset_mode) << " compartment(s)/neuron)\n";
    return os.str();
}

}  // namespace snnforge
