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
#include <functional>
#include <string>
#include <vector>

#include "snnforge/snn_model.hpp"

namespace snnforge {

/// Per-neurocore resource limits. Defaults are the hardware values.
struct CoreConstraints {
    int max_compartments = 1024;
    int max_fan_in_axons = 4096;
    int max_fan_out_axons = 4096;
};

/// Compartments needed per neuron: soft reset doubles the cost.
int compartment_cost(ResetMode mode);

struct CoreAssignment {
    int core_id = 0;
    int layer = 0;         // 0 = input layer, 1.. = spiking layers
    int first_neuron = 0;  // contiguous slab [first, first + neuron_count)
    int neuron_count = 0;
    int compartments = 0;
    int fan_in_axons = 0;   // distinct presynaptic neurons feeding this core
    int fan_out_axons = 0;  // sum over member neurons of their distinct destination cores
};

struct PartitionPlan {
    CoreConstraints constraints;
    ResetMode reset_mode = ResetMode::Soft;
    std::vector<CoreAssignment> cores;
    std::vector<int> cores_per_layer;  // indexed by layer (input = 0)
    int total_cores = 0;
};

/**
 * Greedy first-fit slab partition in neuron index order, one layer per
 * core. Packing is bounded by compartments and fan-in; fan-out pressure
 * is relieved by re-packing the offending source layer with a smaller
 * slab until the plan validates. Throws ConstraintError when a single
 * neuron alone violates a constraint (the layer is too wide for the
 * hardware).
 */
PartitionPlan partition(const SnnModel& snn, const CoreConstraints& constraints = {});

struct Violation {
    int core_id = -1;
    std::string what;
};

/**
 * Independent checker: recomputes compartments, fan-in and fan-out from
 * the model connectivity (not from the plan's bookkeeping), verifies
 * every neuron is assigned exactly once, and compares against limits.
 */
std::vector<Violation> validate_partition(const PartitionPlan& plan, const SnnModel& snn,
                                          const CoreConstraints& constraints);

/// Enumerates the presynaptic neuron indices (flat, in the previous
/// layer) of one neuron of spiking layer `layer` (1-based; the input
/// layer has no sources).
void for_each_source(const SnnModel& snn, int layer, int64_t neuron,
                     const std::function<void(int64_t)>& fn);

void save_partition(const PartitionPlan& plan, const std::filesystem::path& path);
std::string partition_table(const PartitionPlan& plan, const SnnModel& snn);

}  // namespace snnforge
