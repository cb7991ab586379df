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

#include <vector>

#include "snnforge/model.hpp"

namespace snnforge {

/**
 * Post-activation tensors captured during a forward pass, one entry per
 * non-structural layer (Flatten/Reshape/ZeroPad2D are skipped). For a
 * final softmax layer the entry holds the pre-softmax values, since the
 * spiking network decodes by argmax and never materializes a softmax.
 */
struct ActivationEntry {
    int layer_index = -1;  // index into DnnModel::layers
    Tensor values;
};

struct ActivationTrace {
    std::vector<ActivationEntry> entries;
};

struct InferResult {
    std::vector<float> class_scores;  // softmax-normalized when the model ends in softmax
    ActivationTrace trace;
};

/**
 * Float-precision forward pass. Deterministic; Dropout acts as identity,
 * BatchNorm applies its trained statistics. Throws InputError when the
 * input shape does not match the model.
 */
InferResult infer(const DnnModel& model, const Tensor& input, bool capture_trace = true);

std::vector<float> softmax(const std::vector<float>& logits);

}  // namespace snnforge
