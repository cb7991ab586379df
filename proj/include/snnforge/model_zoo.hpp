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

#include "snnforge/model.hpp"

namespace snnforge {

/**
 * The bundled example network: four strided/unstrided convolutions
 * followed by a dense classifier (16/32/64/10 feature maps, kernels
 * 4-3-3-4, strides 2-1-2-1). Weights are seeded pseudo-random
 * (scaled normal), so the descriptor is reproducible without shipping
 * binary blobs; real deployments load trained weights instead.
 */
DnnModel make_cnet(const Shape& input_shape = Shape({28, 28, 1}), int classes = 10,
                   uint32_t seed = 0x5EED);

/// Deterministic N(0, stddev) values; Box-Muller over mt19937 so sequences
/// do not depend on the standard library's distribution implementation.
class SeededNormal {
public:
    explicit SeededNormal(uint32_t seed);
    float next(float stddev);
    float uniform(float lo, float hi);

private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
    double next_unit();
};

}  // namespace snnforge
