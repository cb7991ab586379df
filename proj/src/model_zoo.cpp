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
#include "snnforge/model_zoo.hpp"

#include <cmath>

#include "snnforge/common.hpp"

namespace snnforge {

namespace {

// splitmix64: small, well-mixed, and identical on every platform
uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

SeededNormal::SeededNormal(uint32_t seed) : state_(0x9E3779B9u ^ (static_cast<uint64_t>(seed) << 16 | seed)) {}

double SeededNormal::next_unit() {
    // (0, 1]; never 0 so log() is safe
    return (static_cast<double>(splitmix64(state_) >> 11) + 1.0) / 9007199254740993.0;
}

float SeededNormal::next(float stddev) {
    if (have_spare_) {
        have_spare_ = false;
        return static_cast<float>(spare_ * stddev);
    }
    double u1 = next_unit();
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return static_cast<float>(r * std::cos(2.0 * M_PI * u2) * stddev);
}

float SeededNormal::uniform(float lo, float hi) {
    return lo + static_cast<float>(next_unit()) * (hi - lo);
}

DnnModel make_cnet(const Shape& input_shape, int classes, uint32_t seed) {
    if (input_shape.rank() != 3) throw InputError("cnet expects a rank-3 input shape");
    if (classes < 2) throw InputError("cnet needs at least 2 classes");

    DnnModel m;
    m.name = "cnet";
    m.input_shape = input_shape;

    auto conv = [](int features, int kernel, int stride) {
        LayerSpec L;
        L.kind = LayerKind::Conv2D;
        L.features = features;
        L.kernel_h = L.kernel_w = kernel;
        L.stride_h = L.stride_w = stride;
        L.activation = Activation::ReLU;
        return L;
    };
    m.layers.push_back(conv(16, 4, 2));
    m.layers.push_back(conv(32, 3, 1));
    m.layers.push_back(conv(64, 3, 2));
    m.layers.push_back(conv(10, 4, 1));
    {
        LayerSpec flat;
        flat.kind = LayerKind::Flatten;
        m.layers.push_back(flat);
    }
    {
        LayerSpec dense;
        dense.kind = LayerKind::Dense;
        dense.features = classes;
        dense.activation = Activation::Softmax;
        m.layers.push_back(dense);
    }

    // size the parameter vectors, then fill with seeded He-scaled noise
    Shape cur = m.input_shape;
    SeededNormal rng(seed);
    for (auto& L : m.layers) {
        int64_t nw = expected_weight_count(L, cur);
        int64_t nb = expected_bias_count(L, cur);
        if (nw > 0) {
            int64_t fan_in = L.kind == LayerKind::Dense
                                 ? cur.dim(0)
                                 : static_cast<int64_t>(L.kernel_h) * L.kernel_w * cur.dim(2);
            float stddev = std::sqrt(2.0f / static_cast<float>(fan_in));
            L.weights.resize(static_cast<size_t>(nw));
            for (auto& w : L.weights) w = rng.next(stddev);
        }
        if (nb > 0) {
            L.biases.resize(static_cast<size_t>(nb));
            for (auto& b : L.biases) b = rng.uniform(0.0f, 0.05f);
        }
        cur = infer_output_shape(L, cur);
    }
    infer_shapes(m);
    return m;
}

}  // namespace snnforge
