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
#include "snnforge/tensor.hpp"

#include <sstream>

#include "snnforge/common.hpp"

namespace snnforge {

std::string Shape::str() const {
    std::string s;
    for (size_t i = 0; i < dims_.size(); ++i) {
        if (i) s += 'x';
        s += std::to_string(dims_[i]);
    }
    return s;
}

int argmax(const std::vector<float>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i) {
        if (v[static_cast<size_t>(i)] > v[static_cast<size_t>(best)]) best = i;
    }
    return best;
}

Shape parse_shape(const std::string& spec) {
    std::vector<int> dims;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, 'x')) {
        try {
            dims.push_back(std::stoi(part));
        } catch (const std::exception&) {
            throw InputError("invalid shape spec '" + spec + "'");
        }
        if (dims.back() <= 0) throw InputError("shape dimensions must be positive: '" + spec + "'");
    }
    if (dims.empty() || dims.size() > 3) throw InputError("shape must have 1 to 3 dimensions: '" + spec + "'");
    return Shape(dims);
}

}  // namespace snnforge
