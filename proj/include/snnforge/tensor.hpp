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
#include <initializer_list>
#include <string>
#include <vector>

namespace snnforge {

/**
 * Tensor shape. Rank 1 is a flat vector (n), rank 2 a sequence (len, channels),
 * rank 3 an image (h, w, channels). Data is always row-major with the channel
 * dimension fastest.
 */
class Shape {
public:
    Shape() = default;
    explicit Shape(std::vector<int> dims) : dims_(std::move(dims)) {}
    Shape(std::initializer_list<int> dims) : dims_(dims) {}

    int rank() const { return static_cast<int>(dims_.size()); }
    int dim(int i) const { return dims_[static_cast<size_t>(i)]; }
    const std::vector<int>& dims() const { return dims_; }
    bool empty() const { return dims_.empty(); }

    int64_t count() const {
        if (dims_.empty()) return 0;
        int64_t n = 1;
        for (int d : dims_) n *= d;
        return n;
    }

    std::string str() const;  // e.g. "28x28x1"

    bool operator==(const Shape&) const = default;

private:
    std::vector<int> dims_;
};

/// Dense float tensor with row-major storage.
struct Tensor {
    Shape shape;
    std::vector<float> data;

    Tensor() = default;
    explicit Tensor(Shape s) : shape(std::move(s)), data(static_cast<size_t>(shape.count()), 0.0f) {}

    // rank-3 accessors (y, x, c)
    float& at(int y, int x, int c) {
        return data[static_cast<size_t>((y * shape.dim(1) + x) * shape.dim(2) + c)];
    }
    float at(int y, int x, int c) const {
        return data[static_cast<size_t>((y * shape.dim(1) + x) * shape.dim(2) + c)];
    }
    // rank-2 accessors (i, c)
    float& at2(int i, int c) { return data[static_cast<size_t>(i * shape.dim(1) + c)]; }
    float at2(int i, int c) const { return data[static_cast<size_t>(i * shape.dim(1) + c)]; }

    int64_t size() const { return static_cast<int64_t>(data.size()); }
};

/// Index of the largest element; ties resolve to the lowest index.
int argmax(const std::vector<float>& v);

Shape parse_shape(const std::string& spec);  // "28x28x1" -> Shape

}  // namespace snnforge
