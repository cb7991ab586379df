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

#include "snnforge/model.hpp"

namespace snnforge {

/**
 * A model reduced to the layer kinds the neuromorphic backend accepts:
 * Dense, Flatten, Reshape, ZeroPad2D, AvgPool2D, DepthwiseConv2D, Conv1D
 * and Conv2D. Produced by parse(); construction validates the whitelist.
 */
struct ParsedModel {
    DnnModel model;
};

bool is_backend_supported(LayerKind k);

struct ParseOptions {
    // Fold BatchNorm statistics into the preceding layer's parameters.
    // When false the layer is dropped outright, which changes inference
    // results; useful only for fidelity experiments.
    bool fold_batchnorm = true;
};

/**
 * Inference-stage canonicalization:
 *  - Dropout layers are removed (exact at inference).
 *  - BatchNorm is folded into the preceding weighted layer
 *    (w' = w*gamma/sqrt(var+eps), b' = (b-mean)*gamma/sqrt(var+eps) + beta).
 *  - MaxPool2D becomes AvgPool2D with the same kernel and stride.
 *  - "same" padding on 2-d convolutions becomes an explicit ZeroPad2D
 *    followed by a valid convolution.
 * Output shapes are re-inferred and must equal the originals. Idempotent.
 * Throws InputError naming any layer that has no rewrite rule.
 */
ParsedModel parse(const DnnModel& model, const ParseOptions& options = {});

}  // namespace snnforge
