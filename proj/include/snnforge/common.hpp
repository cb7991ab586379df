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

#include <stdexcept>
#include <string>
#include <string_view>

namespace snnforge {

inline constexpr std::string_view kToolName = "snnforge";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// Malformed or missing user input (files, shapes, flags). Maps to CLI exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A hardware resource constraint cannot be satisfied. Maps to CLI exit code 3.
struct ConstraintError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace snnforge
