/*
 * Copyright 2026 LEML Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LEML_ERROR_HPP
#define LEML_ERROR_HPP

#include <stdexcept>
#include <string>

namespace leml {

// Malformed input files (bad tokens, bad indices, version mismatch, ...).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values encountered during optimization.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace leml

#endif // LEML_ERROR_HPP
