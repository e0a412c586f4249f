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

#ifndef LEML_TOPK_HPP
#define LEML_TOPK_HPP

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

namespace leml {

// Indices of the K largest scores, descending. Ties break by ascending
// index so selection is deterministic.
inline std::vector<std::size_t> top_k_indices(const double* scores, std::size_t L, std::size_t K) {
    std::vector<std::size_t> idx(L);
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + K, idx.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
    });
    idx.resize(K);
    return idx;
}

} // namespace leml

#endif // LEML_TOPK_HPP
