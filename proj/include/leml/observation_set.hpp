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

#ifndef LEML_OBSERVATION_SET_HPP
#define LEML_OBSERVATION_SET_HPP

#include <cstddef>
#include <vector>

#include "leml/sparse_matrix.hpp"

namespace leml {

struct ObservationEntry {
    std::size_t inst;  // instance index i
    std::size_t label; // label index j
    double value;      // observed label value, 0 or 1
};

// The index set of (instance, label) cells whose label value is known,
// with the observed values aligned to it. Entries are stored sorted
// row-major (instance ascending, label ascending within an instance).
//
// Both a row-grouped and a column-grouped view are built once at
// construction: the gradient kernels walk the set instance-wise while the
// per-label H update walks it label-wise.
struct ObservationSet {
    std::size_t n_rows = 0; // number of instances n
    std::size_t n_cols = 0; // number of labels L

    // Parallel arrays over entries, row-major order.
    std::vector<std::size_t> inst;
    std::vector<std::size_t> label;
    std::vector<double> value;

    std::vector<std::size_t> row_ptr; // n_rows+1 offsets into the entry arrays

    // Column view: col_order lists entry ids grouped by label (instances
    // ascending within a label); col_ptr are L+1 offsets into col_order.
    std::vector<std::size_t> col_ptr;
    std::vector<std::size_t> col_order;

    ObservationSet() = default;

    std::size_t size() const { return inst.size(); }

    // Sorts entries row-major, builds both views. Throws
    // std::invalid_argument on duplicates, out-of-range indices, or values
    // outside {0, 1}.
    static ObservationSet from_entries(std::size_t n, std::size_t L, std::vector<ObservationEntry> entries);

    // Omega = the full n x L grid with values taken from Y (absent = 0).
    static ObservationSet full_grid(const SparseRowMatrix& Y);
};

} // namespace leml

#endif // LEML_OBSERVATION_SET_HPP
