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

#ifndef LEML_SPARSE_MATRIX_HPP
#define LEML_SPARSE_MATRIX_HPP

#include <cstddef>
#include <tuple>
#include <vector>

#include "leml/dense_matrix.hpp"

namespace leml {

// Compressed row-major sparse matrix. Houses the feature matrix X (n x d)
// and the full label matrix Y (n x L).
//
// Invariants: row_ptr is non-decreasing with row_ptr[0] = 0 and
// row_ptr[rows] = nnz; within each row col_idx is strictly increasing and
// < cols; duplicate (i,j) pairs are forbidden.
struct SparseRowMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr; // rows+1
    std::vector<std::size_t> col_idx; // nnz
    std::vector<double> values;       // nnz

    SparseRowMatrix() : row_ptr(1, 0) {}
    SparseRowMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), row_ptr(r + 1, 0) {}

    std::size_t nnz() const { return col_idx.size(); }

    // Builds from (i, j, v) triplets; sorts row-major. Throws
    // std::invalid_argument on out-of-range indices or duplicate pairs.
    static SparseRowMatrix from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<std::tuple<std::size_t, std::size_t, double>> entries);

    static SparseRowMatrix identity(std::size_t n);

    DenseMatrix to_dense() const;

    // Checks the CSR invariants above; throws std::invalid_argument.
    void validate() const;
};

} // namespace leml

#endif // LEML_SPARSE_MATRIX_HPP
