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

#ifndef LEML_DENSE_MATRIX_HPP
#define LEML_DENSE_MATRIX_HPP

#include <cstddef>
#include <vector>

namespace leml {

// Row-major dense matrix of doubles. Houses the factors W (d x k), H (L x k)
// and the intermediates A = XW, B, S, M.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values; // rows*cols, row-major

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), values(r * c, fill) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; i++) m.at(i, i) = 1.0;
        return m;
    }

    double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }

    double* row(std::size_t i) { return values.data() + i * cols; }
    const double* row(std::size_t i) const { return values.data() + i * cols; }

    std::size_t size() const { return rows * cols; }

    void set_zero() { values.assign(rows * cols, 0.0); }

    void resize(std::size_t r, std::size_t c) {
        rows = r;
        cols = c;
        values.assign(r * c, 0.0);
    }
};

} // namespace leml

#endif // LEML_DENSE_MATRIX_HPP
