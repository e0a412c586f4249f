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

#ifndef LEML_CLOSED_FORM_HPP
#define LEML_CLOSED_FORM_HPP

#include <cstddef>
#include <vector>

#include "leml/dense_matrix.hpp"
#include "leml/sparse_matrix.hpp"

namespace leml {

// Exact solutions for the unregularized squared loss with full labels,
// used as oracle and baseline. Desk-scale only: everything here is dense.

struct ThinSvd {
    DenseMatrix U;         // m x r, orthonormal columns
    std::vector<double> S; // r singular values, descending, > tol
    DenseMatrix V;         // n x r, orthonormal columns

    std::size_t rank() const { return S.size(); }
};

// Thin SVD by one-sided Jacobi rotations. Keeps singular values
// > rank_tol * sigma_max. Throws std::invalid_argument on non-finite input.
ThinSvd thin_svd(const DenseMatrix& A, double rank_tol = 1e-12);

// argmin_{rank(Z) <= k} ||Y - XZ||_F^2 = V_X Sigma_X^{-1} M_k with
// X = U_X Sigma_X V_X^T thin SVD and M_k the rank-k truncated SVD of
// M = U_X^T Y. Rank-deficient X is handled with pseudo-inverse semantics.
// If truncation_tie is non-null it is set when sigma_k ~= sigma_{k+1} of M,
// in which case the minimizer is not unique.
DenseMatrix closed_form_squared_full(const SparseRowMatrix& X, const SparseRowMatrix& Y, std::size_t k,
                                     bool* truncation_tie = nullptr);

// The same minimizer through the label-compression formula
// H_C = V_k[Y^T X Xdag Y], W_C = Xdag Y H_C, Z = W_C H_C^T — an independent
// code path kept for cross-checking the closed form.
DenseMatrix cplst_solution(const SparseRowMatrix& X, const SparseRowMatrix& Y, std::size_t k);

} // namespace leml

#endif // LEML_CLOSED_FORM_HPP
