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

#ifndef LEML_KERNELS_HPP
#define LEML_KERNELS_HPP

#include <vector>

#include "leml/dense_matrix.hpp"
#include "leml/observation_set.hpp"
#include "leml/sparse_matrix.hpp"

namespace leml {

// The handful of structured products everything else composes. All are pure
// functions of their inputs; in reference mode (num_threads() == 1) results
// are bit-deterministic.

// out = X * S, X sparse n x d, S dense d x k. O(nnz(X) * k).
void dense_spmm(const SparseRowMatrix& X, const DenseMatrix& S, DenseMatrix& out);
DenseMatrix dense_spmm(const SparseRowMatrix& X, const DenseMatrix& S);

// out = X^T * G, X sparse n x d, G dense n x k. O(nnz(X) * k).
void transpose_spmm(const SparseRowMatrix& X, const DenseMatrix& G, DenseMatrix& out);
DenseMatrix transpose_spmm(const SparseRowMatrix& X, const DenseMatrix& G);

// scores[e] = <A[i_e,:], H[j_e,:]> for each entry e of omega, in entry
// order. O(|Omega| * k).
void omega_scores(const DenseMatrix& A, const DenseMatrix& H, const ObservationSet& omega,
                  std::vector<double>& out);
std::vector<double> omega_scores(const DenseMatrix& A, const DenseMatrix& H, const ObservationSet& omega);

// out = D * H where D is the n x L sparse matrix supported on omega with
// values d (aligned to entry order). out[i,:] = sum_{j:(i,j) in Omega}
// D_ij * H[j,:]. O(|Omega| * k).
void omega_scatter_mm(const std::vector<double>& d, const DenseMatrix& H, const ObservationSet& omega,
                      DenseMatrix& out);
DenseMatrix omega_scatter_mm(const std::vector<double>& d, const DenseMatrix& H, const ObservationSet& omega);

// Dense helpers (row-major, plain loops).
void dense_mm(const DenseMatrix& A, const DenseMatrix& B, DenseMatrix& out);    // A * B
void dense_mm_nt(const DenseMatrix& A, const DenseMatrix& B, DenseMatrix& out); // A * B^T
void dense_mm_tn(const DenseMatrix& A, const DenseMatrix& B, DenseMatrix& out); // A^T * B

double frob_norm_sq(const DenseMatrix& A);
double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);

} // namespace leml

#endif // LEML_KERNELS_HPP
