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

#ifndef LEML_OBJECTIVE_HPP
#define LEML_OBJECTIVE_HPP

#include <vector>

#include "leml/kernels.hpp"
#include "leml/loss.hpp"

namespace leml {

// The regularized factorized objective
//
//   J(W, H) = sum_{(i,j) in Omega} l(Y_ij, x_i^T W h_j)
//             + lambda/2 (||W||_F^2 + ||H||_F^2)
//
// and the structure-exploiting gradient / Hessian-vector kernels for the
// W subproblem g(w), w = vec(W) flattened row-major. The gradient is
// vec(X^T D H) + lambda w with D supported on Omega, D_ij = l'(Y_ij,
// a_i^T h_j); the Hessian-vector product is vec(X^T U H) + lambda s with
// U_ij = l''(Y_ij, a_i^T h_j) b_i^T h_j, A = XW, B = XS. Both cost
// O((nnz(X) + |Omega| + d) k).
//
// With full labels and the squared loss the same quantities reduce to
// vec(X^T (A H^T H - Y H)) + lambda w and vec(X^T (X S H^T H)) + lambda s,
// costing O((nnz(X) + nnz(Y)) k + (n + L) k^2) regardless of n*L.

// Scratch buffers reused across inner-solver iterations. One workspace per
// caller; never share one across concurrent subproblems.
struct Workspace {
    DenseMatrix A;   // n x k
    DenseMatrix B;   // n x k
    DenseMatrix G;   // n x k scatter target
    DenseMatrix XtG; // d x k
    DenseMatrix M;   // k x k
    std::vector<double> scores;
    std::vector<double> scores_b;
    std::vector<double> coeff;
};

double objective_value(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                       const ObservationSet& omega, LossKind kind, double lambda, Workspace& ws);

void grad_w_missing(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                    const ObservationSet& omega, LossKind kind, double lambda, Workspace& ws,
                    std::vector<double>& out);

void hv_w_missing(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                  const ObservationSet& omega, LossKind kind, double lambda, const DenseMatrix& S,
                  Workspace& ws, std::vector<double>& out);

void grad_w_full_squared(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                         const SparseRowMatrix& Y, double lambda, Workspace& ws, std::vector<double>& out);

void hv_w_full_squared(const DenseMatrix& H, const SparseRowMatrix& X, const DenseMatrix& S,
                       double lambda, Workspace& ws, std::vector<double>& out);

// Reference gradient that materializes every virtual feature
// xtilde_ij = h_j (x) x_i and accumulates l' xtilde_ij + lambda w directly.
// O(|Omega| d k); small instances only.
std::vector<double> naive_grad_w(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                                 const ObservationSet& omega, LossKind kind, double lambda);

// Allocating conveniences.
double objective_value(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                       const ObservationSet& omega, LossKind kind, double lambda);
std::vector<double> grad_w_missing(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                                   const ObservationSet& omega, LossKind kind, double lambda);
std::vector<double> hv_w_missing(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                                 const ObservationSet& omega, LossKind kind, double lambda,
                                 const DenseMatrix& S);
std::vector<double> grad_w_full_squared(const DenseMatrix& W, const DenseMatrix& H,
                                        const SparseRowMatrix& X, const SparseRowMatrix& Y, double lambda);
std::vector<double> hv_w_full_squared(const DenseMatrix& H, const SparseRowMatrix& X, const DenseMatrix& S,
                                      double lambda);

// One W subproblem min_w g(w) with H fixed, wired for the inner solvers:
// value/grad/hv over flat row-major vectors, buffers reused across calls.
// grad() caches the curvature terms at its argument; hv() evaluates the
// model Hessian at the last grad() point (the trust-region contract).
class WSubproblem {
  public:
    // Missing-label path over omega (any loss).
    WSubproblem(const SparseRowMatrix& X, const DenseMatrix& H, const ObservationSet& omega,
                LossKind kind, double lambda);
    // Full-label squared-loss fast path.
    WSubproblem(const SparseRowMatrix& X, const DenseMatrix& H, const SparseRowMatrix& Y, double lambda);

    std::size_t dim() const { return d_ * k_; }

    double value(const std::vector<double>& w);
    void grad(const std::vector<double>& w, std::vector<double>& out);
    void hv(const std::vector<double>& s, std::vector<double>& out);

  private:
    const SparseRowMatrix& X_;
    const DenseMatrix& H_;
    const ObservationSet* omega_ = nullptr;
    const SparseRowMatrix* Y_ = nullptr;
    LossKind kind_;
    double lambda_;
    std::size_t d_, k_;
    Workspace ws_;
    DenseMatrix Wbuf_, Sbuf_;
    std::vector<double> curv_; // l'' at the last grad() point, per entry
    double y_norm_sq_ = 0;     // ||Y||_F^2, full path only
};

} // namespace leml

#endif // LEML_OBJECTIVE_HPP
