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

#ifndef LEML_SOLVERS_HPP
#define LEML_SOLVERS_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace leml {

// Inner solvers. Both touch the problem only through callbacks over flat
// vectors; neither ever forms a matrix.

struct SolverReport {
    std::size_t iterations = 0;
    double final_residual_norm = 0; // CG: ||r||; TRON: ||grad||
    bool converged = false;
    std::size_t objective_evals = 0;
    bool breakdown = false;          // CG saw d^T (Hess) d <= 0: operator not PSD
    double tolerance_used = 0;       // the effective absolute threshold
    std::size_t hessian_vector_evals = 0;
};

using LinearOperator = std::function<void(const std::vector<double>&, std::vector<double>&)>;

// Linear conjugate gradient for the quadratic subproblem: starting from w,
// iterates r_0 = -grad(w_0) = -g0, d_0 = r_0, alpha_t = r^T r / d^T Hess d,
// w += alpha d, r -= alpha Hess d, beta = r+^T r+ / r^T r. Stops when
// ||r|| <= max(tol * ||r_0||, 1e-12). For a positive-definite system the
// exact solution is reached in at most dim iterations up to rounding.
//
// hv must apply a symmetric PSD operator. w is the start vector on entry
// and the solution on exit; g0 is the gradient at the start vector.
SolverReport cg_solve(const LinearOperator& hv, const std::vector<double>& g0, std::vector<double>& w,
                      double tol, std::size_t max_iter);

// Trust-region Newton for smooth convex g with PSD (generalized) Hessian.
// Inner Steihaug-CG truncated at the trust boundary; acceptance ratio
// rho = actual / predicted reduction; radius doubles when rho > 0.75 and
// the step hit the boundary, shrinks by 0.25 when rho < 0.25; initial
// radius ||grad(w0)||. Stops when ||grad|| <= tol * max(1, ||grad(w0)||).
//
// hv(s, out) applies the Hessian at the point last passed to grad.
// Throws NumericError if a callback produces a non-finite value.
SolverReport tron_minimize(const std::function<double(const std::vector<double>&)>& value,
                           const std::function<void(const std::vector<double>&, std::vector<double>&)>& grad,
                           const LinearOperator& hv, std::vector<double>& w, double tol,
                           std::size_t max_iter, std::size_t max_inner_iter = 25);

} // namespace leml

#endif // LEML_SOLVERS_HPP
