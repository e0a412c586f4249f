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

#include "leml/solvers.hpp"

#include <algorithm>
#include <cmath>

#include "leml/error.hpp"
#include "leml/kernels.hpp"

namespace leml {

namespace {

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < y.size(); i++) y[i] += a * x[i];
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

// Positive root of ||s + tau d|| = radius.
double boundary_step(const std::vector<double>& s, const std::vector<double>& d, double radius) {
    const double dd = dot(d, d);
    const double sd = dot(s, d);
    const double ss = dot(s, s);
    const double disc = sd * sd + dd * (radius * radius - ss);
    return (-sd + std::sqrt(disc > 0 ? disc : 0)) / dd;
}

} // namespace

SolverReport cg_solve(const LinearOperator& hv, const std::vector<double>& g0, std::vector<double>& w,
                      double tol, std::size_t max_iter) {
    const std::size_t m = w.size();
    SolverReport rep;
    std::vector<double> r(m), d(m), hd(m);
    for (std::size_t i = 0; i < m; i++) r[i] = -g0[i];
    double rr = dot(r, r);
    const double threshold = std::max(tol * std::sqrt(rr), 1e-12);
    rep.tolerance_used = threshold;
    if (std::sqrt(rr) <= threshold) {
        rep.converged = true;
        rep.final_residual_norm = std::sqrt(rr);
        return rep;
    }
    d = r;
    while (rep.iterations < max_iter) {
        hv(d, hd);
        rep.hessian_vector_evals++;
        const double dhd = dot(d, hd);
        if (dhd <= 0) {
            rep.breakdown = true;
            break;
        }
        const double alpha = rr / dhd;
        axpy(alpha, d, w);
        axpy(-alpha, hd, r);
        rep.iterations++;
        const double rr_new = dot(r, r);
        if (std::sqrt(rr_new) <= threshold) {
            rr = rr_new;
            rep.converged = true;
            break;
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < m; i++) d[i] = r[i] + beta * d[i];
    }
    rep.final_residual_norm = std::sqrt(rr);
    return rep;
}

SolverReport tron_minimize(const std::function<double(const std::vector<double>&)>& value,
                           const std::function<void(const std::vector<double>&, std::vector<double>&)>& grad,
                           const LinearOperator& hv, std::vector<double>& w, double tol,
                           std::size_t max_iter, std::size_t max_inner_iter) {
    const std::size_t m = w.size();
    SolverReport rep;

    double f = value(w);
    rep.objective_evals++;
    std::vector<double> g(m);
    grad(w, g);
    if (!std::isfinite(f) || !all_finite(g)) {
        throw NumericError("tron: non-finite objective or gradient at start");
    }
    const double g0_norm = norm2(g);
    const double threshold = tol * std::max(1.0, g0_norm);
    rep.tolerance_used = threshold;
    rep.final_residual_norm = g0_norm;
    if (g0_norm <= threshold) {
        rep.converged = true;
        return rep;
    }

    double radius = g0_norm;
    std::vector<double> s(m), r(m), d(m), hd(m), w_trial(m);

    while (rep.iterations < max_iter) {
        // Steihaug CG: model q(s) = g^T s + s^T H s / 2, ||s|| <= radius.
        std::fill(s.begin(), s.end(), 0.0);
        for (std::size_t i = 0; i < m; i++) r[i] = -g[i];
        d = r;
        double rr = dot(r, r);
        const double inner_threshold = 0.1 * std::sqrt(rr);
        bool hit_boundary = false;
        for (std::size_t inner = 0; inner < max_inner_iter; inner++) {
            hv(d, hd);
            rep.hessian_vector_evals++;
            const double dhd = dot(d, hd);
            if (dhd <= 0) {
                // Zero-curvature direction: ride it to the boundary.
                axpy(boundary_step(s, d, radius), d, s);
                hit_boundary = true;
                break;
            }
            const double alpha = rr / dhd;
            double s_next_norm_sq = 0;
            for (std::size_t i = 0; i < m; i++) {
                const double v = s[i] + alpha * d[i];
                s_next_norm_sq += v * v;
            }
            if (s_next_norm_sq >= radius * radius) {
                axpy(boundary_step(s, d, radius), d, s);
                hit_boundary = true;
                break;
            }
            axpy(alpha, d, s);
            axpy(-alpha, hd, r);
            const double rr_new = dot(r, r);
            if (std::sqrt(rr_new) <= inner_threshold) break;
            const double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t i = 0; i < m; i++) d[i] = r[i] + beta * d[i];
        }

        // Predicted reduction -q(s) = -(g^T s + s^T H s / 2).
        hv(s, hd);
        rep.hessian_vector_evals++;
        const double predicted = -(dot(g, s) + 0.5 * dot(s, hd));
        for (std::size_t i = 0; i < m; i++) w_trial[i] = w[i] + s[i];
        const double f_trial = value(w_trial);
        rep.objective_evals++;
        if (!std::isfinite(f_trial)) {
            throw NumericError("tron: non-finite objective at trial point");
        }
        const double actual = f - f_trial;
        const double rho = predicted > 0 ? actual / predicted : -1.0;

        if (rho > 1e-4 && actual > 0) {
            w = w_trial;
            f = f_trial;
            grad(w, g);
            if (!all_finite(g)) throw NumericError("tron: non-finite gradient");
            rep.iterations++;
            const double gnorm = norm2(g);
            rep.final_residual_norm = gnorm;
            if (gnorm <= threshold) {
                rep.converged = true;
                return rep;
            }
        } else {
            rep.iterations++;
        }

        if (rho < 0.25) {
            radius *= 0.25;
        } else if (rho > 0.75 && hit_boundary) {
            radius *= 2.0;
        }
        if (radius < 1e-14) break; // stalled: no acceptable step exists at this scale
    }
    return rep;
}

} // namespace leml
