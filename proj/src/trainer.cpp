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

#include "leml/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "leml/error.hpp"
#include "leml/rng.hpp"
#include "leml/threading.hpp"
#include "leml/topk.hpp"

namespace leml {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// In-place lower Cholesky of a symmetric k x k matrix. Returns false when a
// pivot drops below tolerance (matrix not numerically PD).
bool cholesky(DenseMatrix& G) {
    const std::size_t k = G.rows;
    for (std::size_t c = 0; c < k; c++) {
        double diag = G.at(c, c);
        for (std::size_t t = 0; t < c; t++) diag -= G.at(c, t) * G.at(c, t);
        if (diag <= 1e-13) return false;
        const double lcc = std::sqrt(diag);
        G.at(c, c) = lcc;
        for (std::size_t r = c + 1; r < k; r++) {
            double v = G.at(r, c);
            for (std::size_t t = 0; t < c; t++) v -= G.at(r, t) * G.at(c, t);
            G.at(r, c) = v / lcc;
        }
    }
    return true;
}

// Solves L L^T x = b given the Cholesky factor in the lower triangle.
void cholesky_solve(const DenseMatrix& L, const double* b, double* x) {
    const std::size_t k = L.rows;
    for (std::size_t i = 0; i < k; i++) {
        double v = b[i];
        for (std::size_t t = 0; t < i; t++) v -= L.at(i, t) * x[t];
        x[i] = v / L.at(i, i);
    }
    for (std::size_t ii = k; ii-- > 0;) {
        double v = x[ii];
        for (std::size_t t = ii + 1; t < k; t++) v -= L.at(t, ii) * x[t];
        x[ii] = v / L.at(ii, ii);
    }
}

// One per-label subproblem for TRON: the observed rows of A and the encoded
// labels of one label column.
struct LabelProblem {
    const DenseMatrix& A;
    const ObservationSet& omega;
    std::size_t label;
    LossKind kind;
    double lambda;
    std::vector<double> curv; // cached at the last grad() point

    double value(const std::vector<double>& h) const {
        double f = 0;
        for (std::size_t p = omega.col_ptr[label]; p < omega.col_ptr[label + 1]; p++) {
            const std::size_t e = omega.col_order[p];
            const double* ai = A.row(omega.inst[e]);
            double b = 0;
            for (std::size_t r = 0; r < h.size(); r++) b += ai[r] * h[r];
            f += loss_value(kind, encode_label(kind, omega.value[e]), b);
        }
        return f + 0.5 * lambda * dot(h, h);
    }

    void grad(const std::vector<double>& h, std::vector<double>& g) {
        const std::size_t k = h.size();
        g.assign(k, 0.0);
        curv.clear();
        for (std::size_t p = omega.col_ptr[label]; p < omega.col_ptr[label + 1]; p++) {
            const std::size_t e = omega.col_order[p];
            const double* ai = A.row(omega.inst[e]);
            double b = 0;
            for (std::size_t r = 0; r < k; r++) b += ai[r] * h[r];
            const double a = encode_label(kind, omega.value[e]);
            const double lg = loss_grad(kind, a, b);
            curv.push_back(loss_curv(kind, a, b));
            for (std::size_t r = 0; r < k; r++) g[r] += lg * ai[r];
        }
        for (std::size_t r = 0; r < k; r++) g[r] += lambda * h[r];
    }

    void hv(const std::vector<double>& s, std::vector<double>& out) const {
        const std::size_t k = s.size();
        out.assign(k, 0.0);
        std::size_t c = 0;
        for (std::size_t p = omega.col_ptr[label]; p < omega.col_ptr[label + 1]; p++, c++) {
            const std::size_t e = omega.col_order[p];
            const double* ai = A.row(omega.inst[e]);
            double as = 0;
            for (std::size_t r = 0; r < k; r++) as += ai[r] * s[r];
            const double u = curv[c] * as;
            for (std::size_t r = 0; r < k; r++) out[r] += u * ai[r];
        }
        for (std::size_t r = 0; r < k; r++) out[r] += lambda * s[r];
    }
};

// Direct solve of (sum a a^T + lambda I) h = rhs for one label; CG fallback
// when the normal equations are singular (lambda = 0).
void solve_label_normal_equations(const DenseMatrix& A, const ObservationSet& omega, std::size_t j,
                                  double lambda, double* h_out, HStepInfo& info) {
    const std::size_t k = A.cols;
    DenseMatrix G(k, k);
    std::vector<double> rhs(k, 0.0);
    for (std::size_t p = omega.col_ptr[j]; p < omega.col_ptr[j + 1]; p++) {
        const std::size_t e = omega.col_order[p];
        const double* ai = A.row(omega.inst[e]);
        const double y = omega.value[e];
        for (std::size_t r = 0; r < k; r++) {
            rhs[r] += y * ai[r];
            for (std::size_t c = r; c < k; c++) G.at(r, c) += ai[r] * ai[c];
        }
    }
    for (std::size_t r = 0; r < k; r++) {
        G.at(r, r) += lambda;
        for (std::size_t c = 0; c < r; c++) G.at(r, c) = G.at(c, r);
    }
    DenseMatrix chol = G;
    if (cholesky(chol)) {
        cholesky_solve(chol, rhs.data(), h_out);
        return;
    }
    info.fallbacks++;
    std::vector<double> h(k, 0.0);
    std::vector<double> g0(k);
    for (std::size_t r = 0; r < k; r++) g0[r] = -rhs[r]; // grad at h = 0
    auto hv = [&](const std::vector<double>& v, std::vector<double>& out) {
        out.assign(k, 0.0);
        for (std::size_t r = 0; r < k; r++) {
            for (std::size_t c = 0; c < k; c++) out[r] += G.at(r, c) * v[c];
        }
    };
    SolverReport rep = cg_solve(hv, g0, h, 1e-10, 4 * k);
    info.inner_iterations += rep.iterations;
    std::copy(h.begin(), h.end(), h_out);
}

} // namespace

std::pair<DenseMatrix, DenseMatrix> init_factors(const TrainConfig& config, std::size_t d, std::size_t L) {
    if (config.k < 1 || config.k > std::min(d, L)) {
        throw std::invalid_argument("init_factors: rank k out of range");
    }
    const double scale =
        config.init_scale < 0 ? 1.0 / std::sqrt(static_cast<double>(config.k)) : config.init_scale;
    DenseMatrix W(d, config.k);
    DenseMatrix H(L, config.k);
    Rng rng(config.seed);
    for (double& v : H.values) v = rng.uniform(-scale, scale);
    return {std::move(W), std::move(H)};
}

DenseMatrix update_h(const DenseMatrix& W, const SparseRowMatrix& X, const ObservationSet& omega,
                     LossKind kind, double lambda, const TrainConfig& config, const DenseMatrix& H_prev,
                     HStepInfo* info) {
    const std::size_t k = W.cols;
    const std::size_t L = omega.n_cols;
    if (H_prev.rows != L || H_prev.cols != k) throw std::invalid_argument("update_h: H_prev shape mismatch");
    HStepInfo local;
    DenseMatrix A = dense_spmm(X, W);
    DenseMatrix H(L, k);

    const int nt = num_threads();
    std::vector<HStepInfo> infos((std::size_t)std::max(nt, 1));
#pragma omp parallel num_threads(nt) if (nt > 1)
    {
#ifdef _OPENMP
        HStepInfo& my = infos[(std::size_t)omp_get_thread_num()];
#else
        HStepInfo& my = infos[0];
#endif
#pragma omp for schedule(dynamic, 16)
        for (long long jj = 0; jj < (long long)L; jj++) {
            const std::size_t j = (std::size_t)jj;
            if (omega.col_ptr[j] == omega.col_ptr[j + 1]) {
                my.labels_without_observations++;
                continue; // regularized minimizer is h_j = 0
            }
            if (kind == LossKind::squared) {
                solve_label_normal_equations(A, omega, j, lambda, H.row(j), my);
            } else {
                LabelProblem prob{A, omega, j, kind, lambda, {}};
                std::vector<double> h(H_prev.row(j), H_prev.row(j) + k);
                SolverReport rep = tron_minimize(
                    [&](const std::vector<double>& v) { return prob.value(v); },
                    [&](const std::vector<double>& v, std::vector<double>& g) { prob.grad(v, g); },
                    [&](const std::vector<double>& v, std::vector<double>& out) { prob.hv(v, out); }, h,
                    config.tron_tol, config.inner_max_iter, config.inner_max_iter);
                my.inner_iterations += rep.iterations;
                my.converged = my.converged && rep.converged;
                std::copy(h.begin(), h.end(), H.row(j));
            }
        }
    }
    for (const HStepInfo& part : infos) {
        local.labels_without_observations += part.labels_without_observations;
        local.fallbacks += part.fallbacks;
        local.inner_iterations += part.inner_iterations;
        local.converged = local.converged && part.converged;
    }
    if (info != nullptr) *info = local;
    return H;
}

DenseMatrix update_h_full_squared(const DenseMatrix& W, const SparseRowMatrix& X, const SparseRowMatrix& Y,
                                  double lambda, const TrainConfig& config, HStepInfo* info) {
    (void)config;
    HStepInfo local;
    const std::size_t k = W.cols;
    DenseMatrix A = dense_spmm(X, W);
    DenseMatrix G;
    dense_mm_tn(A, A, G); // A^T A, shared by every label
    for (std::size_t r = 0; r < k; r++) G.at(r, r) += lambda;
    DenseMatrix R = transpose_spmm(Y, A); // L x k; row j = A^T y_j
    DenseMatrix H(Y.cols, k);
    DenseMatrix chol = G;
    const bool pd = cholesky(chol);
    if (!pd) local.fallbacks = Y.cols;
    for (std::size_t j = 0; j < Y.cols; j++) {
        if (pd) {
            cholesky_solve(chol, R.row(j), H.row(j));
        } else {
            std::vector<double> h(k, 0.0), g0(k);
            for (std::size_t r = 0; r < k; r++) g0[r] = -R.at(j, r);
            auto hv = [&](const std::vector<double>& v, std::vector<double>& out) {
                out.assign(k, 0.0);
                for (std::size_t r = 0; r < k; r++) {
                    for (std::size_t c = 0; c < k; c++) out[r] += G.at(r, c) * v[c];
                }
            };
            SolverReport rep = cg_solve(hv, g0, h, 1e-10, 4 * k);
            local.inner_iterations += rep.iterations;
            std::copy(h.begin(), h.end(), H.row(j));
        }
    }
    if (info != nullptr) *info = local;
    return H;
}

DenseMatrix update_w(const DenseMatrix& H, const SparseRowMatrix& X, const Labels& labels, LossKind kind,
                     double lambda, const TrainConfig& config, const DenseMatrix& W_prev,
                     SolverReport* report) {
    const std::size_t d = X.cols;
    const std::size_t k = H.cols;
    if (W_prev.rows != d || W_prev.cols != k) throw std::invalid_argument("update_w: W_prev shape mismatch");

    std::vector<double> w = W_prev.values;
    SolverReport rep;
    if (kind == LossKind::squared) {
        WSubproblem prob = labels.full ? WSubproblem(X, H, labels.Y, lambda)
                                       : WSubproblem(X, H, labels.omega, LossKind::squared, lambda);
        std::vector<double> g0;
        prob.grad(w, g0);
        rep = cg_solve([&](const std::vector<double>& v, std::vector<double>& out) { prob.hv(v, out); }, g0,
                       w, config.cg_tol, config.inner_max_iter);
    } else {
        if (labels.full) {
            throw std::invalid_argument("update_w: full-label fast path requires the squared loss");
        }
        WSubproblem prob(X, H, labels.omega, kind, lambda);
        rep = tron_minimize([&](const std::vector<double>& v) { return prob.value(v); },
                            [&](const std::vector<double>& v, std::vector<double>& g) { prob.grad(v, g); },
                            [&](const std::vector<double>& v, std::vector<double>& out) { prob.hv(v, out); },
                            w, config.tron_tol, config.inner_max_iter, config.inner_max_iter);
    }
    if (report != nullptr) *report = rep;
    DenseMatrix W(d, k);
    W.values = std::move(w);
    return W;
}

namespace {

// J(W, H) with full labels and squared loss without touching the n*L grid:
// ||Y - XWH^T||^2 = ||Y||^2 - 2 <XW, YH> + <(XW)^T XW, H^T H>.
double full_squared_objective(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                              const SparseRowMatrix& Y, double lambda) {
    DenseMatrix A = dense_spmm(X, W);
    DenseMatrix B = dense_spmm(Y, H);
    double ynorm = 0;
    for (double v : Y.values) ynorm += v * v;
    double cross = 0;
    for (std::size_t t = 0; t < A.size(); t++) cross += A.values[t] * B.values[t];
    DenseMatrix AtA, HtH;
    dense_mm_tn(A, A, AtA);
    dense_mm_tn(H, H, HtH);
    double quad = 0;
    for (std::size_t t = 0; t < AtA.size(); t++) quad += AtA.values[t] * HtH.values[t];
    return 0.5 * (ynorm - 2.0 * cross + quad) + 0.5 * lambda * (frob_norm_sq(W) + frob_norm_sq(H));
}

} // namespace

std::pair<FactorModel, TrainTrace> train(const TrainConfig& config, const SparseRowMatrix& X,
                                         const Labels& labels) {
    const std::size_t d = X.cols;
    const std::size_t L = labels.label_count();
    if (labels.instances() != X.rows) throw std::invalid_argument("train: X/label instance count mismatch");
    if (config.outer_iters < 1) throw std::invalid_argument("train: outer_iters must be >= 1");
    if (config.lambda < 0) throw std::invalid_argument("train: lambda must be >= 0");
    if (config.k < 1 || config.k > std::min(d, L)) {
        throw std::invalid_argument("train: rank k must satisfy 1 <= k <= min(d, L)");
    }

    bool use_full = false;
    switch (config.mode) {
        case TrainMode::auto_detect:
            use_full = labels.full && config.loss == LossKind::squared;
            break;
        case TrainMode::full:
            if (!labels.full) throw std::invalid_argument("train: mode=full requires full labels");
            if (config.loss != LossKind::squared) {
                throw std::invalid_argument("train: mode=full requires the squared loss");
            }
            use_full = true;
            break;
        case TrainMode::missing:
            use_full = false;
            break;
    }

    // mode=missing over full labels runs the observed-entry path on the full grid.
    Labels effective;
    if (use_full) {
        effective = Labels::full_labels(labels.Y);
    } else if (labels.full) {
        effective = Labels::observed(ObservationSet::full_grid(labels.Y));
    } else {
        effective = Labels::observed(labels.omega);
    }

    auto [W, H] = init_factors(config, d, L);

    TrainTrace trace;
    trace.degenerate_init = config.init_scale == 0.0;

    Workspace ws;
    auto objective = [&](const DenseMatrix& Wc, const DenseMatrix& Hc) {
        return use_full ? full_squared_objective(Wc, Hc, X, effective.Y, config.lambda)
                        : objective_value(Wc, Hc, X, effective.omega, config.loss, config.lambda, ws);
    };

    trace.initial_objective = objective(W, H);
    for (std::size_t t = 0; t < config.outer_iters; t++) {
        auto t0 = std::chrono::steady_clock::now();
        SolverReport wrep;
        W = update_w(H, X, effective, config.loss, config.lambda, config, W, &wrep);
        HalfStepRecord wrec;
        wrec.phase = 'W';
        wrec.objective = objective(W, H);
        wrec.seconds = seconds_since(t0);
        wrec.inner_iterations = wrep.iterations;
        wrec.converged = wrep.converged;
        trace.steps.push_back(wrec);
        if (!std::isfinite(wrec.objective)) throw NumericError("train: objective became non-finite");

        t0 = std::chrono::steady_clock::now();
        HStepInfo hinfo;
        if (use_full) {
            H = update_h_full_squared(W, X, effective.Y, config.lambda, config, &hinfo);
        } else {
            H = update_h(W, X, effective.omega, config.loss, config.lambda, config, H, &hinfo);
        }
        HalfStepRecord hrec;
        hrec.phase = 'H';
        hrec.objective = objective(W, H);
        hrec.seconds = seconds_since(t0);
        hrec.inner_iterations = hinfo.inner_iterations;
        hrec.converged = hinfo.converged;
        hrec.fallbacks = hinfo.fallbacks;
        trace.steps.push_back(hrec);
        trace.labels_without_observations = hinfo.labels_without_observations;
        if (!std::isfinite(hrec.objective)) throw NumericError("train: objective became non-finite");
    }

    FactorModel model;
    model.W = std::move(W);
    model.H = std::move(H);
    model.kind = config.loss;
    model.lambda = config.lambda;
    TrainTrace out_trace = std::move(trace);
    return {std::move(model), std::move(out_trace)};
}

DenseMatrix predict_scores(const FactorModel& model, const SparseRowMatrix& Xtest) {
    if (Xtest.cols != model.W.rows) throw std::invalid_argument("predict_scores: feature dim mismatch");
    DenseMatrix A = dense_spmm(Xtest, model.W);
    DenseMatrix scores;
    dense_mm_nt(A, model.H, scores);
    return scores;
}

std::vector<std::vector<std::size_t>> predict_topk(const FactorModel& model, const SparseRowMatrix& Xtest,
                                                   std::size_t K) {
    const std::size_t L = model.H.rows;
    if (K < 1 || K > L) throw std::invalid_argument("predict_topk: K out of range");
    DenseMatrix scores = predict_scores(model, Xtest);
    std::vector<std::vector<std::size_t>> out(scores.rows);
    for (std::size_t i = 0; i < scores.rows; i++) {
        out[i] = top_k_indices(scores.row(i), L, K);
    }
    return out;
}

} // namespace leml
