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

#include "leml/objective.hpp"

#include <algorithm>
#include <stdexcept>

namespace leml {

namespace {

void check_shapes(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                  const ObservationSet& omega) {
    if (W.rows != X.cols || W.cols != H.cols) {
        throw std::invalid_argument("objective: W shape mismatch");
    }
    if (omega.n_rows != X.rows || omega.n_cols != H.rows) {
        throw std::invalid_argument("objective: omega shape mismatch");
    }
}

// out = vec(XtG) + lambda * vec(P), flattened row-major.
void add_regularized(const DenseMatrix& XtG, const DenseMatrix& P, double lambda,
                     std::vector<double>& out) {
    out.resize(XtG.size());
    for (std::size_t t = 0; t < out.size(); t++) {
        out[t] = XtG.values[t] + lambda * P.values[t];
    }
}

} // namespace

double objective_value(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                       const ObservationSet& omega, LossKind kind, double lambda, Workspace& ws) {
    check_shapes(W, H, X, omega);
    dense_spmm(X, W, ws.A);
    omega_scores(ws.A, H, omega, ws.scores);
    double loss = 0;
    for (std::size_t e = 0; e < omega.size(); e++) {
        loss += loss_value(kind, encode_label(kind, omega.value[e]), ws.scores[e]);
    }
    return loss + 0.5 * lambda * (frob_norm_sq(W) + frob_norm_sq(H));
}

void grad_w_missing(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                    const ObservationSet& omega, LossKind kind, double lambda, Workspace& ws,
                    std::vector<double>& out) {
    check_shapes(W, H, X, omega);
    dense_spmm(X, W, ws.A);
    omega_scores(ws.A, H, omega, ws.scores);
    ws.coeff.resize(omega.size());
    for (std::size_t e = 0; e < omega.size(); e++) {
        ws.coeff[e] = loss_grad(kind, encode_label(kind, omega.value[e]), ws.scores[e]);
    }
    omega_scatter_mm(ws.coeff, H, omega, ws.G);
    transpose_spmm(X, ws.G, ws.XtG);
    add_regularized(ws.XtG, W, lambda, out);
}

void hv_w_missing(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                  const ObservationSet& omega, LossKind kind, double lambda, const DenseMatrix& S,
                  Workspace& ws, std::vector<double>& out) {
    check_shapes(W, H, X, omega);
    if (S.rows != W.rows || S.cols != W.cols) {
        throw std::invalid_argument("hv_w_missing: S shape mismatch");
    }
    dense_spmm(X, W, ws.A);
    dense_spmm(X, S, ws.B);
    omega_scores(ws.A, H, omega, ws.scores);
    omega_scores(ws.B, H, omega, ws.scores_b);
    ws.coeff.resize(omega.size());
    for (std::size_t e = 0; e < omega.size(); e++) {
        const double curv = loss_curv(kind, encode_label(kind, omega.value[e]), ws.scores[e]);
        ws.coeff[e] = curv * ws.scores_b[e];
    }
    omega_scatter_mm(ws.coeff, H, omega, ws.G);
    transpose_spmm(X, ws.G, ws.XtG);
    add_regularized(ws.XtG, S, lambda, out);
}

void grad_w_full_squared(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                         const SparseRowMatrix& Y, double lambda, Workspace& ws, std::vector<double>& out) {
    if (W.rows != X.cols || W.cols != H.cols || Y.rows != X.rows || Y.cols != H.rows) {
        throw std::invalid_argument("grad_w_full_squared: shape mismatch");
    }
    dense_spmm(X, W, ws.A); // A = XW
    dense_spmm(Y, H, ws.B); // B = YH
    dense_mm_tn(H, H, ws.M);
    dense_mm(ws.A, ws.M, ws.G); // G = A M
    for (std::size_t t = 0; t < ws.G.size(); t++) ws.G.values[t] -= ws.B.values[t];
    transpose_spmm(X, ws.G, ws.XtG);
    add_regularized(ws.XtG, W, lambda, out);
}

void hv_w_full_squared(const DenseMatrix& H, const SparseRowMatrix& X, const DenseMatrix& S,
                       double lambda, Workspace& ws, std::vector<double>& out) {
    if (S.rows != X.cols || S.cols != H.cols) {
        throw std::invalid_argument("hv_w_full_squared: shape mismatch");
    }
    dense_spmm(X, S, ws.B); // B = XS
    dense_mm_tn(H, H, ws.M);
    dense_mm(ws.B, ws.M, ws.G);
    transpose_spmm(X, ws.G, ws.XtG);
    add_regularized(ws.XtG, S, lambda, out);
}

std::vector<double> naive_grad_w(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                                 const ObservationSet& omega, LossKind kind, double lambda) {
    check_shapes(W, H, X, omega);
    const std::size_t d = X.cols;
    const std::size_t k = H.cols;
    std::vector<double> out(d * k);
    for (std::size_t t = 0; t < out.size(); t++) out[t] = lambda * W.values[t];

    std::vector<double> xdense(d);
    std::vector<double> xtilde(d * k);
    for (std::size_t e = 0; e < omega.size(); e++) {
        const std::size_t i = omega.inst[e];
        const std::size_t j = omega.label[e];
        std::fill(xdense.begin(), xdense.end(), 0.0);
        for (std::size_t p = X.row_ptr[i]; p < X.row_ptr[i + 1]; p++) {
            xdense[X.col_idx[p]] = X.values[p];
        }
        // xtilde = vec(x_i h_j^T), same row-major flattening as vec(W)
        const double* hj = H.row(j);
        for (std::size_t t = 0; t < d; t++) {
            for (std::size_t r = 0; r < k; r++) {
                xtilde[t * k + r] = xdense[t] * hj[r];
            }
        }
        double b = 0;
        for (std::size_t t = 0; t < d * k; t++) b += W.values[t] * xtilde[t];
        const double g = loss_grad(kind, encode_label(kind, omega.value[e]), b);
        for (std::size_t t = 0; t < d * k; t++) out[t] += g * xtilde[t];
    }
    return out;
}

double objective_value(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                       const ObservationSet& omega, LossKind kind, double lambda) {
    Workspace ws;
    return objective_value(W, H, X, omega, kind, lambda, ws);
}

std::vector<double> grad_w_missing(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                                   const ObservationSet& omega, LossKind kind, double lambda) {
    Workspace ws;
    std::vector<double> out;
    grad_w_missing(W, H, X, omega, kind, lambda, ws, out);
    return out;
}

std::vector<double> hv_w_missing(const DenseMatrix& W, const DenseMatrix& H, const SparseRowMatrix& X,
                                 const ObservationSet& omega, LossKind kind, double lambda,
                                 const DenseMatrix& S) {
    Workspace ws;
    std::vector<double> out;
    hv_w_missing(W, H, X, omega, kind, lambda, S, ws, out);
    return out;
}

std::vector<double> grad_w_full_squared(const DenseMatrix& W, const DenseMatrix& H,
                                        const SparseRowMatrix& X, const SparseRowMatrix& Y, double lambda) {
    Workspace ws;
    std::vector<double> out;
    grad_w_full_squared(W, H, X, Y, lambda, ws, out);
    return out;
}

std::vector<double> hv_w_full_squared(const DenseMatrix& H, const SparseRowMatrix& X, const DenseMatrix& S,
                                      double lambda) {
    Workspace ws;
    std::vector<double> out;
    hv_w_full_squared(H, X, S, lambda, ws, out);
    return out;
}

// ===== WSubproblem =====

WSubproblem::WSubproblem(const SparseRowMatrix& X, const DenseMatrix& H, const ObservationSet& omega,
                         LossKind kind, double lambda)
    : X_(X), H_(H), omega_(&omega), kind_(kind), lambda_(lambda), d_(X.cols), k_(H.cols) {
    Wbuf_.resize(d_, k_);
    Sbuf_.resize(d_, k_);
}

WSubproblem::WSubproblem(const SparseRowMatrix& X, const DenseMatrix& H, const SparseRowMatrix& Y,
                         double lambda)
    : X_(X), H_(H), Y_(&Y), kind_(LossKind::squared), lambda_(lambda), d_(X.cols), k_(H.cols) {
    Wbuf_.resize(d_, k_);
    Sbuf_.resize(d_, k_);
    for (double v : Y.values) y_norm_sq_ += v * v;
}

double WSubproblem::value(const std::vector<double>& w) {
    Wbuf_.values = w;
    if (omega_ != nullptr) {
        dense_spmm(X_, Wbuf_, ws_.A);
        omega_scores(ws_.A, H_, *omega_, ws_.scores);
        double loss = 0;
        for (std::size_t e = 0; e < omega_->size(); e++) {
            loss += loss_value(kind_, encode_label(kind_, omega_->value[e]), ws_.scores[e]);
        }
        return loss + 0.5 * lambda_ * dot(w, w);
    }
    // Full squared loss: ||Y - A H^T||_F^2 expands to
    // ||Y||^2 - 2 <A, YH> + <A^T A, H^T H> without touching the n*L grid.
    dense_spmm(X_, Wbuf_, ws_.A);
    dense_spmm(*Y_, H_, ws_.B);
    double cross = 0;
    for (std::size_t t = 0; t < ws_.A.size(); t++) cross += ws_.A.values[t] * ws_.B.values[t];
    dense_mm_tn(H_, H_, ws_.M);
    DenseMatrix AtA;
    dense_mm_tn(ws_.A, ws_.A, AtA);
    double quad = 0;
    for (std::size_t t = 0; t < AtA.size(); t++) quad += AtA.values[t] * ws_.M.values[t];
    return 0.5 * (y_norm_sq_ - 2.0 * cross + quad) + 0.5 * lambda_ * dot(w, w);
}

void WSubproblem::grad(const std::vector<double>& w, std::vector<double>& out) {
    Wbuf_.values = w;
    if (omega_ != nullptr) {
        dense_spmm(X_, Wbuf_, ws_.A);
        omega_scores(ws_.A, H_, *omega_, ws_.scores);
        const std::size_t m = omega_->size();
        ws_.coeff.resize(m);
        curv_.resize(m);
        for (std::size_t e = 0; e < m; e++) {
            const double a = encode_label(kind_, omega_->value[e]);
            ws_.coeff[e] = loss_grad(kind_, a, ws_.scores[e]);
            curv_[e] = loss_curv(kind_, a, ws_.scores[e]);
        }
        omega_scatter_mm(ws_.coeff, H_, *omega_, ws_.G);
        transpose_spmm(X_, ws_.G, ws_.XtG);
        add_regularized(ws_.XtG, Wbuf_, lambda_, out);
        return;
    }
    grad_w_full_squared(Wbuf_, H_, X_, *Y_, lambda_, ws_, out);
}

void WSubproblem::hv(const std::vector<double>& s, std::vector<double>& out) {
    Sbuf_.values = s;
    if (omega_ != nullptr) {
        if (curv_.size() != omega_->size()) {
            throw std::logic_error("WSubproblem::hv called before grad");
        }
        dense_spmm(X_, Sbuf_, ws_.B);
        omega_scores(ws_.B, H_, *omega_, ws_.scores_b);
        ws_.coeff.resize(omega_->size());
        for (std::size_t e = 0; e < omega_->size(); e++) {
            ws_.coeff[e] = curv_[e] * ws_.scores_b[e];
        }
        omega_scatter_mm(ws_.coeff, H_, *omega_, ws_.G);
        transpose_spmm(X_, ws_.G, ws_.XtG);
        add_regularized(ws_.XtG, Sbuf_, lambda_, out);
        return;
    }
    hv_w_full_squared(H_, X_, Sbuf_, lambda_, ws_, out);
}

} // namespace leml
