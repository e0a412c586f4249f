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

#include "leml/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "leml/kernels.hpp"

namespace leml {

namespace {

// Column dot products of a row-major matrix.
double col_dot(const DenseMatrix& B, std::size_t p, std::size_t q) {
    double s = 0;
    for (std::size_t i = 0; i < B.rows; i++) s += B.at(i, p) * B.at(i, q);
    return s;
}

void rotate_cols(DenseMatrix& B, std::size_t p, std::size_t q, double c, double s) {
    for (std::size_t i = 0; i < B.rows; i++) {
        const double bp = B.at(i, p);
        const double bq = B.at(i, q);
        B.at(i, p) = c * bp - s * bq;
        B.at(i, q) = s * bp + c * bq;
    }
}

// M_k = sum_{t<k} sigma_t u_t v_t^T from a thin SVD.
DenseMatrix truncated_reconstruction(const ThinSvd& svd, std::size_t k) {
    const std::size_t r = std::min(k, svd.rank());
    DenseMatrix out(svd.U.rows, svd.V.rows);
    for (std::size_t t = 0; t < r; t++) {
        const double sigma = svd.S[t];
        for (std::size_t i = 0; i < out.rows; i++) {
            const double us = svd.U.at(i, t) * sigma;
            for (std::size_t j = 0; j < out.cols; j++) {
                out.at(i, j) += us * svd.V.at(j, t);
            }
        }
    }
    return out;
}

// M = U^T Y, exploiting Y's sparsity. U is n x r, Y is n x L.
DenseMatrix ut_times_sparse(const DenseMatrix& U, const SparseRowMatrix& Y) {
    DenseMatrix M(U.cols, Y.cols);
    for (std::size_t i = 0; i < Y.rows; i++) {
        const double* ui = U.row(i);
        for (std::size_t pp = Y.row_ptr[i]; pp < Y.row_ptr[i + 1]; pp++) {
            const std::size_t j = Y.col_idx[pp];
            const double v = Y.values[pp];
            for (std::size_t p = 0; p < U.cols; p++) {
                M.at(p, j) += ui[p] * v;
            }
        }
    }
    return M;
}

} // namespace

ThinSvd thin_svd(const DenseMatrix& A, double rank_tol) {
    for (double v : A.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("thin_svd: non-finite input");
    }
    // One-sided Jacobi works column-wise; run on the transpose when the
    // matrix is wide so the rotated side is the smaller one.
    if (A.rows < A.cols) {
        DenseMatrix At(A.cols, A.rows);
        for (std::size_t i = 0; i < A.rows; i++) {
            for (std::size_t j = 0; j < A.cols; j++) At.at(j, i) = A.at(i, j);
        }
        ThinSvd t = thin_svd(At, rank_tol);
        std::swap(t.U, t.V);
        return t;
    }

    const std::size_t n = A.cols;
    DenseMatrix B = A;
    DenseMatrix V = DenseMatrix::identity(n);

    // Sweep until all column pairs are numerically orthogonal.
    const double ortho_eps = 1e-15;
    for (int sweep = 0; sweep < 60; sweep++) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; p++) {
            for (std::size_t q = p + 1; q < n; q++) {
                const double alpha = col_dot(B, p, p);
                const double beta = col_dot(B, q, q);
                const double gamma = col_dot(B, p, q);
                if (gamma == 0.0 || alpha == 0.0 || beta == 0.0) continue;
                if (std::fabs(gamma) <= ortho_eps * std::sqrt(alpha * beta)) continue;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                rotate_cols(B, p, q, c, s);
                rotate_cols(V, p, q, c, s);
                rotated = true;
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; j++) sigma[j] = std::sqrt(col_dot(B, j, j));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

    const double sigma_max = n > 0 ? sigma[order[0]] : 0.0;
    std::size_t r = 0;
    while (r < n && sigma[order[r]] > rank_tol * sigma_max && sigma[order[r]] > 0.0) r++;

    ThinSvd out;
    out.U.resize(A.rows, r);
    out.V.resize(n, r);
    out.S.resize(r);
    for (std::size_t t = 0; t < r; t++) {
        const std::size_t j = order[t];
        out.S[t] = sigma[j];
        const double inv = 1.0 / sigma[j];
        for (std::size_t i = 0; i < A.rows; i++) out.U.at(i, t) = B.at(i, j) * inv;
        for (std::size_t i = 0; i < n; i++) out.V.at(i, t) = V.at(i, j);
    }
    return out;
}

DenseMatrix closed_form_squared_full(const SparseRowMatrix& X, const SparseRowMatrix& Y, std::size_t k,
                                     bool* truncation_tie) {
    if (X.rows != Y.rows) throw std::invalid_argument("closed_form: X/Y row mismatch");
    if (k < 1) throw std::invalid_argument("closed_form: k must be >= 1");

    const ThinSvd svd_x = thin_svd(X.to_dense());
    const DenseMatrix M = ut_times_sparse(svd_x.U, Y); // r x L
    const ThinSvd svd_m = thin_svd(M);
    if (truncation_tie != nullptr) {
        *truncation_tie = svd_m.rank() > k &&
                          (svd_m.S[k - 1] - svd_m.S[k]) <= 1e-12 * (svd_m.rank() ? svd_m.S[0] : 0.0);
    }
    DenseMatrix Mk = truncated_reconstruction(svd_m, k); // r x L

    // Z = V_X Sigma_X^{-1} M_k
    for (std::size_t p = 0; p < Mk.rows; p++) {
        const double inv = 1.0 / svd_x.S[p];
        for (std::size_t j = 0; j < Mk.cols; j++) Mk.at(p, j) *= inv;
    }
    DenseMatrix Z;
    dense_mm(svd_x.V, Mk, Z); // d x L
    return Z;
}

DenseMatrix cplst_solution(const SparseRowMatrix& X, const SparseRowMatrix& Y, std::size_t k) {
    if (X.rows != Y.rows) throw std::invalid_argument("cplst: X/Y row mismatch");
    if (k < 1) throw std::invalid_argument("cplst: k must be >= 1");

    const ThinSvd svd_x = thin_svd(X.to_dense());
    const std::size_t r = svd_x.rank();

    // Xdag Y = V Sigma^{-1} U^T Y (d x L)
    DenseMatrix UtY = ut_times_sparse(svd_x.U, Y); // r x L
    DenseMatrix SinvUtY = UtY;
    for (std::size_t p = 0; p < r; p++) {
        const double inv = 1.0 / svd_x.S[p];
        for (std::size_t j = 0; j < SinvUtY.cols; j++) SinvUtY.at(p, j) *= inv;
    }
    DenseMatrix XdagY;
    dense_mm(svd_x.V, SinvUtY, XdagY); // d x L

    // G = Y^T X Xdag Y = Y^T (X XdagY) (L x L, symmetric PSD)
    DenseMatrix XXdagY = dense_spmm(X, XdagY); // n x L
    DenseMatrix G(Y.cols, Y.cols);
    for (std::size_t i = 0; i < Y.rows; i++) {
        for (std::size_t pp = Y.row_ptr[i]; pp < Y.row_ptr[i + 1]; pp++) {
            const std::size_t j = Y.col_idx[pp];
            const double v = Y.values[pp];
            const double* xi = XXdagY.row(i);
            for (std::size_t l = 0; l < Y.cols; l++) G.at(j, l) += v * xi[l];
        }
    }

    // H_C = top-k singular vectors of G.
    const ThinSvd svd_g = thin_svd(G);
    const std::size_t kk = std::min(k, svd_g.rank());
    DenseMatrix Hc(Y.cols, kk);
    for (std::size_t j = 0; j < Y.cols; j++) {
        for (std::size_t t = 0; t < kk; t++) Hc.at(j, t) = svd_g.V.at(j, t);
    }

    DenseMatrix Wc;
    dense_mm(XdagY, Hc, Wc); // d x kk
    DenseMatrix Z;
    dense_mm_nt(Wc, Hc, Z); // d x L
    return Z;
}

} // namespace leml
