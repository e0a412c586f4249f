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

#include "leml/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "leml/threading.hpp"

namespace leml {

// ===== containers =====

SparseRowMatrix SparseRowMatrix::from_triplets(
    std::size_t rows, std::size_t cols,
    std::vector<std::tuple<std::size_t, std::size_t, double>> entries) {
    for (const auto& [i, j, v] : entries) {
        (void)v;
        if (i >= rows || j >= cols) {
            throw std::invalid_argument("sparse triplet index out of range");
        }
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b)
                                                : std::get<1>(a) < std::get<1>(b);
    });
    SparseRowMatrix m(rows, cols);
    m.col_idx.reserve(entries.size());
    m.values.reserve(entries.size());
    for (std::size_t e = 0; e < entries.size(); e++) {
        const auto& [i, j, v] = entries[e];
        if (e > 0 && std::get<0>(entries[e - 1]) == i && std::get<1>(entries[e - 1]) == j) {
            throw std::invalid_argument("duplicate sparse entry");
        }
        m.col_idx.push_back(j);
        m.values.push_back(v);
        m.row_ptr[i + 1]++;
    }
    for (std::size_t i = 0; i < rows; i++) m.row_ptr[i + 1] += m.row_ptr[i];
    return m;
}

SparseRowMatrix SparseRowMatrix::identity(std::size_t n) {
    SparseRowMatrix m(n, n);
    m.col_idx.resize(n);
    m.values.assign(n, 1.0);
    for (std::size_t i = 0; i < n; i++) {
        m.col_idx[i] = i;
        m.row_ptr[i + 1] = i + 1;
    }
    return m;
}

DenseMatrix SparseRowMatrix::to_dense() const {
    DenseMatrix out(rows, cols);
    for (std::size_t i = 0; i < rows; i++) {
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; p++) {
            out.at(i, col_idx[p]) = values[p];
        }
    }
    return out;
}

void SparseRowMatrix::validate() const {
    if (row_ptr.size() != rows + 1 || row_ptr[0] != 0 || row_ptr[rows] != nnz()) {
        throw std::invalid_argument("bad row_ptr");
    }
    if (col_idx.size() != values.size()) {
        throw std::invalid_argument("col_idx/values length mismatch");
    }
    for (std::size_t i = 0; i < rows; i++) {
        if (row_ptr[i] > row_ptr[i + 1]) throw std::invalid_argument("row_ptr decreasing");
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; p++) {
            if (col_idx[p] >= cols) throw std::invalid_argument("column index out of range");
            if (p > row_ptr[i] && col_idx[p - 1] >= col_idx[p]) {
                throw std::invalid_argument("columns not strictly increasing within row");
            }
            if (!std::isfinite(values[p])) throw std::invalid_argument("non-finite value");
        }
    }
}

ObservationSet ObservationSet::from_entries(std::size_t n, std::size_t L,
                                            std::vector<ObservationEntry> entries) {
    for (const auto& e : entries) {
        if (e.inst >= n || e.label >= L) {
            throw std::invalid_argument("observation index out of range");
        }
        if (e.value != 0.0 && e.value != 1.0) {
            throw std::invalid_argument("observed value must be 0 or 1");
        }
    }
    std::sort(entries.begin(), entries.end(), [](const ObservationEntry& a, const ObservationEntry& b) {
        return a.inst != b.inst ? a.inst < b.inst : a.label < b.label;
    });
    ObservationSet o;
    o.n_rows = n;
    o.n_cols = L;
    const std::size_t m = entries.size();
    o.inst.resize(m);
    o.label.resize(m);
    o.value.resize(m);
    o.row_ptr.assign(n + 1, 0);
    o.col_ptr.assign(L + 1, 0);
    for (std::size_t e = 0; e < m; e++) {
        if (e > 0 && entries[e - 1].inst == entries[e].inst && entries[e - 1].label == entries[e].label) {
            throw std::invalid_argument("duplicate observation (i,j)");
        }
        o.inst[e] = entries[e].inst;
        o.label[e] = entries[e].label;
        o.value[e] = entries[e].value;
        o.row_ptr[entries[e].inst + 1]++;
        o.col_ptr[entries[e].label + 1]++;
    }
    for (std::size_t i = 0; i < n; i++) o.row_ptr[i + 1] += o.row_ptr[i];
    for (std::size_t j = 0; j < L; j++) o.col_ptr[j + 1] += o.col_ptr[j];
    // Entry ids are row-major sorted, so a stable counting pass over them
    // yields instances ascending within each label group.
    o.col_order.resize(m);
    std::vector<std::size_t> next(o.col_ptr.begin(), o.col_ptr.end() - 1);
    for (std::size_t e = 0; e < m; e++) {
        o.col_order[next[o.label[e]]++] = e;
    }
    return o;
}

ObservationSet ObservationSet::full_grid(const SparseRowMatrix& Y) {
    ObservationSet o;
    o.n_rows = Y.rows;
    o.n_cols = Y.cols;
    const std::size_t m = Y.rows * Y.cols;
    o.inst.resize(m);
    o.label.resize(m);
    o.value.assign(m, 0.0);
    o.row_ptr.resize(Y.rows + 1);
    for (std::size_t i = 0; i < Y.rows; i++) {
        o.row_ptr[i] = i * Y.cols;
        for (std::size_t j = 0; j < Y.cols; j++) {
            o.inst[i * Y.cols + j] = i;
            o.label[i * Y.cols + j] = j;
        }
        for (std::size_t p = Y.row_ptr[i]; p < Y.row_ptr[i + 1]; p++) {
            o.value[i * Y.cols + Y.col_idx[p]] = Y.values[p];
        }
    }
    o.row_ptr[Y.rows] = m;
    o.col_ptr.resize(Y.cols + 1);
    o.col_order.resize(m);
    for (std::size_t j = 0; j < Y.cols; j++) {
        o.col_ptr[j] = j * Y.rows;
        for (std::size_t i = 0; i < Y.rows; i++) {
            o.col_order[j * Y.rows + i] = i * Y.cols + j;
        }
    }
    o.col_ptr[Y.cols] = m;
    return o;
}

// ===== structured products =====

void dense_spmm(const SparseRowMatrix& X, const DenseMatrix& S, DenseMatrix& out) {
    if (X.cols != S.rows) throw std::invalid_argument("dense_spmm: dimension mismatch");
    const std::size_t k = S.cols;
    out.resize(X.rows, k);
    const int nt = num_threads();
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
    for (long long ii = 0; ii < (long long)X.rows; ii++) {
        const std::size_t i = (std::size_t)ii;
        double* oi = out.row(i);
        for (std::size_t p = X.row_ptr[i]; p < X.row_ptr[i + 1]; p++) {
            const double v = X.values[p];
            const double* srow = S.row(X.col_idx[p]);
            for (std::size_t r = 0; r < k; r++) oi[r] += v * srow[r];
        }
    }
}

DenseMatrix dense_spmm(const SparseRowMatrix& X, const DenseMatrix& S) {
    DenseMatrix out;
    dense_spmm(X, S, out);
    return out;
}

void transpose_spmm(const SparseRowMatrix& X, const DenseMatrix& G, DenseMatrix& out) {
    if (X.rows != G.rows) throw std::invalid_argument("transpose_spmm: dimension mismatch");
    const std::size_t k = G.cols;
    out.resize(X.cols, k);
    const int nt = num_threads();
    if (nt <= 1) {
        for (std::size_t i = 0; i < X.rows; i++) {
            const double* gi = G.row(i);
            for (std::size_t p = X.row_ptr[i]; p < X.row_ptr[i + 1]; p++) {
                const double v = X.values[p];
                double* ot = out.row(X.col_idx[p]);
                for (std::size_t r = 0; r < k; r++) ot[r] += v * gi[r];
            }
        }
        return;
    }
    // Row-partitioned accumulation into per-thread buffers, reduced in
    // thread order so the result does not depend on scheduling.
    std::vector<DenseMatrix> partial((std::size_t)nt);
#pragma omp parallel num_threads(nt)
    {
#ifdef _OPENMP
        const int tid = omp_get_thread_num();
#else
        const int tid = 0;
#endif
        DenseMatrix& mine = partial[(std::size_t)tid];
        mine.resize(X.cols, k);
#pragma omp for schedule(static)
        for (long long ii = 0; ii < (long long)X.rows; ii++) {
            const std::size_t i = (std::size_t)ii;
            const double* gi = G.row(i);
            for (std::size_t p = X.row_ptr[i]; p < X.row_ptr[i + 1]; p++) {
                const double v = X.values[p];
                double* ot = mine.row(X.col_idx[p]);
                for (std::size_t r = 0; r < k; r++) ot[r] += v * gi[r];
            }
        }
    }
    for (const DenseMatrix& part : partial) {
        if (part.size() != out.size()) continue; // thread never ran
        for (std::size_t t = 0; t < out.size(); t++) out.values[t] += part.values[t];
    }
}

DenseMatrix transpose_spmm(const SparseRowMatrix& X, const DenseMatrix& G) {
    DenseMatrix out;
    transpose_spmm(X, G, out);
    return out;
}

void omega_scores(const DenseMatrix& A, const DenseMatrix& H, const ObservationSet& omega,
                  std::vector<double>& out) {
    if (A.cols != H.cols) throw std::invalid_argument("omega_scores: factor rank mismatch");
    if (omega.n_rows > A.rows || omega.n_cols > H.rows) {
        throw std::invalid_argument("omega_scores: observation index out of bounds");
    }
    const std::size_t k = A.cols;
    const std::size_t m = omega.size();
    out.assign(m, 0.0);
    const int nt = num_threads();
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
    for (long long ee = 0; ee < (long long)m; ee++) {
        const std::size_t e = (std::size_t)ee;
        const double* ai = A.row(omega.inst[e]);
        const double* hj = H.row(omega.label[e]);
        double s = 0;
        for (std::size_t r = 0; r < k; r++) s += ai[r] * hj[r];
        out[e] = s;
    }
}

std::vector<double> omega_scores(const DenseMatrix& A, const DenseMatrix& H, const ObservationSet& omega) {
    std::vector<double> out;
    omega_scores(A, H, omega, out);
    return out;
}

void omega_scatter_mm(const std::vector<double>& d, const DenseMatrix& H, const ObservationSet& omega,
                      DenseMatrix& out) {
    if (d.size() != omega.size()) throw std::invalid_argument("omega_scatter_mm: value/entry length mismatch");
    const std::size_t k = H.cols;
    out.resize(omega.n_rows, k);
    const int nt = num_threads();
    // Entries are row-major sorted, so partitioning on instance boundaries
    // keeps each output row owned by one worker and the per-row accumulation
    // order identical to reference mode.
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
    for (long long ii = 0; ii < (long long)omega.n_rows; ii++) {
        const std::size_t i = (std::size_t)ii;
        double* oi = out.row(i);
        for (std::size_t e = omega.row_ptr[i]; e < omega.row_ptr[i + 1]; e++) {
            const double de = d[e];
            const double* hj = H.row(omega.label[e]);
            for (std::size_t r = 0; r < k; r++) oi[r] += de * hj[r];
        }
    }
}

DenseMatrix omega_scatter_mm(const std::vector<double>& d, const DenseMatrix& H, const ObservationSet& omega) {
    DenseMatrix out;
    omega_scatter_mm(d, H, omega, out);
    return out;
}

// ===== dense helpers =====

void dense_mm(const DenseMatrix& A, const DenseMatrix& B, DenseMatrix& out) {
    if (A.cols != B.rows) throw std::invalid_argument("dense_mm: dimension mismatch");
    out.resize(A.rows, B.cols);
    for (std::size_t i = 0; i < A.rows; i++) {
        double* oi = out.row(i);
        for (std::size_t t = 0; t < A.cols; t++) {
            const double a = A.at(i, t);
            if (a == 0.0) continue;
            const double* bt = B.row(t);
            for (std::size_t j = 0; j < B.cols; j++) oi[j] += a * bt[j];
        }
    }
}

void dense_mm_nt(const DenseMatrix& A, const DenseMatrix& B, DenseMatrix& out) {
    if (A.cols != B.cols) throw std::invalid_argument("dense_mm_nt: dimension mismatch");
    out.resize(A.rows, B.rows);
    const int nt = num_threads();
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
    for (long long ii = 0; ii < (long long)A.rows; ii++) {
        const std::size_t i = (std::size_t)ii;
        const double* ai = A.row(i);
        double* oi = out.row(i);
        for (std::size_t j = 0; j < B.rows; j++) {
            const double* bj = B.row(j);
            double s = 0;
            for (std::size_t r = 0; r < A.cols; r++) s += ai[r] * bj[r];
            oi[j] = s;
        }
    }
}

void dense_mm_tn(const DenseMatrix& A, const DenseMatrix& B, DenseMatrix& out) {
    if (A.rows != B.rows) throw std::invalid_argument("dense_mm_tn: dimension mismatch");
    out.resize(A.cols, B.cols);
    for (std::size_t i = 0; i < A.rows; i++) {
        const double* ai = A.row(i);
        const double* bi = B.row(i);
        for (std::size_t t = 0; t < A.cols; t++) {
            const double a = ai[t];
            if (a == 0.0) continue;
            double* ot = out.row(t);
            for (std::size_t j = 0; j < B.cols; j++) ot[j] += a * bi[j];
        }
    }
}

double frob_norm_sq(const DenseMatrix& A) {
    double s = 0;
    for (double v : A.values) s += v * v;
    return s;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); i++) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) {
    return std::sqrt(dot(a, a));
}

} // namespace leml
