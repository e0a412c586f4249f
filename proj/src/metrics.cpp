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

#include "leml/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "leml/topk.hpp"

namespace leml {

namespace {

void check_dims(const DenseMatrix& scores, const SparseRowMatrix& Y) {
    if (scores.rows != Y.rows || scores.cols != Y.cols) {
        throw std::invalid_argument("metrics: score/label shape mismatch");
    }
}

// 0/1 ground truth of row i as a dense row.
void densify_row(const SparseRowMatrix& Y, std::size_t i, std::vector<char>& out) {
    out.assign(Y.cols, 0);
    for (std::size_t p = Y.row_ptr[i]; p < Y.row_ptr[i + 1]; p++) {
        if (Y.values[p] != 0.0) out[Y.col_idx[p]] = 1;
    }
}

} // namespace

double top_k_accuracy(const DenseMatrix& scores, const SparseRowMatrix& Y, std::size_t K) {
    check_dims(scores, Y);
    if (K < 1 || K > scores.cols) throw std::invalid_argument("top_k_accuracy: K out of range");
    if (scores.rows == 0) return 0;
    std::vector<char> truth;
    double total = 0;
    for (std::size_t i = 0; i < scores.rows; i++) {
        densify_row(Y, i, truth);
        std::size_t hits = 0;
        for (std::size_t j : top_k_indices(scores.row(i), scores.cols, K)) {
            if (truth[j]) hits++;
        }
        total += static_cast<double>(hits) / static_cast<double>(K);
    }
    return total / static_cast<double>(scores.rows);
}

double hamming_loss(const DenseMatrix& scores, const SparseRowMatrix& Y, double threshold) {
    check_dims(scores, Y);
    if (scores.rows == 0 || scores.cols == 0) return 0;
    std::vector<char> truth;
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < scores.rows; i++) {
        densify_row(Y, i, truth);
        const double* si = scores.row(i);
        for (std::size_t j = 0; j < scores.cols; j++) {
            const char pred = si[j] >= threshold ? 1 : 0;
            if (pred != truth[j]) wrong++;
        }
    }
    return static_cast<double>(wrong) / (static_cast<double>(scores.rows) * static_cast<double>(scores.cols));
}

std::pair<double, std::size_t> average_auc(const DenseMatrix& scores, const SparseRowMatrix& Y) {
    check_dims(scores, Y);
    const std::size_t L = scores.cols;
    std::vector<char> truth;
    std::vector<std::size_t> order(L);
    double total = 0;
    std::size_t scored = 0;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < scores.rows; i++) {
        densify_row(Y, i, truth);
        std::size_t pos = 0;
        for (char t : truth) pos += t;
        const std::size_t neg = L - pos;
        if (pos == 0 || neg == 0) {
            skipped++;
            continue;
        }
        // Rank-sum AUC with average ranks over tie groups:
        // AUC = (R_pos - P(P+1)/2) / (P*N).
        const double* si = scores.row(i);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return si[a] < si[b]; });
        double rank_sum_pos = 0;
        std::size_t t = 0;
        while (t < L) {
            std::size_t u = t;
            while (u + 1 < L && si[order[u + 1]] == si[order[t]]) u++;
            const double avg_rank = 0.5 * (static_cast<double>(t + 1) + static_cast<double>(u + 1));
            for (std::size_t p = t; p <= u; p++) {
                if (truth[order[p]]) rank_sum_pos += avg_rank;
            }
            t = u + 1;
        }
        const double p = static_cast<double>(pos);
        const double n = static_cast<double>(neg);
        total += (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n);
        scored++;
    }
    if (scored == 0) return {0.0, skipped};
    return {total / static_cast<double>(scored), skipped};
}

EvalReport evaluate(const DenseMatrix& scores, const SparseRowMatrix& Y,
                    const std::vector<std::size_t>& ks, double threshold) {
    EvalReport report;
    for (std::size_t k : ks) report.top_k_accuracy[k] = top_k_accuracy(scores, Y, k);
    report.hamming_loss = hamming_loss(scores, Y, threshold);
    auto [auc, skipped] = average_auc(scores, Y);
    report.average_auc = auc;
    report.instances_skipped_for_auc = skipped;
    return report;
}

} // namespace leml
