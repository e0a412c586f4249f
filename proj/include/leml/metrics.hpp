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

#ifndef LEML_METRICS_HPP
#define LEML_METRICS_HPP

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "leml/dense_matrix.hpp"
#include "leml/sparse_matrix.hpp"

namespace leml {

struct EvalReport {
    std::map<std::size_t, double> top_k_accuracy;
    double hamming_loss = 0;
    double average_auc = 0;
    std::size_t instances_skipped_for_auc = 0;
};

// Fraction of the K highest-scoring labels per instance that are true
// positives, averaged over instances. Ties break by ascending label index.
double top_k_accuracy(const DenseMatrix& scores, const SparseRowMatrix& Y, std::size_t K);

// Fraction of (instance, label) cells misclassified after thresholding:
// score >= threshold predicts 1.
double hamming_loss(const DenseMatrix& scores, const SparseRowMatrix& Y, double threshold);

// Per-instance area under the ROC curve over label scores (tied pairs get
// half credit), averaged over instances that have both a positive and a
// negative label. Returns the average and the skipped-instance count;
// (0, m) when every instance is skipped.
std::pair<double, std::size_t> average_auc(const DenseMatrix& scores, const SparseRowMatrix& Y);

// All three criteria in one pass; ks lists the top-K cutoffs to include.
EvalReport evaluate(const DenseMatrix& scores, const SparseRowMatrix& Y,
                    const std::vector<std::size_t>& ks, double threshold);

} // namespace leml

#endif // LEML_METRICS_HPP
