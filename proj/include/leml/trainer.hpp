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

#ifndef LEML_TRAINER_HPP
#define LEML_TRAINER_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "leml/loss.hpp"
#include "leml/objective.hpp"
#include "leml/solvers.hpp"

namespace leml {

// Alternating minimization over the factors of Z = W H^T: each outer round
// solves the W subproblem with H fixed (structured CG / TRON) and then every
// per-label k-dimensional H subproblem with W fixed.
//
// Initialization is W = 0 with H random uniform, so the alternation starts
// with a W step; an initial H step against W = 0 would zero out H and
// collapse training.

struct FactorModel {
    DenseMatrix W; // d x k
    DenseMatrix H; // L x k
    LossKind kind = LossKind::squared;
    double lambda = 0;

    std::size_t rank() const { return W.cols; }
    std::size_t dim() const { return W.rows; }
    std::size_t labels() const { return H.rows; }
};

enum class TrainMode { auto_detect, missing, full };

struct TrainConfig {
    std::size_t k = 1;
    double lambda = 0.1;
    std::size_t outer_iters = 10;
    LossKind loss = LossKind::squared;
    double cg_tol = 1e-4;
    double tron_tol = 1e-3;
    std::size_t inner_max_iter = 25;
    std::uint64_t seed = 0;
    double init_scale = -1.0; // < 0 selects the default 1/sqrt(k)
    TrainMode mode = TrainMode::auto_detect;
};

struct HalfStepRecord {
    char phase = '?'; // 'W' or 'H'
    double objective = 0;
    double seconds = 0;
    std::size_t inner_iterations = 0;
    bool converged = true;
    std::size_t fallbacks = 0; // H step: singular normal equations solved by CG
};

struct TrainTrace {
    double initial_objective = 0;
    std::vector<HalfStepRecord> steps;
    std::size_t labels_without_observations = 0;
    bool degenerate_init = false; // init_scale == 0 requested
};

// Training labels: either the fully observed Y or an observation set.
struct Labels {
    bool full = true;
    SparseRowMatrix Y;   // valid when full
    ObservationSet omega; // valid when !full

    static Labels full_labels(SparseRowMatrix y) {
        Labels l;
        l.full = true;
        l.Y = std::move(y);
        return l;
    }
    static Labels observed(ObservationSet o) {
        Labels l;
        l.full = false;
        l.omega = std::move(o);
        return l;
    }

    std::size_t instances() const { return full ? Y.rows : omega.n_rows; }
    std::size_t label_count() const { return full ? Y.cols : omega.n_cols; }
};

// W = 0 (d x k); H (L x k) i.i.d. uniform in [-scale, scale] from the seeded
// generator, scale = init_scale or 1/sqrt(k). Deterministic per seed.
std::pair<DenseMatrix, DenseMatrix> init_factors(const TrainConfig& config, std::size_t d, std::size_t L);

struct HStepInfo {
    std::size_t labels_without_observations = 0;
    std::size_t fallbacks = 0;
    std::size_t inner_iterations = 0;
    bool converged = true;
};

// Solves every per-label problem
//   h_j = argmin_h sum_{i:(i,j) in Omega} l(Y_ij, a_i^T h) + lambda/2 ||h||^2
// with A = XW fixed. Squared loss uses k x k normal equations (CG fallback
// when lambda = 0 leaves them singular); logistic/l2hinge run TRON on k
// variables warm-started from H_prev. Labels without observations get
// h_j = 0.
DenseMatrix update_h(const DenseMatrix& W, const SparseRowMatrix& X, const ObservationSet& omega,
                     LossKind kind, double lambda, const TrainConfig& config, const DenseMatrix& H_prev,
                     HStepInfo* info = nullptr);

// Full-label squared-loss H step: one shared k x k system matrix
// (A^T A + lambda I) and right-hand sides A^T y_j off the nonzeros of Y.
DenseMatrix update_h_full_squared(const DenseMatrix& W, const SparseRowMatrix& X, const SparseRowMatrix& Y,
                                  double lambda, const TrainConfig& config, HStepInfo* info = nullptr);

// Minimizes g(vec(W)) with H fixed, warm-started from W_prev: CG on the
// structured quadratic for the squared loss (missing-label or full-label
// kernels as dictated by labels), TRON otherwise.
DenseMatrix update_w(const DenseMatrix& H, const SparseRowMatrix& X, const Labels& labels, LossKind kind,
                     double lambda, const TrainConfig& config, const DenseMatrix& W_prev,
                     SolverReport* report = nullptr);

std::pair<FactorModel, TrainTrace> train(const TrainConfig& config, const SparseRowMatrix& X,
                                         const Labels& labels);

// scores = (Xtest W) H^T, factor-first; Z is never materialized.
DenseMatrix predict_scores(const FactorModel& model, const SparseRowMatrix& Xtest);

// Top-K label indices per instance, descending score, ties by ascending
// label index.
std::vector<std::vector<std::size_t>> predict_topk(const FactorModel& model, const SparseRowMatrix& Xtest,
                                                   std::size_t K);

} // namespace leml

#endif // LEML_TRAINER_HPP
