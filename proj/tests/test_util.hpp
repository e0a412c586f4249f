// Shared helpers for the test suites: seeded random instances and small
// reference oracles kept independent of the library's fast paths.

#ifndef LEML_TEST_UTIL_HPP
#define LEML_TEST_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "leml/dense_matrix.hpp"
#include "leml/observation_set.hpp"
#include "leml/rng.hpp"
#include "leml/sparse_matrix.hpp"

namespace testutil {

inline leml::DenseMatrix random_dense(leml::Rng& rng, std::size_t rows, std::size_t cols,
                                      double lo = -1.0, double hi = 1.0) {
    leml::DenseMatrix m(rows, cols);
    for (double& v : m.values) v = rng.uniform(lo, hi);
    return m;
}

inline leml::SparseRowMatrix random_sparse(leml::Rng& rng, std::size_t rows, std::size_t cols,
                                           double density, double lo = -1.0, double hi = 1.0) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
    for (std::size_t i = 0; i < rows; i++) {
        for (std::size_t j = 0; j < cols; j++) {
            if (rng.unit() < density) entries.emplace_back(i, j, rng.uniform(lo, hi));
        }
    }
    return leml::SparseRowMatrix::from_triplets(rows, cols, std::move(entries));
}

// Binary label matrix: each cell is positive with the given density.
inline leml::SparseRowMatrix random_binary_labels(leml::Rng& rng, std::size_t rows, std::size_t cols,
                                                  double density) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
    for (std::size_t i = 0; i < rows; i++) {
        for (std::size_t j = 0; j < cols; j++) {
            if (rng.unit() < density) entries.emplace_back(i, j, 1.0);
        }
    }
    return leml::SparseRowMatrix::from_triplets(rows, cols, std::move(entries));
}

// `count` distinct cells with random 0/1 observed values.
inline leml::ObservationSet random_omega(leml::Rng& rng, std::size_t n, std::size_t L, std::size_t count) {
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    cells.reserve(n * L);
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = 0; j < L; j++) cells.emplace_back(i, j);
    }
    count = std::min(count, cells.size());
    for (std::size_t t = 0; t < count; t++) {
        std::swap(cells[t], cells[t + rng.below(cells.size() - t)]);
    }
    std::vector<leml::ObservationEntry> entries;
    for (std::size_t t = 0; t < count; t++) {
        entries.push_back({cells[t].first, cells[t].second, static_cast<double>(rng.below(2))});
    }
    return leml::ObservationSet::from_entries(n, L, std::move(entries));
}

// Triple-loop dense product, the reference for the structured kernels.
inline leml::DenseMatrix dense_mm_oracle(const leml::DenseMatrix& A, const leml::DenseMatrix& B) {
    leml::DenseMatrix out(A.rows, B.cols);
    for (std::size_t i = 0; i < A.rows; i++) {
        for (std::size_t j = 0; j < B.cols; j++) {
            double s = 0;
            for (std::size_t t = 0; t < A.cols; t++) s += A.at(i, t) * B.at(t, j);
            out.at(i, j) = s;
        }
    }
    return out;
}

inline double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(1.0, std::fabs(want));
}

inline double max_rel_err(const std::vector<double>& got, const std::vector<double>& want) {
    double scale = 1.0;
    for (double v : want) scale = std::max(scale, std::fabs(v));
    double err = 0;
    for (std::size_t i = 0; i < got.size(); i++) err = std::max(err, std::fabs(got[i] - want[i]));
    return err / scale;
}

inline double max_rel_err(const leml::DenseMatrix& got, const leml::DenseMatrix& want) {
    return max_rel_err(got.values, want.values);
}

} // namespace testutil

#endif // LEML_TEST_UTIL_HPP
