#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>

#include "leml/objective.hpp"
#include "test_util.hpp"

using namespace leml;
using namespace testutil;

namespace {

const LossKind kinds[] = {LossKind::squared, LossKind::logistic, LossKind::l2hinge};

struct Instance {
    SparseRowMatrix X;
    DenseMatrix W, H;
    ObservationSet omega;
};

Instance random_instance(Rng& rng, std::size_t n, std::size_t d, std::size_t L, std::size_t k,
                         std::size_t nobs) {
    Instance ins;
    ins.X = random_sparse(rng, n, d, 0.4);
    ins.W = random_dense(rng, d, k, -0.5, 0.5);
    ins.H = random_dense(rng, L, k, -0.5, 0.5);
    ins.omega = random_omega(rng, n, L, nobs);
    return ins;
}

// Central finite differences of the objective in every coordinate of W.
std::vector<double> fd_gradient(const Instance& ins, LossKind kind, double lambda, double h) {
    std::vector<double> fd(ins.W.size());
    DenseMatrix Wp = ins.W;
    for (std::size_t t = 0; t < fd.size(); t++) {
        const double keep = Wp.values[t];
        Wp.values[t] = keep + h;
        const double up = objective_value(Wp, ins.H, ins.X, ins.omega, kind, lambda);
        Wp.values[t] = keep - h;
        const double dn = objective_value(Wp, ins.H, ins.X, ins.omega, kind, lambda);
        Wp.values[t] = keep;
        fd[t] = (up - dn) / (2 * h);
    }
    return fd;
}

} // namespace

TEST_CASE("objective value on hand instances") {
    // single observed cell, all factors zero: only l(1, 0) remains
    SparseRowMatrix X = SparseRowMatrix::identity(1);
    DenseMatrix W(1, 1), H(1, 1);
    ObservationSet omega = ObservationSet::from_entries(1, 1, {{0, 0, 1.0}});
    CHECK(objective_value(W, H, X, omega, LossKind::squared, 0.0) == doctest::Approx(0.5));

    // empty omega: pure regularizer, lambda/2 (4 + 2) = 3
    ObservationSet empty = ObservationSet::from_entries(1, 1, {});
    W.values = {2.0};
    H.values = {std::sqrt(2.0)};
    CHECK(objective_value(W, H, X, empty, LossKind::squared, 1.0) == doctest::Approx(3.0));
}

TEST_CASE("objective value matches the naive per-entry sum") {
    Rng rng(101);
    for (LossKind kind : kinds) {
        Instance ins = random_instance(rng, 12, 8, 6, 3, 40);
        const double lambda = 0.3;
        DenseMatrix Xd = ins.X.to_dense();
        double want = 0;
        for (std::size_t e = 0; e < ins.omega.size(); e++) {
            const std::size_t i = ins.omega.inst[e];
            const std::size_t j = ins.omega.label[e];
            double b = 0;
            for (std::size_t t = 0; t < ins.X.cols; t++) {
                for (std::size_t r = 0; r < ins.W.cols; r++) {
                    b += Xd.at(i, t) * ins.W.at(t, r) * ins.H.at(j, r);
                }
            }
            want += loss_value(kind, encode_label(kind, ins.omega.value[e]), b);
        }
        want += 0.5 * lambda * (frob_norm_sq(ins.W) + frob_norm_sq(ins.H));
        CHECK(rel_err(objective_value(ins.W, ins.H, ins.X, ins.omega, kind, lambda), want) <= 1e-12);
    }
}

TEST_CASE("gradient trivial cases") {
    Rng rng(103);
    SparseRowMatrix X = random_sparse(rng, 5, 4, 0.5);
    DenseMatrix W = random_dense(rng, 4, 2);
    DenseMatrix H = random_dense(rng, 3, 2);
    ObservationSet empty = ObservationSet::from_entries(5, 3, {});
    for (double g : grad_w_missing(W, H, X, empty, LossKind::squared, 0.0)) CHECK(g == 0.0);

    // W = 0, squared, lambda = 0: D = -Y on omega, so grad = -vec(X^T Y_omega H)
    ObservationSet omega = random_omega(rng, 5, 3, 10);
    DenseMatrix W0(4, 2);
    std::vector<double> got = grad_w_missing(W0, H, X, omega, LossKind::squared, 0.0);
    std::vector<double> minus_y(omega.size());
    for (std::size_t e = 0; e < omega.size(); e++) minus_y[e] = -omega.value[e];
    DenseMatrix want = transpose_spmm(X, omega_scatter_mm(minus_y, H, omega));
    CHECK(max_rel_err(got, want.values) <= 1e-14);
}

TEST_CASE("fast gradient equals the explicit Kronecker oracle") {
    Rng rng(107);
    for (int rep = 0; rep < 10; rep++) {
        for (LossKind kind : kinds) {
            Instance ins = random_instance(rng, 10 + rep, 7, 6, 3, 35);
            const double lambda = rep % 2 ? 0.5 : 0.0;
            std::vector<double> fast = grad_w_missing(ins.W, ins.H, ins.X, ins.omega, kind, lambda);
            std::vector<double> naive = naive_grad_w(ins.W, ins.H, ins.X, ins.omega, kind, lambda);
            CHECK(max_rel_err(fast, naive) <= 1e-12);
            CHECK(max_rel_err(naive, fast) <= 1e-12); // both directions
        }
    }
}

TEST_CASE("naive oracle hand example") {
    // one entry, d=2, k=1: x=(1,2), h=(3), W=0
    SparseRowMatrix X = SparseRowMatrix::from_triplets(1, 2, {{0, 0, 1.0}, {0, 1, 2.0}});
    DenseMatrix W(2, 1);
    DenseMatrix H(1, 1);
    H.values = {3.0};
    ObservationSet omega0 = ObservationSet::from_entries(1, 1, {{0, 0, 0.0}});
    std::vector<double> g0 = naive_grad_w(W, H, X, omega0, LossKind::squared, 0.0);
    CHECK(g0[0] == 0.0);
    CHECK(g0[1] == 0.0);
    ObservationSet omega1 = ObservationSet::from_entries(1, 1, {{0, 0, 1.0}});
    std::vector<double> g1 = naive_grad_w(W, H, X, omega1, LossKind::squared, 0.0);
    CHECK(g1[0] == doctest::Approx(-3.0));
    CHECK(g1[1] == doctest::Approx(-6.0));

    ObservationSet empty = ObservationSet::from_entries(1, 1, {});
    for (double g : naive_grad_w(W, H, X, empty, LossKind::squared, 0.0)) CHECK(g == 0.0);
}

TEST_CASE("gradient matches finite differences for every loss") {
    Rng rng(109);
    for (LossKind kind : kinds) {
        Instance ins = random_instance(rng, 20, 15, 10, 3, 120);
        const double lambda = 0.2;
        std::vector<double> grad = grad_w_missing(ins.W, ins.H, ins.X, ins.omega, kind, lambda);
        std::vector<double> fd = fd_gradient(ins, kind, lambda, 1e-6);
        CHECK(max_rel_err(grad, fd) <= 1e-6);
    }
}

TEST_CASE("directional derivatives match the gradient") {
    Rng rng(113);
    Instance ins = random_instance(rng, 15, 10, 8, 3, 80);
    const double lambda = 0.1;
    const double h = 1e-6;
    std::vector<double> grad = grad_w_missing(ins.W, ins.H, ins.X, ins.omega, LossKind::logistic, lambda);
    for (int t = 0; t < 20; t++) {
        DenseMatrix U = random_dense(rng, ins.W.rows, ins.W.cols);
        DenseMatrix Wp = ins.W, Wm = ins.W;
        for (std::size_t q = 0; q < U.size(); q++) {
            Wp.values[q] += h * U.values[q];
            Wm.values[q] -= h * U.values[q];
        }
        const double fd = (objective_value(Wp, ins.H, ins.X, ins.omega, LossKind::logistic, lambda) -
                           objective_value(Wm, ins.H, ins.X, ins.omega, LossKind::logistic, lambda)) /
                          (2 * h);
        CHECK(rel_err(dot(grad, U.values), fd) <= 1e-6);
    }
}

TEST_CASE("hessian-vector trivial and quadratic-identity cases") {
    Rng rng(127);
    Instance ins = random_instance(rng, 12, 9, 7, 3, 50);
    const double lambda = 0.4;

    DenseMatrix S0(9, 3);
    for (double v : hv_w_missing(ins.W, ins.H, ins.X, ins.omega, LossKind::logistic, lambda, S0)) {
        CHECK(v == 0.0);
    }

    // squared loss is quadratic: hv(S) = grad(W + S) - grad(W) exactly
    DenseMatrix S = random_dense(rng, 9, 3);
    std::vector<double> hv = hv_w_missing(ins.W, ins.H, ins.X, ins.omega, LossKind::squared, lambda, S);
    DenseMatrix WpS = ins.W;
    for (std::size_t t = 0; t < S.size(); t++) WpS.values[t] += S.values[t];
    std::vector<double> g1 = grad_w_missing(WpS, ins.H, ins.X, ins.omega, LossKind::squared, lambda);
    std::vector<double> g0 = grad_w_missing(ins.W, ins.H, ins.X, ins.omega, LossKind::squared, lambda);
    for (std::size_t t = 0; t < g1.size(); t++) g1[t] -= g0[t];
    CHECK(max_rel_err(hv, g1) <= 1e-10);
}

TEST_CASE("hessian-vector matches finite differences of the gradient") {
    Rng rng(131);
    Instance ins = random_instance(rng, 14, 10, 8, 3, 70);
    const double lambda = 0.2;
    const double h = 1e-5;
    DenseMatrix S = random_dense(rng, 10, 3);
    std::vector<double> hv = hv_w_missing(ins.W, ins.H, ins.X, ins.omega, LossKind::logistic, lambda, S);

    DenseMatrix Wp = ins.W, Wm = ins.W;
    for (std::size_t t = 0; t < S.size(); t++) {
        Wp.values[t] += h * S.values[t];
        Wm.values[t] -= h * S.values[t];
    }
    std::vector<double> fd = grad_w_missing(Wp, ins.H, ins.X, ins.omega, LossKind::logistic, lambda);
    std::vector<double> gm = grad_w_missing(Wm, ins.H, ins.X, ins.omega, LossKind::logistic, lambda);
    for (std::size_t t = 0; t < fd.size(); t++) fd[t] = (fd[t] - gm[t]) / (2 * h);
    CHECK(max_rel_err(hv, fd) <= 1e-5);
}

TEST_CASE("hessian is symmetric and positive semidefinite") {
    Rng rng(137);
    for (LossKind kind : kinds) {
        Instance ins = random_instance(rng, 12, 8, 6, 3, 45);
        const double lambda = 0.3;
        // symmetry through the cached-curvature path as well
        DenseMatrix S1 = random_dense(rng, 8, 3);
        DenseMatrix S2 = random_dense(rng, 8, 3);
        std::vector<double> h1 = hv_w_missing(ins.W, ins.H, ins.X, ins.omega, kind, lambda, S1);
        std::vector<double> h2 = hv_w_missing(ins.W, ins.H, ins.X, ins.omega, kind, lambda, S2);
        const double lhs = dot(h1, S2.values);
        const double rhs = dot(S1.values, h2);
        CHECK(rel_err(lhs, rhs) <= 1e-10);

        const double quad = dot(S1.values, h1);
        CHECK(quad >= lambda * dot(S1.values, S1.values) - 1e-10);
    }
}

TEST_CASE("full-label squared kernels equal the missing path on the full grid") {
    Rng rng(139);
    SparseRowMatrix X = random_sparse(rng, 30, 10, 0.4);
    SparseRowMatrix Y = random_binary_labels(rng, 30, 12, 0.25);
    DenseMatrix W = random_dense(rng, 10, 4);
    DenseMatrix H = random_dense(rng, 12, 4);
    DenseMatrix S = random_dense(rng, 10, 4);
    ObservationSet full = ObservationSet::full_grid(Y);
    const double lambda = 0.7;

    std::vector<double> g_fast = grad_w_full_squared(W, H, X, Y, lambda);
    std::vector<double> g_ref = grad_w_missing(W, H, X, full, LossKind::squared, lambda);
    CHECK(max_rel_err(g_fast, g_ref) <= 1e-12);

    std::vector<double> h_fast = hv_w_full_squared(H, X, S, lambda);
    std::vector<double> h_ref = hv_w_missing(W, H, X, full, LossKind::squared, lambda, S);
    CHECK(max_rel_err(h_fast, h_ref) <= 1e-12);
}

TEST_CASE("full-label squared kernel trivial cases") {
    Rng rng(149);
    SparseRowMatrix X = random_sparse(rng, 8, 5, 0.5);
    SparseRowMatrix Y = random_binary_labels(rng, 8, 4, 0.4);
    DenseMatrix H = random_dense(rng, 4, 2);
    const double lambda = 0.9;

    // W = 0: the A M term vanishes, leaving -vec(X^T Y H)
    DenseMatrix W0(5, 2);
    std::vector<double> got = grad_w_full_squared(W0, H, X, Y, 0.0);
    DenseMatrix want = transpose_spmm(X, dense_spmm(Y, H));
    for (double& v : want.values) v = -v;
    CHECK(max_rel_err(got, want.values) <= 1e-14);

    // X = 0: pure regularizer
    SparseRowMatrix X0(8, 5);
    DenseMatrix W = random_dense(rng, 5, 2);
    got = grad_w_full_squared(W, H, X0, Y, lambda);
    for (std::size_t t = 0; t < got.size(); t++) CHECK(got[t] == doctest::Approx(lambda * W.values[t]));

    // H = 0 in the Hessian product: lambda * vec(S)
    DenseMatrix H0(4, 2);
    DenseMatrix S = random_dense(rng, 5, 2);
    got = hv_w_full_squared(H0, X, S, lambda);
    for (std::size_t t = 0; t < got.size(); t++) CHECK(got[t] == doctest::Approx(lambda * S.values[t]));

    // S = 0
    DenseMatrix S0(5, 2);
    for (double v : hv_w_full_squared(H, X, S0, 0.5)) CHECK(v == 0.0);
}

TEST_CASE("workspace reuse gives identical results") {
    Rng rng(151);
    Instance ins = random_instance(rng, 10, 8, 6, 2, 30);
    Workspace ws;
    std::vector<double> a, b;
    grad_w_missing(ins.W, ins.H, ins.X, ins.omega, LossKind::l2hinge, 0.1, ws, a);
    grad_w_missing(ins.W, ins.H, ins.X, ins.omega, LossKind::l2hinge, 0.1, ws, b);
    CHECK(a == b);
}

TEST_CASE("doubling the observation count stays within 3x gradient time") {
    Rng rng(157);
    const std::size_t n = 1500, d = 300, L = 400, k = 10;
    SparseRowMatrix X = random_sparse(rng, n, d, 0.05);
    DenseMatrix W = random_dense(rng, d, k);
    DenseMatrix H = random_dense(rng, L, k);
    ObservationSet omega1 = random_omega(rng, n, L, 100000);
    ObservationSet omega2 = random_omega(rng, n, L, 200000);

    Workspace ws;
    std::vector<double> out;
    auto time_grad = [&](const ObservationSet& omega) {
        grad_w_missing(W, H, X, omega, LossKind::squared, 0.1, ws, out); // warm up
        double best = 1e100;
        for (int rep = 0; rep < 5; rep++) {
            const auto t0 = std::chrono::steady_clock::now();
            grad_w_missing(W, H, X, omega, LossKind::squared, 0.1, ws, out);
            best = std::min(best,
                            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        return best;
    };
    const double t1 = time_grad(omega1);
    const double t2 = time_grad(omega2);
    CHECK(t2 <= 3.0 * t1);
}
