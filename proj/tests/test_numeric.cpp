#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gvecf/activations.hpp"
#include "gvecf/adam.hpp"
#include "gvecf/dense_matrix.hpp"
#include "gvecf/grad_check.hpp"
#include "gvecf/initializer.hpp"
#include "gvecf/rng.hpp"
#include "gvecf/sparse_matrix.hpp"

using namespace gvecf;

namespace {

DenseMatrix random_dense(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0,
                         double hi = 1.0) {
    DenseMatrix m(rows, cols);
    for (double& v : m.data()) {
        v = rng.uniform(lo, hi);
    }
    return m;
}

SparseMatrix random_sparse(std::size_t rows, std::size_t cols, double density, Rng& rng) {
    std::vector<Triplet> entries;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (rng.uniform() < density) {
                entries.push_back({r, c, rng.uniform(-1.0, 1.0)});
            }
        }
    }
    return SparseMatrix::from_triplets(rows, cols, std::move(entries));
}

// Independent reference product: plain triple loop, no shared code with matmul.
DenseMatrix matmul_reference(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                acc += a(i, k) * b(k, j);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("spmm: identity and zero") {
    Rng rng(1);
    const DenseMatrix d = random_dense(5, 3, rng);
    const SparseMatrix eye = SparseMatrix::identity(5);
    CHECK(max_abs_diff(spmm(eye, d), d) == 0.0);

    const SparseMatrix zero(5, 5);
    const DenseMatrix out = spmm(zero, d);
    for (double v : out.data()) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("spmm matches densify-and-multiply oracle") {
    Rng rng(2);
    const SparseMatrix s = random_sparse(6, 6, 0.3, rng);
    const DenseMatrix d = random_dense(6, 4, rng);
    const DenseMatrix expected = matmul_reference(s.to_dense(), d);
    CHECK(max_abs_diff(spmm(s, d), expected) <= 1e-12);
}

TEST_CASE("spmm densify property on larger random instances") {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t rows = 1 + rng.uniform_index(100);
        const std::size_t inner = 1 + rng.uniform_index(100);
        const std::size_t cols = 1 + rng.uniform_index(8);
        const SparseMatrix s = random_sparse(rows, inner, 0.2, rng);
        const DenseMatrix d = random_dense(inner, cols, rng);
        CHECK(max_abs_diff(spmm(s, d), matmul_reference(s.to_dense(), d)) <= 1e-12);
    }
}

TEST_CASE("spmm rejects shape mismatch") {
    const SparseMatrix s(3, 4);
    const DenseMatrix d(5, 2);
    CHECK_THROWS_AS(spmm(s, d), std::invalid_argument);
}

TEST_CASE("sparse CSR invariants") {
    Rng rng(4);
    const SparseMatrix s = random_sparse(20, 15, 0.3, rng);
    const auto& offsets = s.row_offsets();
    REQUIRE(offsets.size() == 21);
    for (std::size_t r = 0; r < 20; ++r) {
        CHECK(offsets[r] <= offsets[r + 1]);
        for (std::size_t k = offsets[r] + 1; k < offsets[r + 1]; ++k) {
            CHECK(s.col_indices()[k - 1] < s.col_indices()[k]);
        }
    }
    for (double v : s.values()) {
        CHECK(v != 0.0);
    }
    // duplicate triplets are summed, exact zeros dropped
    const SparseMatrix summed =
        SparseMatrix::from_triplets(2, 2, {{0, 0, 1.5}, {0, 0, 2.5}, {1, 1, 3.0}, {1, 1, -3.0}});
    CHECK(summed.nnz() == 1);
    CHECK(summed.at(0, 0) == 4.0);
}

TEST_CASE("matmul: identity, scalars, reference oracle") {
    Rng rng(5);
    const DenseMatrix a = random_dense(4, 6, rng);
    CHECK(max_abs_diff(matmul(a, DenseMatrix::identity(6)), a) == 0.0);

    DenseMatrix x(1, 1), y(1, 1);
    x(0, 0) = 2.0;
    y(0, 0) = 3.0;
    CHECK(matmul(x, y)(0, 0) == 6.0);

    const DenseMatrix p = random_dense(3, 5, rng);
    const DenseMatrix q = random_dense(5, 2, rng);
    CHECK(max_abs_diff(matmul(p, q), matmul_reference(p, q)) <= 1e-12);

    CHECK_THROWS_AS(matmul(p, p), std::invalid_argument);
}

TEST_CASE("hadamard") {
    Rng rng(6);
    const DenseMatrix a = random_dense(3, 3, rng);
    const DenseMatrix ones(3, 3, 1.0);
    const DenseMatrix zeros(3, 3, 0.0);
    CHECK(max_abs_diff(hadamard(a, ones), a) == 0.0);
    CHECK(squared_norm(hadamard(a, zeros)) == 0.0);

    DenseMatrix u(1, 2), v(1, 2);
    u(0, 0) = 1.0;
    u(0, 1) = 2.0;
    v(0, 0) = 3.0;
    v(0, 1) = 4.0;
    const DenseMatrix w = hadamard(u, v);
    CHECK(w(0, 0) == 3.0);
    CHECK(w(0, 1) == 8.0);

    const DenseMatrix b = random_dense(2, 3, rng);
    CHECK_THROWS_AS(hadamard(a, b), std::invalid_argument);
}

TEST_CASE("leaky_relu values and monotonicity") {
    DenseMatrix x(1, 3);
    x(0, 0) = 5.0;
    x(0, 1) = -1.0;
    x(0, 2) = 0.0;
    const DenseMatrix y = leaky_relu(x, 0.2);
    CHECK(y(0, 0) == 5.0);
    CHECK(y(0, 1) == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(y(0, 2) == 0.0);

    Rng rng(7);
    double prev_in = -10.0, prev_out = leaky_relu(DenseMatrix(1, 1, -10.0), 0.2)(0, 0);
    for (int step = 0; step < 200; ++step) {
        const double v = prev_in + rng.uniform(0.0, 0.2);
        const double out = leaky_relu(DenseMatrix(1, 1, v), 0.2)(0, 0);
        CHECK(out >= prev_out);  // monotone non-decreasing
        if (v < 0.0) {
            CHECK(out == 0.2 * v);  // exact negative branch
        }
        prev_in = v;
        prev_out = out;
    }

    CHECK_THROWS_AS(leaky_relu(x, 1.5), std::invalid_argument);
}

TEST_CASE("sigmoid: midpoint, asymptote, symmetry") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(std::abs(sigmoid(50.0) - 1.0) <= 1e-15);
    CHECK(std::abs(sigmoid(-50.0) - (1.0 - sigmoid(50.0))) <= 1e-15);
    CHECK(std::isfinite(sigmoid(700.0)));
    CHECK(std::isfinite(sigmoid(-700.0)));
}

TEST_CASE("log_sigmoid: values and stability") {
    CHECK(log_sigmoid(0.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));

    const double extreme = log_sigmoid(-800.0);
    CHECK(std::isfinite(extreme));
    CHECK(extreme == doctest::Approx(-800.0).epsilon(1e-12));

    // High-precision reference at x = 3 via long double arithmetic.
    const long double ref = std::log(1.0L / (1.0L + std::exp(-3.0L)));
    CHECK(std::abs(log_sigmoid(3.0) - static_cast<double>(ref)) <= 1e-12);

    // exp(ls(x)) + exp(ls(-x)) = 1
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const double x = rng.uniform(-30.0, 30.0);
        CHECK(std::abs(std::exp(log_sigmoid(x)) + std::exp(log_sigmoid(-x)) - 1.0) <= 1e-12);
    }
}

TEST_CASE("xavier_init: determinism, bounds, centering") {
    Rng a(42), b(42);
    const DenseMatrix m1 = xavier_init(8, 8, a);
    const DenseMatrix m2 = xavier_init(8, 8, b);
    CHECK(max_abs_diff(m1, m2) == 0.0);

    Rng c(43);
    const DenseMatrix m = xavier_init(64, 64, c);
    const double bound = std::sqrt(6.0 / 128.0);
    for (double v : m.data()) {
        CHECK(std::abs(v) <= bound);
    }

    Rng d(44);
    const DenseMatrix big = xavier_init(1000, 1000, d);
    double mean = 0.0;
    for (double v : big.data()) {
        mean += v;
    }
    mean /= static_cast<double>(big.size());
    CHECK(std::abs(mean) <= 0.01);
}

TEST_CASE("adam_step: zero gradient is the identity") {
    Rng rng(9);
    DenseMatrix param = random_dense(4, 3, rng);
    const DenseMatrix before = param;
    const DenseMatrix zero(4, 3, 0.0);
    AdamState state = AdamState::for_param(param);
    for (int step = 0; step < 10; ++step) {
        adam_step(param, zero, state, 0.1);
    }
    CHECK(max_abs_diff(param, before) == 0.0);
    CHECK(state.t == 10);
}

TEST_CASE("adam_step: first step magnitude and statefulness") {
    DenseMatrix param(1, 1, 0.0);
    DenseMatrix grad(1, 1, 1.0);
    AdamState state = AdamState::for_param(param);
    adam_step(param, grad, state, 0.1);
    // With bias correction the first step is lr / (1 + eps'), essentially -lr.
    CHECK(param(0, 0) == doctest::Approx(-0.1).epsilon(1e-7));

    // Two successive identical calls differ from one call at doubled lr.
    DenseMatrix twice(1, 1, 0.0);
    AdamState st2 = AdamState::for_param(twice);
    adam_step(twice, grad, st2, 0.1);
    adam_step(twice, grad, st2, 0.1);

    DenseMatrix once(1, 1, 0.0);
    AdamState st3 = AdamState::for_param(once);
    adam_step(once, grad, st3, 0.2);
    CHECK(twice(0, 0) != once(0, 0));

    CHECK_THROWS_AS(adam_step(param, DenseMatrix(2, 2), state, 0.1), std::invalid_argument);
}

TEST_CASE("grad_check: quadratic loss") {
    Rng rng(10);
    DenseMatrix x = random_dense(3, 4, rng);
    const auto loss = [&]() { return 0.5 * squared_norm(x); };
    const DenseMatrix analytic = x;  // d/dx of 0.5 ||x||^2
    const double err = grad_check(loss, {&x}, {&analytic});
    CHECK(err <= 1e-8);
}

TEST_CASE("grad_check: non-finite loss raises") {
    DenseMatrix x(1, 1, 1.0);
    const auto loss = [&]() { return std::numeric_limits<double>::quiet_NaN(); };
    const DenseMatrix analytic(1, 1, 0.0);
    CHECK_THROWS_AS(grad_check(loss, {&x}, {&analytic}), std::runtime_error);
}

TEST_CASE("operations preserve finiteness") {
    Rng rng(11);
    const DenseMatrix a = random_dense(10, 10, rng, -100.0, 100.0);
    const DenseMatrix b = random_dense(10, 10, rng, -100.0, 100.0);
    const SparseMatrix s = random_sparse(10, 10, 0.4, rng);
    CHECK(matmul(a, b).all_finite());
    CHECK(hadamard(a, b).all_finite());
    CHECK(spmm(s, a).all_finite());
    CHECK(leaky_relu(a, 0.2).all_finite());
    CHECK((a + b).all_finite());
    CHECK(transpose(a).all_finite());
}

TEST_CASE("rng: uniform range, normal moments, serialization round trip") {
    Rng rng(12);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    double sum = 0.0, sum_sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.05);

    const std::string state = rng.serialize();
    Rng copy(0);
    copy.deserialize(state);
    for (int i = 0; i < 100; ++i) {
        CHECK(rng.normal() == copy.normal());
        CHECK(rng.uniform() == copy.uniform());
    }
}
