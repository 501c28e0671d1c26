#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gvecf/interaction.hpp"
#include "gvecf/laplacian.hpp"
#include "gvecf/rng.hpp"

using namespace gvecf;

namespace {

InteractionMatrix random_interactions(std::size_t n_users, std::size_t n_items, double density,
                                      Rng& rng) {
    InteractionMatrix r(n_users, n_items);
    for (std::size_t u = 0; u < n_users; ++u) {
        for (std::size_t i = 0; i < n_items; ++i) {
            if (rng.uniform() < density) {
                r.add(u, i);
            }
        }
    }
    return r;
}

// Dense reference: assemble A naively, take D from row sums, and form
// D^{-1/2} A D^{-1/2} entry by entry.
DenseMatrix dense_laplacian_reference(const InteractionMatrix& r) {
    const std::size_t n = r.n_users(), m = r.n_items();
    DenseMatrix a(n + m, n + m, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        for (int i : r.items_of(u)) {
            a(u, n + static_cast<std::size_t>(i)) = 1.0;
            a(n + static_cast<std::size_t>(i), u) = 1.0;
        }
    }
    std::vector<double> inv_sqrt(n + m, 0.0);
    for (std::size_t t = 0; t < n + m; ++t) {
        double deg = 0.0;
        for (std::size_t s = 0; s < n + m; ++s) {
            deg += a(t, s);
        }
        if (deg > 0.0) {
            inv_sqrt[t] = 1.0 / std::sqrt(deg);
        }
    }
    DenseMatrix lap(n + m, n + m, 0.0);
    for (std::size_t t = 0; t < n + m; ++t) {
        for (std::size_t s = 0; s < n + m; ++s) {
            lap(t, s) = inv_sqrt[t] * a(t, s) * inv_sqrt[s];
        }
    }
    return lap;
}

// Independent peeling oracle: recompute degrees from scratch and drop
// under-degree nodes one round at a time until nothing changes.
std::pair<std::vector<bool>, std::vector<bool>> kcore_reference(const InteractionMatrix& r,
                                                                std::size_t k) {
    std::vector<bool> user_alive(r.n_users(), true), item_alive(r.n_items(), true);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::size_t> udeg(r.n_users(), 0), ideg(r.n_items(), 0);
        for (std::size_t u = 0; u < r.n_users(); ++u) {
            if (!user_alive[u]) continue;
            for (int i : r.items_of(u)) {
                if (item_alive[static_cast<std::size_t>(i)]) {
                    ++udeg[u];
                    ++ideg[static_cast<std::size_t>(i)];
                }
            }
        }
        for (std::size_t u = 0; u < r.n_users(); ++u) {
            if (user_alive[u] && udeg[u] < k) {
                user_alive[u] = false;
                changed = true;
            }
        }
        for (std::size_t i = 0; i < r.n_items(); ++i) {
            if (item_alive[i] && ideg[i] < k) {
                item_alive[i] = false;
                changed = true;
            }
        }
    }
    return {user_alive, item_alive};
}

}  // namespace

TEST_CASE("build_adjacency: empty, single pair, random") {
    const InteractionMatrix empty(3, 4);
    const SparseMatrix a_empty = build_adjacency(empty);
    CHECK(a_empty.rows() == 7);
    CHECK(a_empty.cols() == 7);
    CHECK(a_empty.nnz() == 0);

    InteractionMatrix single(1, 1);
    single.add(0, 0);
    const SparseMatrix a_single = build_adjacency(single);
    CHECK(a_single.rows() == 2);
    CHECK(a_single.at(0, 1) == 1.0);
    CHECK(a_single.at(1, 0) == 1.0);
    CHECK(a_single.nnz() == 2);

    Rng rng(21);
    const InteractionMatrix r = random_interactions(5, 7, 0.4, rng);
    const SparseMatrix a = build_adjacency(r);
    CHECK(a.nnz() == 2 * r.nnz());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            CHECK(a.at(i, j) == a.at(j, i));
        }
    }
    // block layout: user-user and item-item entries stay empty
    for (std::size_t u = 0; u < 5; ++u) {
        for (std::size_t v = 0; v < 5; ++v) {
            CHECK(a.at(u, v) == 0.0);
        }
    }
}

TEST_CASE("build_adjacency equals naive block assembly after densify") {
    Rng rng(22);
    const InteractionMatrix r = random_interactions(4, 6, 0.5, rng);
    const DenseMatrix a = build_adjacency(r).to_dense();
    DenseMatrix expected(10, 10, 0.0);
    for (std::size_t u = 0; u < 4; ++u) {
        for (int i : r.items_of(u)) {
            expected(u, 4 + static_cast<std::size_t>(i)) = 1.0;
            expected(4 + static_cast<std::size_t>(i), u) = 1.0;
        }
    }
    CHECK(max_abs_diff(a, expected) == 0.0);
}

TEST_CASE("build_laplacian: hand cases") {
    InteractionMatrix single(1, 1);
    single.add(0, 0);
    const NormalizedLaplacian lap1 = build_laplacian(single);
    CHECK(lap1.laplacian.at(0, 1) == 1.0);  // 1/sqrt(1*1)

    // user 0 with 2 items, item 0 with 2 users -> entry 1/sqrt(2*2) = 0.5
    InteractionMatrix r(2, 2);
    r.add(0, 0);
    r.add(0, 1);
    r.add(1, 0);
    const NormalizedLaplacian lap = build_laplacian(r);
    CHECK(lap.laplacian.at(0, 2) == 0.5);
    CHECK(lap.degrees[0] == 2);
    CHECK(lap.degrees[2] == 2);
}

TEST_CASE("build_laplacian matches the dense oracle") {
    Rng rng(23);
    const InteractionMatrix r = random_interactions(8, 8, 0.35, rng);
    const NormalizedLaplacian lap = build_laplacian(r);
    const DenseMatrix expected = dense_laplacian_reference(r);
    CHECK(max_abs_diff(lap.laplacian.to_dense(), expected) <= 1e-14);
}

TEST_CASE("laplacian: symmetry, per-edge values, plus-identity diagonal") {
    Rng rng(24);
    const InteractionMatrix r = random_interactions(10, 12, 0.3, rng);
    const NormalizedLaplacian lap = build_laplacian(r);
    const std::size_t total = 22;

    for (std::size_t i = 0; i < total; ++i) {
        for (std::size_t j = 0; j < total; ++j) {
            CHECK(lap.laplacian.at(i, j) == lap.laplacian.at(j, i));  // exact symmetry
        }
    }
    for (std::size_t u = 0; u < 10; ++u) {
        for (int i : r.items_of(u)) {
            const std::size_t item_node = 10 + static_cast<std::size_t>(i);
            const double expected =
                1.0 / std::sqrt(static_cast<double>(lap.degrees[u] * lap.degrees[item_node]));
            CHECK(std::abs(lap.laplacian.at(u, item_node) - expected) <= 1e-15);
        }
    }
    for (std::size_t t = 0; t < total; ++t) {
        CHECK(lap.laplacian_plus_identity.at(t, t) ==
              doctest::Approx(lap.laplacian.at(t, t) + 1.0));
    }
}

TEST_CASE("laplacian: zero-degree nodes contribute no nonzeros") {
    InteractionMatrix r(3, 3);
    r.add(0, 0);  // users 1, 2 and items 1, 2 stay isolated
    const NormalizedLaplacian lap = build_laplacian(r);
    CHECK(lap.laplacian.nnz() == 2);
    for (std::size_t j = 0; j < 6; ++j) {
        CHECK(lap.laplacian.at(1, j) == 0.0);
        CHECK(lap.laplacian.at(2, j) == 0.0);
    }
    CHECK(lap.laplacian_plus_identity.at(1, 1) == 1.0);
}

TEST_CASE("laplacian: row sums and spectral radius bound") {
    Rng rng(25);
    const InteractionMatrix r = random_interactions(60, 80, 0.08, rng);
    const NormalizedLaplacian lap = build_laplacian(r);
    const std::size_t total = 140;

    std::size_t max_degree = 0;
    for (std::size_t t = 0; t < total; ++t) {
        max_degree = std::max(max_degree, lap.degrees[t]);
    }
    for (std::size_t t = 0; t < total; ++t) {
        if (lap.degrees[t] == 0) continue;
        double row_sum = 0.0;
        for (std::size_t k = lap.laplacian.row_offsets()[t];
             k < lap.laplacian.row_offsets()[t + 1]; ++k) {
            row_sum += lap.laplacian.values()[k];
        }
        CHECK(row_sum > 0.0);
        CHECK(row_sum <= std::sqrt(static_cast<double>(max_degree)) + 1e-12);
    }

    // Power iteration on the symmetric laplacian.
    DenseMatrix v(total, 1, 1.0 / std::sqrt(static_cast<double>(total)));
    double eigenvalue = 0.0;
    for (int iter = 0; iter < 2000; ++iter) {
        const DenseMatrix w = spmm(lap.laplacian, v);
        const double norm = std::sqrt(squared_norm(w));
        if (norm == 0.0) break;
        v = scaled(w, 1.0 / norm);
        if (std::abs(norm - eigenvalue) < 1e-12) {
            eigenvalue = norm;
            break;
        }
        eigenvalue = norm;
    }
    CHECK(eigenvalue <= 1.0 + 1e-6);
}

TEST_CASE("kcore_filter: already-dense graph unchanged") {
    InteractionMatrix r(3, 3);
    for (std::size_t u = 0; u < 3; ++u) {
        for (std::size_t i = 0; i < 3; ++i) {
            r.add(u, i);
        }
    }
    const KcoreResult res = kcore_filter(r, 2);
    CHECK(res.filtered.n_users() == 3);
    CHECK(res.filtered.n_items() == 3);
    CHECK(res.filtered.nnz() == 9);
    for (std::size_t u = 0; u < 3; ++u) {
        CHECK(res.user_map[u] == static_cast<int>(u));
    }
}

TEST_CASE("kcore_filter: star graph collapses to empty") {
    InteractionMatrix star(1, 5);
    for (std::size_t i = 0; i < 5; ++i) {
        star.add(0, i);
    }
    const KcoreResult res = kcore_filter(star, 2);
    CHECK(res.filtered.n_users() == 0);
    CHECK(res.filtered.n_items() == 0);
    CHECK(res.filtered.nnz() == 0);
    CHECK(res.user_map[0] == -1);
}

TEST_CASE("kcore_filter matches the brute-force peeling oracle") {
    Rng rng(26);
    const InteractionMatrix r = random_interactions(50, 50, 0.06, rng);
    const std::size_t k = 3;
    const KcoreResult res = kcore_filter(r, k);
    const auto [user_alive, item_alive] = kcore_reference(r, k);

    for (std::size_t u = 0; u < 50; ++u) {
        CHECK((res.user_map[u] >= 0) == user_alive[u]);
    }
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK((res.item_map[i] >= 0) == item_alive[i]);
    }
    // Edges survive iff both endpoints survive.
    std::size_t expected_edges = 0;
    for (std::size_t u = 0; u < 50; ++u) {
        if (!user_alive[u]) continue;
        for (int i : r.items_of(u)) {
            if (item_alive[static_cast<std::size_t>(i)]) {
                ++expected_edges;
                CHECK(res.filtered.has(
                    static_cast<std::size_t>(res.user_map[u]),
                    static_cast<std::size_t>(res.item_map[static_cast<std::size_t>(i)])));
            }
        }
    }
    CHECK(res.filtered.nnz() == expected_edges);

    // Every survivor keeps degree >= k.
    for (std::size_t u = 0; u < res.filtered.n_users(); ++u) {
        CHECK(res.filtered.user_degree(u) >= k);
    }
    for (std::size_t deg : res.filtered.item_degrees()) {
        CHECK(deg >= k);
    }

    // Re-indexing is ascending in the original order.
    int last = -1;
    for (std::size_t u = 0; u < 50; ++u) {
        if (res.user_map[u] >= 0) {
            CHECK(res.user_map[u] == last + 1);
            last = res.user_map[u];
        }
    }
}

TEST_CASE("interaction matrix basics") {
    InteractionMatrix r(2, 3);
    r.add(0, 2);
    r.add(0, 0);
    r.add(0, 2);  // duplicate ignored
    CHECK(r.nnz() == 2);
    CHECK(r.items_of(0) == std::vector<int>{0, 2});
    CHECK(r.has(0, 2));
    CHECK(!r.has(1, 0));
    CHECK_THROWS_AS(r.add(5, 0), std::out_of_range);
}
