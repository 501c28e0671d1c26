#include "gvecf/laplacian.hpp"

#include <cmath>

namespace gvecf {

SparseMatrix build_adjacency(const InteractionMatrix& r) {
    const std::size_t n = r.n_users();
    const std::size_t m = r.n_items();
    std::vector<Triplet> entries;
    entries.reserve(2 * r.nnz());
    for (std::size_t u = 0; u < n; ++u) {
        for (int i : r.items_of(u)) {
            const std::size_t item_node = n + static_cast<std::size_t>(i);
            entries.push_back({u, item_node, 1.0});
            entries.push_back({item_node, u, 1.0});
        }
    }
    return SparseMatrix::from_triplets(n + m, n + m, std::move(entries));
}

NormalizedLaplacian build_laplacian(const InteractionMatrix& r) {
    const std::size_t n = r.n_users();
    const std::size_t m = r.n_items();
    NormalizedLaplacian lap;
    lap.n_users = n;
    lap.n_items = m;
    lap.degrees.assign(n + m, 0);
    for (std::size_t u = 0; u < n; ++u) {
        lap.degrees[u] = r.user_degree(u);
    }
    const auto item_deg = r.item_degrees();
    for (std::size_t i = 0; i < m; ++i) {
        lap.degrees[n + i] = item_deg[i];
    }

    std::vector<double> inv_sqrt(n + m, 0.0);  // 0/0 convention for isolated nodes
    for (std::size_t t = 0; t < n + m; ++t) {
        if (lap.degrees[t] > 0) {
            inv_sqrt[t] = 1.0 / std::sqrt(static_cast<double>(lap.degrees[t]));
        }
    }

    std::vector<Triplet> entries;
    entries.reserve(2 * r.nnz());
    for (std::size_t u = 0; u < n; ++u) {
        for (int i : r.items_of(u)) {
            const std::size_t item_node = n + static_cast<std::size_t>(i);
            const double value = inv_sqrt[u] * inv_sqrt[item_node];
            entries.push_back({u, item_node, value});
            entries.push_back({item_node, u, value});
        }
    }
    lap.laplacian = SparseMatrix::from_triplets(n + m, n + m, std::move(entries));
    lap.laplacian_plus_identity = add_identity(lap.laplacian);
    return lap;
}

KcoreResult kcore_filter(const InteractionMatrix& r, std::size_t k) {
    const std::size_t n = r.n_users();
    const std::size_t m = r.n_items();
    std::vector<std::size_t> user_deg(n, 0);
    for (std::size_t u = 0; u < n; ++u) {
        user_deg[u] = r.user_degree(u);
    }
    std::vector<std::size_t> item_deg = r.item_degrees();
    std::vector<bool> user_alive(n, true), item_alive(m, true);

    // Peel until no under-degree node remains.
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t u = 0; u < n; ++u) {
            if (user_alive[u] && user_deg[u] < k) {
                user_alive[u] = false;
                changed = true;
                for (int i : r.items_of(u)) {
                    if (item_alive[static_cast<std::size_t>(i)]) {
                        --item_deg[static_cast<std::size_t>(i)];
                    }
                }
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (item_alive[i] && item_deg[i] < k) {
                item_alive[i] = false;
                changed = true;
            }
        }
        if (changed) {
            // Recompute user degrees against surviving items.
            for (std::size_t u = 0; u < n; ++u) {
                if (!user_alive[u]) continue;
                std::size_t deg = 0;
                for (int i : r.items_of(u)) {
                    if (item_alive[static_cast<std::size_t>(i)]) {
                        ++deg;
                    }
                }
                user_deg[u] = deg;
            }
        }
    }

    KcoreResult result;
    result.user_map.assign(n, -1);
    result.item_map.assign(m, -1);
    std::size_t next_user = 0;
    for (std::size_t u = 0; u < n; ++u) {
        if (user_alive[u]) {
            result.user_map[u] = static_cast<int>(next_user++);
        }
    }
    std::size_t next_item = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (item_alive[i]) {
            result.item_map[i] = static_cast<int>(next_item++);
        }
    }
    result.filtered = InteractionMatrix(next_user, next_item);
    for (std::size_t u = 0; u < n; ++u) {
        if (!user_alive[u]) continue;
        for (int i : r.items_of(u)) {
            if (item_alive[static_cast<std::size_t>(i)]) {
                result.filtered.add(static_cast<std::size_t>(result.user_map[u]),
                                    static_cast<std::size_t>(result.item_map[static_cast<std::size_t>(i)]));
            }
        }
    }
    return result;
}

}  // namespace gvecf
