#pragma once

#include <cstddef>
#include <vector>

#include "gvecf/interaction.hpp"
#include "gvecf/sparse_matrix.hpp"

namespace gvecf {

// Symmetric-normalized adjacency of the bipartite interaction graph over
// N + M nodes (users first, then items). Zero-degree nodes contribute no
// nonzeros to the laplacian; the plus-identity variant carries a unit
// diagonal for every node.
struct NormalizedLaplacian {
    SparseMatrix laplacian;                // D^{-1/2} A D^{-1/2}
    SparseMatrix laplacian_plus_identity;  // laplacian + I
    std::vector<std::size_t> degrees;      // per node, users then items
    std::size_t n_users = 0;
    std::size_t n_items = 0;
};

// Block adjacency [[0, R], [R^T, 0]] of size (N+M) x (N+M); user nodes occupy
// indices 0..N-1, items N..N+M-1.
SparseMatrix build_adjacency(const InteractionMatrix& r);

NormalizedLaplacian build_laplacian(const InteractionMatrix& r);

struct KcoreResult {
    InteractionMatrix filtered;
    std::vector<int> user_map;  // old -> new index, -1 when pruned
    std::vector<int> item_map;
};

// Iteratively removes users and items with fewer than k interactions until a
// fixed point, then re-indexes survivors densely in ascending original order.
// A fully pruned graph yields an explicit empty result.
KcoreResult kcore_filter(const InteractionMatrix& r, std::size_t k);

}  // namespace gvecf
