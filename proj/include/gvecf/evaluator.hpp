#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gvecf/interaction.hpp"
#include "gvecf/laplacian.hpp"
#include "gvecf/propagation.hpp"

namespace gvecf {

// Non-owning view of a train/held-out split: test_items holds one sorted item
// list per user, disjoint from the user's training positives.
struct EvalSplit {
    const InteractionMatrix* train = nullptr;
    const std::vector<std::vector<int>>* test_items = nullptr;
};

struct MetricsReport {
    double recall_at_k = 0.0;
    double ndcg_at_k = 0.0;
    std::size_t k = 0;
    std::size_t n_users_evaluated = 0;
    std::size_t skipped_users = 0;  // users with no rankable candidates
    std::vector<double> per_user_recall;
    std::vector<double> per_user_ndcg;

    std::string to_json() const;  // keys: k, recall, ndcg, n_users, skipped_users
};

// The k highest-scoring non-excluded items, descending score, ties broken by
// ascending item index. exclude must be sorted. Returns fewer than k only
// when fewer candidates exist.
std::vector<int> top_k(std::span<const double> scores, const std::vector<int>& exclude, std::size_t k);

// |topk ∩ test| / |test|; test must be sorted and non-empty.
double recall_at_k(const std::vector<int>& topk, const std::vector<int>& test);

// Binary-relevance NDCG: DCG sums 1/log2(rank+1) over hits; the ideal DCG is
// truncated at min(k, |test|) with k taken as the list length.
double ndcg_at_k(const std::vector<int>& topk, const std::vector<int>& test);

// One dropout-free forward pass, then per-user ranking with training
// positives excluded. Users without test items are left out of the averages;
// users with no rankable candidates are skipped and counted.
MetricsReport evaluate(const DenseMatrix& z0, const std::vector<LayerWeights>& weights,
                       const NormalizedLaplacian& lap, const PropagationConfig& cfg,
                       const EvalSplit& split, std::size_t k);

// Ranking-only variant used once a forward state is already available.
MetricsReport evaluate_state(const PropagationState& state, const EvalSplit& split, std::size_t k);

}  // namespace gvecf
