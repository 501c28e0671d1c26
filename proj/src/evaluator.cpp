#include "gvecf/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace gvecf {

std::string MetricsReport::to_json() const {
    nlohmann::json j;
    j["k"] = k;
    j["recall"] = recall_at_k;
    j["ndcg"] = ndcg_at_k;
    j["n_users"] = n_users_evaluated;
    j["skipped_users"] = skipped_users;
    return j.dump(2);
}

std::vector<int> top_k(std::span<const double> scores, const std::vector<int>& exclude,
                       std::size_t k) {
    if (k < 1) {
        throw std::invalid_argument("top_k: k must be positive");
    }
    std::vector<int> candidates;
    candidates.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::binary_search(exclude.begin(), exclude.end(), static_cast<int>(i))) {
            candidates.push_back(static_cast<int>(i));
        }
    }
    const std::size_t take = std::min(k, candidates.size());
    const auto better = [&](int a, int b) {
        const double sa = scores[static_cast<std::size_t>(a)];
        const double sb = scores[static_cast<std::size_t>(b)];
        return sa != sb ? sa > sb : a < b;
    };
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                      candidates.end(), better);
    candidates.resize(take);
    return candidates;
}

double recall_at_k(const std::vector<int>& topk, const std::vector<int>& test) {
    if (test.empty()) {
        throw std::invalid_argument("recall_at_k: test set must be non-empty");
    }
    std::size_t hits = 0;
    for (int item : topk) {
        if (std::binary_search(test.begin(), test.end(), item)) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(test.size());
}

double ndcg_at_k(const std::vector<int>& topk, const std::vector<int>& test) {
    if (test.empty()) {
        throw std::invalid_argument("ndcg_at_k: test set must be non-empty");
    }
    double dcg = 0.0;
    for (std::size_t rank = 0; rank < topk.size(); ++rank) {
        if (std::binary_search(test.begin(), test.end(), topk[rank])) {
            dcg += 1.0 / std::log2(static_cast<double>(rank) + 2.0);
        }
    }
    const std::size_t ideal = std::min(topk.size(), test.size());
    double idcg = 0.0;
    for (std::size_t rank = 0; rank < ideal; ++rank) {
        idcg += 1.0 / std::log2(static_cast<double>(rank) + 2.0);
    }
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

MetricsReport evaluate_state(const PropagationState& state, const EvalSplit& split, std::size_t k) {
    if (split.train == nullptr || split.test_items == nullptr) {
        throw std::invalid_argument("evaluate: split is not bound");
    }
    const InteractionMatrix& train = *split.train;
    const auto& test = *split.test_items;
    if (test.size() != train.n_users()) {
        throw std::invalid_argument("evaluate: test list count != user count");
    }

    MetricsReport report;
    report.k = k;
    double recall_sum = 0.0;
    double ndcg_sum = 0.0;
    for (std::size_t u = 0; u < train.n_users(); ++u) {
        if (test[u].empty()) {
            continue;
        }
        const auto& exclude = train.items_of(u);
        if (exclude.size() >= train.n_items()) {
            ++report.skipped_users;  // nothing left to rank
            continue;
        }
        const std::vector<double> scores = score_all_items(state, u);
        const std::vector<int> ranked = top_k(scores, exclude, k);
        const double r = recall_at_k(ranked, test[u]);
        const double n = ndcg_at_k(ranked, test[u]);
        report.per_user_recall.push_back(r);
        report.per_user_ndcg.push_back(n);
        recall_sum += r;
        ndcg_sum += n;
        ++report.n_users_evaluated;
    }
    if (report.n_users_evaluated > 0) {
        report.recall_at_k = recall_sum / static_cast<double>(report.n_users_evaluated);
        report.ndcg_at_k = ndcg_sum / static_cast<double>(report.n_users_evaluated);
    }
    return report;
}

MetricsReport evaluate(const DenseMatrix& z0, const std::vector<LayerWeights>& weights,
                       const NormalizedLaplacian& lap, const PropagationConfig& cfg,
                       const EvalSplit& split, std::size_t k) {
    const PropagationState state = propagate_all(z0, weights, lap, cfg);
    return evaluate_state(state, split, k);
}

}  // namespace gvecf
