#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gvecf/adam.hpp"
#include "gvecf/dense_matrix.hpp"
#include "gvecf/evaluator.hpp"
#include "gvecf/interaction.hpp"
#include "gvecf/propagation.hpp"
#include "gvecf/rng.hpp"

namespace gvecf {

struct TrainConfig {
    std::size_t batch_size = 1024;
    std::size_t epochs = 400;
    double lr = 1e-4;
    double reg_lambda = 1e-5;
    double node_dropout = 0.0;
    double msg_dropout = 0.0;
    std::uint64_t seed = 0;
    std::size_t eval_every = 0;  // 0 = never evaluate during training
    bool early_stopping = false;
    std::size_t patience = 10;

    void validate() const;
};

// One pairwise training example: a user, one observed item, one unobserved item.
struct BprTriple {
    std::size_t user = 0;
    std::size_t pos_item = 0;
    std::size_t neg_item = 0;
};

// All trainable tensors plus their optimizer state. z0 stays trainable after
// initialization: pre-training supplies a starting point, not frozen values.
struct ModelParams {
    DenseMatrix z0;
    std::vector<LayerWeights> layer_weights;
    AdamState z0_opt;
    std::vector<AdamState> w1_opt;
    std::vector<AdamState> w2_opt;
    std::size_t n_users = 0;

    static ModelParams init(DenseMatrix z0_init, std::size_t n_users,
                            const PropagationConfig& cfg, Rng& rng);

    std::vector<DenseMatrix*> trainable();
    std::vector<const DenseMatrix*> trainable() const;
};

// Uniform users with replacement, one uniform positive each, one uniform
// negative by rejection against the user's positives. Users without a
// positive or without any negative are skipped and resampled; throws when no
// valid triple exists at all.
std::vector<BprTriple> sample_bpr_batch(const InteractionMatrix& r, std::size_t batch_size,
                                        Rng& rng);

struct BprLoss {
    double total = 0.0;
    double ranking = 0.0;         // mean over the batch of -log sigmoid(s_ui - s_uj)
    double regularization = 0.0;  // squared L2 of touched z0 rows + all layer weights
};

// Loss value only; used by tests and the finite-difference harness.
BprLoss bpr_loss_value(const PropagationState& state, const std::vector<BprTriple>& batch,
                       const ModelParams& params, double reg_lambda);

using BprGradients = PropagationGrads;

// Loss plus analytic gradients for every tensor in the parameter pack.
std::pair<BprLoss, BprGradients> bpr_loss(const ForwardTrace& trace,
                                          const std::vector<BprTriple>& batch,
                                          const ModelParams& params, double reg_lambda,
                                          const SparseMatrix& lap, const SparseMatrix& lap_plus_i,
                                          double leaky_slope);

struct HistoryRow {
    std::size_t epoch = 0;
    double loss = 0.0;
    double recall = 0.0;
    double ndcg = 0.0;
    double seconds = 0.0;  // wall time since training start
    bool evaluated = false;
};

struct TrainResult {
    ModelParams params;
    std::vector<HistoryRow> history;
    std::string final_rng_state;
};

// Mini-batch BPR training. Per epoch: resample the node-dropout laplacian,
// run ceil(|R+| / batch_size) batches of forward / loss / Adam, then record
// loss (and ranking metrics every eval_every epochs when a held-out split is
// given). Deterministic under a fixed seed.
TrainResult train(const InteractionMatrix& r, const DenseMatrix& z0_init, const TrainConfig& cfg,
                  const PropagationConfig& pcfg, const EvalSplit* heldout = nullptr,
                  std::size_t eval_k = 20);

struct GridCell {
    double lr = 0.0;
    double reg_lambda = 0.0;
    double node_dropout = 0.0;
    double recall = 0.0;
    double ndcg = 0.0;
    bool diverged = false;
};

struct GridSearchResult {
    TrainConfig best;
    std::vector<GridCell> table;  // one row per grid cell, iteration order
};

// Trains every lr x reg x node-dropout cell under the template budget and
// selects by validation recall@k (first cell wins ties). Divergent cells are
// recorded with recall 0.
GridSearchResult grid_search(const InteractionMatrix& r, const DenseMatrix& z0_init,
                             const std::vector<double>& lrs, const std::vector<double>& regs,
                             const std::vector<double>& node_dropouts, const TrainConfig& base,
                             const PropagationConfig& pcfg, const EvalSplit& validation,
                             std::size_t eval_k = 20);

}  // namespace gvecf
