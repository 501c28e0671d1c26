#pragma once

#include <cstddef>
#include <vector>

#include "gvecf/dense_matrix.hpp"
#include "gvecf/laplacian.hpp"
#include "gvecf/rng.hpp"
#include "gvecf/sparse_matrix.hpp"

namespace gvecf {

enum class InitMode { variational, gae, xavier };

struct PropagationConfig {
    std::size_t n_layers = 3;
    std::vector<std::size_t> layer_dims = {64, 64, 64};
    double leaky_slope = 0.2;
    InitMode init_mode = InitMode::variational;

    // embed_dim is the width of the layer-0 embeddings feeding the stack.
    void validate(std::size_t embed_dim) const;
};

// Per-layer transforms: one matrix for the aggregated-sum pathway and one for
// the neighbor-interaction (Hadamard) pathway.
struct LayerWeights {
    DenseMatrix w1;
    DenseMatrix w2;
};

// Stack of layer embeddings plus their column-wise concatenation. Immutable
// once built; evaluation may score many users concurrently against one state.
struct PropagationState {
    std::vector<DenseMatrix> layer_embeddings;  // z0 .. zL
    DenseMatrix concatenated;                   // (N+M) x sum(dims)
    std::size_t n_users = 0;
};

// One propagation layer in matrix form:
//   LeakyReLU((L+I) Z W1 + ((L Z) ⊙ Z) W2)
// The Hadamard pathway uses L (not L+I), so a node with no neighbors receives
// nothing through W2.
DenseMatrix propagate_layer_matrix(const DenseMatrix& z_prev, const LayerWeights& lw,
                                   const NormalizedLaplacian& lap, double slope);

// Reference construction of the same layer as an explicit loop over edges:
// per-edge messages 1/sqrt(|N_t||N_s|) (z_s W1 + (z_s ⊙ z_t) W2), a self
// message z_t W1, summed then passed through LeakyReLU. Test oracle, not the
// hot path.
DenseMatrix propagate_layer_per_edge(const DenseMatrix& z_prev, const LayerWeights& lw,
                                     const InteractionMatrix& graph, double slope);

// Stacks cfg.n_layers matrix-rule layers and concatenates all L+1 embeddings.
PropagationState propagate_all(const DenseMatrix& z0, const std::vector<LayerWeights>& weights,
                               const NormalizedLaplacian& lap, const PropagationConfig& cfg);

// Preference score for (user, item): inner product of their concatenated
// representations. The item row is offset by n_users internally.
double score(const PropagationState& state, std::size_t user, std::size_t item);

// Scores of one user against all items; equals per-item score() calls exactly.
std::vector<double> score_all_items(const PropagationState& state, std::size_t user);

// --- training-path forward/backward with caches -----------------------------

struct LayerTrace {
    DenseMatrix aggregated_self;  // (L+I) z_prev
    DenseMatrix aggregated;       // L z_prev
    DenseMatrix interaction;      // (L z_prev) ⊙ z_prev
    DenseMatrix pre;              // LeakyReLU input (message dropout applied)
    DenseMatrix dropout_mask;     // scaled keep mask; empty when dropout is off
};

struct ForwardTrace {
    PropagationState state;
    std::vector<LayerTrace> layers;
};

// Forward pass over explicit laplacian operands (callers substitute
// node-dropped matrices during training). msg_dropout > 0 requires rng.
ForwardTrace propagate_forward(const DenseMatrix& z0, const std::vector<LayerWeights>& weights,
                               const SparseMatrix& lap, const SparseMatrix& lap_plus_i,
                               std::size_t n_users, double slope, double msg_dropout = 0.0,
                               Rng* rng = nullptr);

struct PropagationGrads {
    DenseMatrix z0;
    std::vector<LayerWeights> weights;
};

// Backpropagates a gradient w.r.t. the concatenated representation through
// the layer stack.
PropagationGrads propagate_backward(const ForwardTrace& trace,
                                    const std::vector<LayerWeights>& weights,
                                    const SparseMatrix& lap, const SparseMatrix& lap_plus_i,
                                    double slope, const DenseMatrix& grad_concat);

// Node dropout: zeroes the rows and columns of every dropped node in L and
// rescales surviving entries by 1/(1-nd). The unit diagonal of L+I is kept
// for all nodes, so self messages survive. Returns {L_drop, L_drop + I}.
std::pair<SparseMatrix, SparseMatrix> node_dropout_laplacian(const NormalizedLaplacian& lap,
                                                             double nd, Rng& rng);

}  // namespace gvecf
