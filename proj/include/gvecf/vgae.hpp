#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gvecf/dense_matrix.hpp"
#include "gvecf/interaction.hpp"
#include "gvecf/laplacian.hpp"
#include "gvecf/rng.hpp"
#include "gvecf/sparse_matrix.hpp"

namespace gvecf {

enum class EncoderMode { variational, deterministic };
enum class FeatureMode { laplacian_rows, identity };

struct EncoderConfig {
    std::vector<std::size_t> hidden_dims = {128, 64};
    std::size_t latent_dim = 64;
    double learning_rate = 0.01;
    std::size_t epochs = 200;
    EncoderMode mode = EncoderMode::variational;
    FeatureMode features = FeatureMode::laplacian_rows;
    double negative_sample_ratio = 1.0;
    double kl_weight = 1.0;
    double leaky_slope = 0.2;
    std::uint64_t seed = 0;

    void validate() const;
};

// Per-node Gaussian posterior parameters. log_sigma stays empty in
// deterministic mode.
struct VariationalEmbeddings {
    DenseMatrix mu;         // (N+M) x d
    DenseMatrix log_sigma;  // (N+M) x d, or empty
    std::size_t latent_dim = 0;
};

// Self-looped symmetric-normalized adjacency over the bipartite graph:
// off-diagonal entries 1/sqrt((|N_u|+1)(|N_i|+1)) on edges, diagonal
// 1/(|N_t|+1) for every node.
SparseMatrix gcn_normalized_adjacency(const InteractionMatrix& r);

// Graph encoder: a shared GCN trunk (each layer LeakyReLU(A H W) over the
// self-looped normalized adjacency) followed by two linear heads producing mu
// and log sigma. Deterministic mode carries only the mu head.
class GraphEncoder {
public:
    GraphEncoder(std::size_t in_dim, const EncoderConfig& cfg, Rng& rng);

    struct Forward {
        std::vector<DenseMatrix> pre;     // trunk pre-activations
        std::vector<DenseMatrix> hidden;  // trunk outputs
        DenseMatrix mu;
        DenseMatrix log_sigma;  // empty in deterministic mode
    };

    Forward forward(const SparseMatrix& features, const SparseMatrix& adjacency) const;
    Forward forward(const DenseMatrix& features, const SparseMatrix& adjacency) const;

    struct Gradients {
        std::vector<DenseMatrix> trunk;
        DenseMatrix w_mu;
        DenseMatrix w_log_sigma;  // empty in deterministic mode
    };

    // Backpropagates head gradients to all weights. features must be
    // symmetric (laplacian rows or identity, as used in training).
    Gradients backward(const Forward& fwd, const SparseMatrix& features,
                       const SparseMatrix& adjacency, const DenseMatrix& grad_mu,
                       const DenseMatrix& grad_log_sigma) const;

    std::vector<DenseMatrix*> trainable();
    std::vector<const DenseMatrix*> trainable() const;

    const EncoderConfig& config() const { return cfg_; }

    // Smallest trunk pre-activation magnitude of a forward pass; gradient
    // checks re-sample when this comes too close to the LeakyReLU kink.
    static double min_abs_preactivation(const Forward& fwd);

private:
    EncoderConfig cfg_;
    std::vector<DenseMatrix> trunk_;  // one weight per trunk layer
    DenseMatrix w_mu_;
    DenseMatrix w_log_sigma_;
};

// z = mu + exp(log_sigma) ⊙ eps with eps ~ N(0, I); log_sigma is clamped to
// [-10, 10] before exponentiation.
DenseMatrix reparameterize(const DenseMatrix& mu, const DenseMatrix& log_sigma, Rng& rng);
DenseMatrix reparameterize_with_noise(const DenseMatrix& mu, const DenseMatrix& log_sigma,
                                      const DenseMatrix& eps);

// Edge reconstruction probability: sigmoid of the inner product.
double decode_edge(std::span<const double> z_i, std::span<const double> z_j);

// Labelled pair sample for the reconstruction term.
struct EdgeSample {
    std::vector<std::uint32_t> first;
    std::vector<std::uint32_t> second;
    std::vector<double> label;   // 1 = edge, 0 = non-edge
    std::vector<double> weight;  // per-pair BCE weight
    double weight_sum = 0.0;

    std::size_t size() const { return first.size(); }
    void push(std::uint32_t a, std::uint32_t b, double y, double w);
};

// All unordered node pairs (i < j) labelled against the bipartite adjacency,
// unit weights.
EdgeSample full_edge_sample(const InteractionMatrix& r);

// All positive edges plus ratio x uniformly sampled non-edges; positives are
// weighted by (#neg / #pos).
EdgeSample sampled_edge_sample(const InteractionMatrix& r, double negative_ratio, Rng& rng);

struct ElboLoss {
    double total = 0.0;
    double reconstruction = 0.0;
    double kl = 0.0;
};

// Weighted-mean binary cross-entropy over the sample plus kl_weight times the
// mean per-node Gaussian KL against the unit prior. Deterministic mode (empty
// log_sigma) omits the KL term.
ElboLoss elbo_loss(const DenseMatrix& mu, const DenseMatrix& log_sigma, const DenseMatrix& z,
                   const EdgeSample& sample, double kl_weight);

struct VgaeEpochStats {
    double total = 0.0;
    double reconstruction = 0.0;
    double kl = 0.0;
};

struct VgaeResult {
    VariationalEmbeddings embeddings;
    std::vector<VgaeEpochStats> history;  // entry e = loss entering epoch e; last = final
    std::string final_rng_state;
};

// Full-batch Adam training of the encoder on edge reconstruction (+ KL in
// variational mode). Deterministic under a fixed seed.
VgaeResult train_vgae(const InteractionMatrix& r, const EncoderConfig& cfg);

// Posterior means as the exported layer-0 embeddings; optionally one sampled
// draw instead.
DenseMatrix export_embeddings(const VariationalEmbeddings& ve, bool sample = false,
                              Rng* rng = nullptr);

}  // namespace gvecf
