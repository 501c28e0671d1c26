#include "gvecf/propagation.hpp"

#include <cmath>
#include <stdexcept>

#include "gvecf/activations.hpp"

namespace gvecf {

void PropagationConfig::validate(std::size_t embed_dim) const {
    if (n_layers < 1) {
        throw std::invalid_argument("PropagationConfig: need at least one layer");
    }
    if (layer_dims.size() != n_layers) {
        throw std::invalid_argument("PropagationConfig: layer_dims length must equal n_layers");
    }
    for (std::size_t d : layer_dims) {
        if (d < 1) {
            throw std::invalid_argument("PropagationConfig: layer dims must be positive");
        }
    }
    if (embed_dim < 1) {
        throw std::invalid_argument("PropagationConfig: embedding width must be positive");
    }
    if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) {
        throw std::invalid_argument("PropagationConfig: leaky_slope must lie in (0, 1)");
    }
}

namespace {

// Core layer computation shared by the public matrix rule and the traced
// training path.
LayerTrace layer_forward(const DenseMatrix& z_prev, const LayerWeights& lw,
                         const SparseMatrix& lap, const SparseMatrix& lap_plus_i,
                         double slope, double msg_dropout, Rng* rng, DenseMatrix& out) {
    LayerTrace trace;
    trace.aggregated_self = spmm(lap_plus_i, z_prev);
    trace.aggregated = spmm(lap, z_prev);
    trace.interaction = hadamard(trace.aggregated, z_prev);
    trace.pre = matmul(trace.aggregated_self, lw.w1);
    trace.pre += matmul(trace.interaction, lw.w2);
    if (msg_dropout > 0.0) {
        if (rng == nullptr) {
            throw std::invalid_argument("propagate_forward: message dropout requires an rng");
        }
        const double scale = 1.0 / (1.0 - msg_dropout);
        trace.dropout_mask = DenseMatrix(trace.pre.rows(), trace.pre.cols());
        for (std::size_t idx = 0; idx < trace.pre.size(); ++idx) {
            const double keep = rng->uniform() >= msg_dropout ? scale : 0.0;
            trace.dropout_mask.data()[idx] = keep;
            trace.pre.data()[idx] *= keep;
        }
    }
    out = leaky_relu(trace.pre, slope);
    return trace;
}

}  // namespace

DenseMatrix propagate_layer_matrix(const DenseMatrix& z_prev, const LayerWeights& lw,
                                   const NormalizedLaplacian& lap, double slope) {
    DenseMatrix out;
    layer_forward(z_prev, lw, lap.laplacian, lap.laplacian_plus_identity, slope, 0.0, nullptr,
                  out);
    return out;
}

DenseMatrix propagate_layer_per_edge(const DenseMatrix& z_prev, const LayerWeights& lw,
                                     const InteractionMatrix& graph, double slope) {
    const std::size_t n = graph.n_users();
    const std::size_t m = graph.n_items();
    if (z_prev.rows() != n + m) {
        throw std::invalid_argument("propagate_layer_per_edge: embedding rows != N+M");
    }
    const std::size_t d_in = z_prev.cols();
    const std::size_t d_out = lw.w1.cols();

    std::vector<std::size_t> degree(n + m, 0);
    for (std::size_t u = 0; u < n; ++u) {
        degree[u] = graph.user_degree(u);
    }
    const auto item_deg = graph.item_degrees();
    for (std::size_t i = 0; i < m; ++i) {
        degree[n + i] = item_deg[i];
    }

    const auto transform = [&](std::span<const double> vec, const DenseMatrix& w,
                               std::span<double> acc, double coeff) {
        for (std::size_t a = 0; a < d_in; ++a) {
            const double v = coeff * vec[a];
            if (v == 0.0) continue;
            for (std::size_t b = 0; b < d_out; ++b) {
                acc[b] += v * w(a, b);
            }
        }
    };

    DenseMatrix sum(n + m, d_out, 0.0);
    std::vector<double> interaction(d_in);

    // Self messages.
    for (std::size_t t = 0; t < n + m; ++t) {
        transform(z_prev.row(t), lw.w1, sum.row(t), 1.0);
    }
    // Neighbor messages, both directions of every edge.
    for (std::size_t u = 0; u < n; ++u) {
        for (int i : graph.items_of(u)) {
            const std::size_t item_node = n + static_cast<std::size_t>(i);
            const double decay =
                1.0 / std::sqrt(static_cast<double>(degree[u]) * static_cast<double>(degree[item_node]));
            // item -> user
            for (std::size_t a = 0; a < d_in; ++a) {
                interaction[a] = z_prev(item_node, a) * z_prev(u, a);
            }
            transform(z_prev.row(item_node), lw.w1, sum.row(u), decay);
            transform(interaction, lw.w2, sum.row(u), decay);
            // user -> item
            for (std::size_t a = 0; a < d_in; ++a) {
                interaction[a] = z_prev(u, a) * z_prev(item_node, a);
            }
            transform(z_prev.row(u), lw.w1, sum.row(item_node), decay);
            transform(interaction, lw.w2, sum.row(item_node), decay);
        }
    }
    return leaky_relu(sum, slope);
}

ForwardTrace propagate_forward(const DenseMatrix& z0, const std::vector<LayerWeights>& weights,
                               const SparseMatrix& lap, const SparseMatrix& lap_plus_i,
                               std::size_t n_users, double slope, double msg_dropout, Rng* rng) {
    if (z0.rows() != lap.rows()) {
        throw std::invalid_argument("propagate_forward: embedding rows != laplacian size");
    }
    ForwardTrace trace;
    trace.state.n_users = n_users;
    trace.state.layer_embeddings.push_back(z0);
    trace.layers.reserve(weights.size());
    for (const auto& lw : weights) {
        const DenseMatrix& z_prev = trace.state.layer_embeddings.back();
        if (z_prev.cols() != lw.w1.rows() || z_prev.cols() != lw.w2.rows()) {
            throw std::invalid_argument("propagate_forward: weight chain mismatch");
        }
        DenseMatrix out;
        trace.layers.push_back(
            layer_forward(z_prev, lw, lap, lap_plus_i, slope, msg_dropout, rng, out));
        trace.state.layer_embeddings.push_back(std::move(out));
    }
    trace.state.concatenated = concat_columns(trace.state.layer_embeddings);
    return trace;
}

PropagationState propagate_all(const DenseMatrix& z0, const std::vector<LayerWeights>& weights,
                               const NormalizedLaplacian& lap, const PropagationConfig& cfg) {
    cfg.validate(z0.cols());
    if (weights.size() != cfg.n_layers) {
        throw std::invalid_argument("propagate_all: weight count must equal n_layers");
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (weights[l].w1.cols() != cfg.layer_dims[l] || weights[l].w2.cols() != cfg.layer_dims[l]) {
            throw std::invalid_argument("propagate_all: weight dims disagree with layer_dims");
        }
    }
    return propagate_forward(z0, weights, lap.laplacian, lap.laplacian_plus_identity, lap.n_users,
                             cfg.leaky_slope)
        .state;
}

PropagationGrads propagate_backward(const ForwardTrace& trace,
                                    const std::vector<LayerWeights>& weights,
                                    const SparseMatrix& lap, const SparseMatrix& lap_plus_i,
                                    double slope, const DenseMatrix& grad_concat) {
    const auto& z = trace.state.layer_embeddings;
    const std::size_t n_layers = weights.size();
    if (z.size() != n_layers + 1 || trace.layers.size() != n_layers) {
        throw std::invalid_argument("propagate_backward: trace does not match weights");
    }

    // Split the concatenated gradient back into per-layer blocks.
    std::vector<DenseMatrix> grad_z(n_layers + 1);
    std::size_t offset = 0;
    for (std::size_t l = 0; l <= n_layers; ++l) {
        grad_z[l] = DenseMatrix(z[l].rows(), z[l].cols());
        for (std::size_t i = 0; i < z[l].rows(); ++i) {
            auto dst = grad_z[l].row(i);
            auto src = grad_concat.row(i);
            for (std::size_t j = 0; j < z[l].cols(); ++j) {
                dst[j] = src[offset + j];
            }
        }
        offset += z[l].cols();
    }

    PropagationGrads grads;
    grads.weights.resize(n_layers);
    for (std::size_t l = n_layers; l-- > 0;) {
        const LayerTrace& lt = trace.layers[l];
        const DenseMatrix& z_prev = z[l];
        DenseMatrix grad_pre = grad_z[l + 1];
        for (std::size_t idx = 0; idx < grad_pre.size(); ++idx) {
            grad_pre.data()[idx] *= leaky_relu_derivative(lt.pre.data()[idx], slope);
        }
        if (!lt.dropout_mask.empty()) {
            for (std::size_t idx = 0; idx < grad_pre.size(); ++idx) {
                grad_pre.data()[idx] *= lt.dropout_mask.data()[idx];
            }
        }

        grads.weights[l].w1 = matmul(transpose(lt.aggregated_self), grad_pre);
        grads.weights[l].w2 = matmul(transpose(lt.interaction), grad_pre);

        // Sum pathway: pre += (L+I) z_prev W1.
        const DenseMatrix grad_agg_self = matmul(grad_pre, transpose(weights[l].w1));
        grad_z[l] += spmm(lap_plus_i, grad_agg_self);  // (L+I) is symmetric

        // Interaction pathway: pre += ((L z_prev) ⊙ z_prev) W2.
        const DenseMatrix grad_inter = matmul(grad_pre, transpose(weights[l].w2));
        grad_z[l] += spmm(lap, hadamard(grad_inter, z_prev));
        grad_z[l] += hadamard(grad_inter, lt.aggregated);
    }
    grads.z0 = std::move(grad_z[0]);
    return grads;
}

double score(const PropagationState& state, std::size_t user, std::size_t item) {
    const std::size_t total = state.concatenated.rows();
    if (user >= state.n_users || state.n_users + item >= total) {
        throw std::out_of_range("score: user or item index out of range");
    }
    return dot(state.concatenated.row(user), state.concatenated.row(state.n_users + item));
}

std::vector<double> score_all_items(const PropagationState& state, std::size_t user) {
    if (user >= state.n_users) {
        throw std::out_of_range("score_all_items: user index out of range");
    }
    const std::size_t n_items = state.concatenated.rows() - state.n_users;
    std::vector<double> scores(n_items);
    for (std::size_t i = 0; i < n_items; ++i) {
        scores[i] = dot(state.concatenated.row(user), state.concatenated.row(state.n_users + i));
    }
    return scores;
}

std::pair<SparseMatrix, SparseMatrix> node_dropout_laplacian(const NormalizedLaplacian& lap,
                                                             double nd, Rng& rng) {
    if (!(nd >= 0.0 && nd < 1.0)) {
        throw std::invalid_argument("node_dropout_laplacian: nd must lie in [0, 1)");
    }
    const std::size_t total = lap.laplacian.rows();
    std::vector<bool> keep(total);
    for (std::size_t t = 0; t < total; ++t) {
        keep[t] = rng.uniform() >= nd;
    }
    const double scale = 1.0 / (1.0 - nd);
    std::vector<Triplet> entries;
    entries.reserve(lap.laplacian.nnz());
    for (std::size_t r = 0; r < total; ++r) {
        if (!keep[r]) continue;
        for (std::size_t k = lap.laplacian.row_offsets()[r]; k < lap.laplacian.row_offsets()[r + 1];
             ++k) {
            const std::size_t c = lap.laplacian.col_indices()[k];
            if (keep[c]) {
                entries.push_back({r, c, lap.laplacian.values()[k] * scale});
            }
        }
    }
    SparseMatrix dropped = SparseMatrix::from_triplets(total, total, std::move(entries));
    SparseMatrix dropped_plus_i = add_identity(dropped);
    return {std::move(dropped), std::move(dropped_plus_i)};
}

}  // namespace gvecf
