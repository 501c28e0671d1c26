#include "gvecf/vgae.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gvecf/activations.hpp"
#include "gvecf/adam.hpp"
#include "gvecf/initializer.hpp"

namespace gvecf {

namespace {

constexpr double kLogSigmaClamp = 10.0;
constexpr std::size_t kFullSampleNodeLimit = 2000;

double clamp_log_sigma(double v) {
    if (v > kLogSigmaClamp) return kLogSigmaClamp;
    if (v < -kLogSigmaClamp) return -kLogSigmaClamp;
    return v;
}

}  // namespace

void EncoderConfig::validate() const {
    if (hidden_dims.empty()) {
        throw std::invalid_argument("EncoderConfig: hidden_dims must be non-empty");
    }
    for (std::size_t d : hidden_dims) {
        if (d < 1) {
            throw std::invalid_argument("EncoderConfig: hidden dims must be positive");
        }
    }
    if (latent_dim < 1) {
        throw std::invalid_argument("EncoderConfig: latent_dim must be positive");
    }
    if (!(learning_rate > 0.0)) {
        throw std::invalid_argument("EncoderConfig: learning rate must be positive");
    }
    if (!(negative_sample_ratio > 0.0)) {
        throw std::invalid_argument("EncoderConfig: negative_sample_ratio must be positive");
    }
    if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) {
        throw std::invalid_argument("EncoderConfig: leaky_slope must lie in (0, 1)");
    }
    if (kl_weight < 0.0) {
        throw std::invalid_argument("EncoderConfig: kl_weight must be non-negative");
    }
}

SparseMatrix gcn_normalized_adjacency(const InteractionMatrix& r) {
    const std::size_t n = r.n_users();
    const std::size_t m = r.n_items();
    std::vector<double> inv_sqrt(n + m);
    for (std::size_t u = 0; u < n; ++u) {
        inv_sqrt[u] = 1.0 / std::sqrt(static_cast<double>(r.user_degree(u) + 1));
    }
    const auto item_deg = r.item_degrees();
    for (std::size_t i = 0; i < m; ++i) {
        inv_sqrt[n + i] = 1.0 / std::sqrt(static_cast<double>(item_deg[i] + 1));
    }
    std::vector<Triplet> entries;
    entries.reserve(2 * r.nnz() + n + m);
    for (std::size_t t = 0; t < n + m; ++t) {
        entries.push_back({t, t, inv_sqrt[t] * inv_sqrt[t]});
    }
    for (std::size_t u = 0; u < n; ++u) {
        for (int i : r.items_of(u)) {
            const std::size_t item_node = n + static_cast<std::size_t>(i);
            const double value = inv_sqrt[u] * inv_sqrt[item_node];
            entries.push_back({u, item_node, value});
            entries.push_back({item_node, u, value});
        }
    }
    return SparseMatrix::from_triplets(n + m, n + m, std::move(entries));
}

GraphEncoder::GraphEncoder(std::size_t in_dim, const EncoderConfig& cfg, Rng& rng) : cfg_(cfg) {
    cfg_.validate();
    std::size_t prev = in_dim;
    trunk_.reserve(cfg_.hidden_dims.size());
    for (std::size_t d : cfg_.hidden_dims) {
        trunk_.push_back(xavier_init(prev, d, rng));
        prev = d;
    }
    // The mu head is drawn before the log-sigma head so that deterministic and
    // variational encoders share an identical initialisation prefix.
    w_mu_ = xavier_init(prev, cfg_.latent_dim, rng);
    if (cfg_.mode == EncoderMode::variational) {
        w_log_sigma_ = xavier_init(prev, cfg_.latent_dim, rng);
    }
}

namespace {

DenseMatrix spmm_or_matmul(const SparseMatrix& s, const DenseMatrix& d) { return spmm(s, d); }
DenseMatrix spmm_or_matmul(const DenseMatrix& a, const DenseMatrix& b) { return matmul(a, b); }

template <typename Features>
GraphEncoder::Forward encoder_forward_impl(const Features& features, const SparseMatrix& adjacency,
                                           const std::vector<DenseMatrix>& trunk,
                                           const DenseMatrix& w_mu, const DenseMatrix& w_log_sigma,
                                           double slope, bool variational) {
    GraphEncoder::Forward fwd;
    fwd.pre.reserve(trunk.size());
    fwd.hidden.reserve(trunk.size());
    for (std::size_t l = 0; l < trunk.size(); ++l) {
        DenseMatrix projected;
        if (l == 0) {
            projected = spmm_or_matmul(features, trunk[0]);
        } else {
            projected = matmul(fwd.hidden[l - 1], trunk[l]);
        }
        fwd.pre.push_back(spmm(adjacency, projected));
        fwd.hidden.push_back(leaky_relu(fwd.pre.back(), slope));
    }
    fwd.mu = matmul(fwd.hidden.back(), w_mu);
    if (variational) {
        fwd.log_sigma = matmul(fwd.hidden.back(), w_log_sigma);
    }
    return fwd;
}

}  // namespace

GraphEncoder::Forward GraphEncoder::forward(const SparseMatrix& features,
                                            const SparseMatrix& adjacency) const {
    return encoder_forward_impl(features, adjacency, trunk_, w_mu_, w_log_sigma_, cfg_.leaky_slope,
                                cfg_.mode == EncoderMode::variational);
}

GraphEncoder::Forward GraphEncoder::forward(const DenseMatrix& features,
                                            const SparseMatrix& adjacency) const {
    return encoder_forward_impl(features, adjacency, trunk_, w_mu_, w_log_sigma_, cfg_.leaky_slope,
                                cfg_.mode == EncoderMode::variational);
}

GraphEncoder::Gradients GraphEncoder::backward(const Forward& fwd, const SparseMatrix& features,
                                               const SparseMatrix& adjacency,
                                               const DenseMatrix& grad_mu,
                                               const DenseMatrix& grad_log_sigma) const {
    Gradients grads;
    grads.trunk.resize(trunk_.size());

    const DenseMatrix& h_last = fwd.hidden.back();
    grads.w_mu = matmul(transpose(h_last), grad_mu);
    DenseMatrix grad_h = matmul(grad_mu, transpose(w_mu_));
    if (cfg_.mode == EncoderMode::variational) {
        grads.w_log_sigma = matmul(transpose(h_last), grad_log_sigma);
        grad_h += matmul(grad_log_sigma, transpose(w_log_sigma_));
    }

    for (std::size_t l = trunk_.size(); l-- > 0;) {
        DenseMatrix grad_pre = std::move(grad_h);
        for (std::size_t idx = 0; idx < grad_pre.size(); ++idx) {
            grad_pre.data()[idx] *=
                leaky_relu_derivative(fwd.pre[l].data()[idx], cfg_.leaky_slope);
        }
        // pre_l = A (input_l W_l); A is symmetric.
        const DenseMatrix grad_projected = spmm(adjacency, grad_pre);
        if (l == 0) {
            grads.trunk[0] = spmm(transpose(features), grad_projected);
        } else {
            grads.trunk[l] = matmul(transpose(fwd.hidden[l - 1]), grad_projected);
            grad_h = matmul(grad_projected, transpose(trunk_[l]));
        }
    }
    return grads;
}

std::vector<DenseMatrix*> GraphEncoder::trainable() {
    std::vector<DenseMatrix*> out;
    for (auto& w : trunk_) {
        out.push_back(&w);
    }
    out.push_back(&w_mu_);
    if (cfg_.mode == EncoderMode::variational) {
        out.push_back(&w_log_sigma_);
    }
    return out;
}

std::vector<const DenseMatrix*> GraphEncoder::trainable() const {
    std::vector<const DenseMatrix*> out;
    for (const auto& w : trunk_) {
        out.push_back(&w);
    }
    out.push_back(&w_mu_);
    if (cfg_.mode == EncoderMode::variational) {
        out.push_back(&w_log_sigma_);
    }
    return out;
}

double GraphEncoder::min_abs_preactivation(const Forward& fwd) {
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& pre : fwd.pre) {
        for (double v : pre.data()) {
            smallest = std::min(smallest, std::abs(v));
        }
    }
    return smallest;
}

DenseMatrix reparameterize(const DenseMatrix& mu, const DenseMatrix& log_sigma, Rng& rng) {
    DenseMatrix eps(mu.rows(), mu.cols());
    for (double& v : eps.data()) {
        v = rng.normal();
    }
    return reparameterize_with_noise(mu, log_sigma, eps);
}

DenseMatrix reparameterize_with_noise(const DenseMatrix& mu, const DenseMatrix& log_sigma,
                                      const DenseMatrix& eps) {
    if (!mu.same_shape(log_sigma) || !mu.same_shape(eps)) {
        throw std::invalid_argument("reparameterize: shapes do not match");
    }
    DenseMatrix z(mu.rows(), mu.cols());
    for (std::size_t idx = 0; idx < mu.size(); ++idx) {
        z.data()[idx] =
            mu.data()[idx] + std::exp(clamp_log_sigma(log_sigma.data()[idx])) * eps.data()[idx];
    }
    return z;
}

double decode_edge(std::span<const double> z_i, std::span<const double> z_j) {
    return sigmoid(dot(z_i, z_j));
}

void EdgeSample::push(std::uint32_t a, std::uint32_t b, double y, double w) {
    first.push_back(a);
    second.push_back(b);
    label.push_back(y);
    weight.push_back(w);
    weight_sum += w;
}

EdgeSample full_edge_sample(const InteractionMatrix& r) {
    const std::size_t n = r.n_users();
    const std::size_t total = n + r.n_items();
    EdgeSample sample;
    sample.first.reserve(total * (total - 1) / 2);
    for (std::size_t a = 0; a < total; ++a) {
        for (std::size_t b = a + 1; b < total; ++b) {
            double y = 0.0;
            if (a < n && b >= n) {
                y = r.has(a, b - n) ? 1.0 : 0.0;
            }
            sample.push(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), y, 1.0);
        }
    }
    return sample;
}

EdgeSample sampled_edge_sample(const InteractionMatrix& r, double negative_ratio, Rng& rng) {
    const std::size_t n = r.n_users();
    const std::size_t total = n + r.n_items();
    const std::size_t n_pos = r.nnz();
    if (n_pos == 0) {
        throw std::invalid_argument("sampled_edge_sample: graph has no edges");
    }
    const std::size_t n_neg =
        static_cast<std::size_t>(std::llround(negative_ratio * static_cast<double>(n_pos)));
    const std::size_t all_pairs = total * (total - 1) / 2;
    if (n_neg > 0 && all_pairs <= n_pos) {
        throw std::runtime_error("sampled_edge_sample: no non-edges exist");
    }
    const double pos_weight =
        n_neg > 0 ? static_cast<double>(n_neg) / static_cast<double>(n_pos) : 1.0;

    EdgeSample sample;
    sample.first.reserve(n_pos + n_neg);
    for (std::size_t u = 0; u < n; ++u) {
        for (int i : r.items_of(u)) {
            sample.push(static_cast<std::uint32_t>(u),
                        static_cast<std::uint32_t>(n + static_cast<std::size_t>(i)), 1.0,
                        pos_weight);
        }
    }
    std::size_t drawn = 0;
    std::size_t attempts = 0;
    const std::size_t max_attempts = 1000 * (n_neg + 1);
    while (drawn < n_neg) {
        if (++attempts > max_attempts) {
            throw std::runtime_error("sampled_edge_sample: negative sampling did not converge");
        }
        std::size_t a = rng.uniform_index(total);
        std::size_t b = rng.uniform_index(total);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        if (a < n && b >= n && r.has(a, b - n)) continue;
        sample.push(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), 0.0, 1.0);
        ++drawn;
    }
    return sample;
}

ElboLoss elbo_loss(const DenseMatrix& mu, const DenseMatrix& log_sigma, const DenseMatrix& z,
                   const EdgeSample& sample, double kl_weight) {
    if (sample.size() == 0) {
        throw std::invalid_argument("elbo_loss: empty edge sample");
    }
    ElboLoss loss;
    for (std::size_t k = 0; k < sample.size(); ++k) {
        const double s = dot(z.row(sample.first[k]), z.row(sample.second[k]));
        loss.reconstruction += sample.weight[k] * (softplus(s) - sample.label[k] * s);
    }
    loss.reconstruction /= sample.weight_sum;

    if (!log_sigma.empty()) {
        const double n_nodes = static_cast<double>(mu.rows());
        for (std::size_t idx = 0; idx < mu.size(); ++idx) {
            const double m = mu.data()[idx];
            const double ls = clamp_log_sigma(log_sigma.data()[idx]);
            const double var = std::exp(2.0 * ls);
            loss.kl += -0.5 * (1.0 + 2.0 * ls - m * m - var);
        }
        loss.kl /= n_nodes;
    }
    loss.total = loss.reconstruction + kl_weight * loss.kl;
    return loss;
}

namespace {

struct ElboGrads {
    ElboLoss loss;
    DenseMatrix grad_mu;
    DenseMatrix grad_log_sigma;  // empty in deterministic mode
    double min_node_kl = 0.0;
};

// Analytic gradients of the ELBO w.r.t. mu and log sigma, with the
// reparameterization noise held fixed.
ElboGrads elbo_loss_and_grads(const DenseMatrix& mu, const DenseMatrix& log_sigma,
                              const DenseMatrix& z, const EdgeSample& sample, double kl_weight) {
    if (sample.size() == 0) {
        throw std::invalid_argument("elbo_loss: empty edge sample");
    }
    ElboGrads out;
    DenseMatrix grad_z(z.rows(), z.cols());
    for (std::size_t k = 0; k < sample.size(); ++k) {
        const std::size_t a = sample.first[k];
        const std::size_t b = sample.second[k];
        const double s = dot(z.row(a), z.row(b));
        out.loss.reconstruction += sample.weight[k] * (softplus(s) - sample.label[k] * s);
        const double coeff = sample.weight[k] * (sigmoid(s) - sample.label[k]) / sample.weight_sum;
        auto ga = grad_z.row(a);
        auto gb = grad_z.row(b);
        auto za = z.row(a);
        auto zb = z.row(b);
        for (std::size_t d = 0; d < z.cols(); ++d) {
            ga[d] += coeff * zb[d];
            gb[d] += coeff * za[d];
        }
    }
    out.loss.reconstruction /= sample.weight_sum;

    const bool variational = !log_sigma.empty();
    out.grad_mu = grad_z;  // dz/dmu = identity
    if (variational) {
        out.grad_log_sigma = DenseMatrix(mu.rows(), mu.cols());
        const double n_nodes = static_cast<double>(mu.rows());
        out.min_node_kl = std::numeric_limits<double>::infinity();
        for (std::size_t row = 0; row < mu.rows(); ++row) {
            double node_kl = 0.0;
            for (std::size_t col = 0; col < mu.cols(); ++col) {
                const std::size_t idx = row * mu.cols() + col;
                const double m = mu.data()[idx];
                const double raw_ls = log_sigma.data()[idx];
                const double ls = clamp_log_sigma(raw_ls);
                const double var = std::exp(2.0 * ls);
                node_kl += -0.5 * (1.0 + 2.0 * ls - m * m - var);
                out.grad_mu.data()[idx] += kl_weight * m / n_nodes;
                // dz/dlog_sigma = sigma * eps = z - mu; clamp saturates.
                const bool clamped = raw_ls > kLogSigmaClamp || raw_ls < -kLogSigmaClamp;
                double g = grad_z.data()[idx] * (z.data()[idx] - m);
                g += kl_weight * (var - 1.0) / n_nodes;
                out.grad_log_sigma.data()[idx] = clamped ? 0.0 : g;
            }
            out.loss.kl += node_kl;
            out.min_node_kl = std::min(out.min_node_kl, node_kl);
        }
        out.loss.kl /= n_nodes;
    }
    out.loss.total = out.loss.reconstruction + kl_weight * out.loss.kl;
    return out;
}

}  // namespace

VgaeResult train_vgae(const InteractionMatrix& r, const EncoderConfig& cfg) {
    cfg.validate();
    if (r.nnz() == 0) {
        throw std::invalid_argument("train_vgae: graph has no interactions");
    }
    const std::size_t total = r.n_users() + r.n_items();
    const bool variational = cfg.mode == EncoderMode::variational;

    const NormalizedLaplacian lap = build_laplacian(r);
    const SparseMatrix adjacency = gcn_normalized_adjacency(r);
    const SparseMatrix features = cfg.features == FeatureMode::laplacian_rows
                                      ? lap.laplacian
                                      : SparseMatrix::identity(total);

    Rng rng(cfg.seed);
    GraphEncoder encoder(total, cfg, rng);
    auto params = encoder.trainable();
    std::vector<AdamState> opt;
    opt.reserve(params.size());
    for (const DenseMatrix* p : params) {
        opt.push_back(AdamState::for_param(*p));
    }

    const bool full_sample = total <= kFullSampleNodeLimit;
    EdgeSample fixed_sample;
    if (full_sample) {
        fixed_sample = full_edge_sample(r);
    }

    VgaeResult result;
    result.history.reserve(cfg.epochs + 1);
    GraphEncoder::Forward fwd;
    for (std::size_t epoch = 0; epoch <= cfg.epochs; ++epoch) {
        if (!full_sample) {
            fixed_sample = sampled_edge_sample(r, cfg.negative_sample_ratio, rng);
        }
        const EdgeSample& sample = fixed_sample;
        fwd = encoder.forward(features, adjacency);
        DenseMatrix eps;
        DenseMatrix z;
        if (variational) {
            eps = DenseMatrix(fwd.mu.rows(), fwd.mu.cols());
            for (double& v : eps.data()) {
                v = rng.normal();
            }
            z = reparameterize_with_noise(fwd.mu, fwd.log_sigma, eps);
        } else {
            z = fwd.mu;
        }

        const ElboGrads grads = elbo_loss_and_grads(fwd.mu, fwd.log_sigma, z, sample, cfg.kl_weight);
        if (!std::isfinite(grads.loss.total)) {
            std::ostringstream msg;
            msg << "train_vgae: non-finite loss at epoch " << epoch
                << " (total=" << grads.loss.total << ", recon=" << grads.loss.reconstruction
                << ", kl=" << grads.loss.kl << ")";
            throw std::runtime_error(msg.str());
        }
        if (variational && grads.min_node_kl < -1e-9) {
            std::ostringstream msg;
            msg << "train_vgae: negative per-node KL (" << grads.min_node_kl << ") at epoch "
                << epoch;
            throw std::logic_error(msg.str());
        }
        result.history.push_back({grads.loss.total, grads.loss.reconstruction, grads.loss.kl});
        if (epoch == cfg.epochs) {
            break;  // final entry records the post-training loss; no further step
        }

        DenseMatrix grad_ls_empty;
        const GraphEncoder::Gradients wgrads =
            encoder.backward(fwd, features, adjacency, grads.grad_mu,
                             variational ? grads.grad_log_sigma : grad_ls_empty);
        std::size_t slot = 0;
        for (const DenseMatrix& g : wgrads.trunk) {
            adam_step(*params[slot], g, opt[slot], cfg.learning_rate);
            ++slot;
        }
        adam_step(*params[slot], wgrads.w_mu, opt[slot], cfg.learning_rate);
        ++slot;
        if (variational) {
            adam_step(*params[slot], wgrads.w_log_sigma, opt[slot], cfg.learning_rate);
        }
    }

    result.embeddings.mu = fwd.mu;
    result.embeddings.log_sigma = fwd.log_sigma;
    result.embeddings.latent_dim = cfg.latent_dim;
    result.final_rng_state = rng.serialize();
    return result;
}

DenseMatrix export_embeddings(const VariationalEmbeddings& ve, bool sample, Rng* rng) {
    if (!sample) {
        return ve.mu;
    }
    if (ve.log_sigma.empty() || rng == nullptr) {
        throw std::invalid_argument("export_embeddings: sampling needs log_sigma and an rng");
    }
    return reparameterize(ve.mu, ve.log_sigma, *rng);
}

}  // namespace gvecf
