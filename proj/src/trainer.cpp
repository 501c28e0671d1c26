#include "gvecf/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gvecf/activations.hpp"
#include "gvecf/initializer.hpp"

namespace gvecf {

void TrainConfig::validate() const {
    if (batch_size < 1) {
        throw std::invalid_argument("TrainConfig: batch_size must be positive");
    }
    if (!(lr > 0.0)) {
        throw std::invalid_argument("TrainConfig: lr must be positive");
    }
    if (reg_lambda < 0.0) {
        throw std::invalid_argument("TrainConfig: reg_lambda must be non-negative");
    }
    if (!(node_dropout >= 0.0 && node_dropout < 1.0) || !(msg_dropout >= 0.0 && msg_dropout < 1.0)) {
        throw std::invalid_argument("TrainConfig: dropout ratios must lie in [0, 1)");
    }
}

ModelParams ModelParams::init(DenseMatrix z0_init, std::size_t n_users,
                              const PropagationConfig& cfg, Rng& rng) {
    cfg.validate(z0_init.cols());
    ModelParams params;
    params.z0 = std::move(z0_init);
    params.n_users = n_users;
    params.z0_opt = AdamState::for_param(params.z0);
    std::size_t prev = params.z0.cols();
    for (std::size_t l = 0; l < cfg.n_layers; ++l) {
        LayerWeights lw;
        lw.w1 = xavier_init(prev, cfg.layer_dims[l], rng);
        lw.w2 = xavier_init(prev, cfg.layer_dims[l], rng);
        params.w1_opt.push_back(AdamState::for_param(lw.w1));
        params.w2_opt.push_back(AdamState::for_param(lw.w2));
        params.layer_weights.push_back(std::move(lw));
        prev = cfg.layer_dims[l];
    }
    return params;
}

std::vector<DenseMatrix*> ModelParams::trainable() {
    std::vector<DenseMatrix*> out{&z0};
    for (auto& lw : layer_weights) {
        out.push_back(&lw.w1);
        out.push_back(&lw.w2);
    }
    return out;
}

std::vector<const DenseMatrix*> ModelParams::trainable() const {
    std::vector<const DenseMatrix*> out{&z0};
    for (const auto& lw : layer_weights) {
        out.push_back(&lw.w1);
        out.push_back(&lw.w2);
    }
    return out;
}

std::vector<BprTriple> sample_bpr_batch(const InteractionMatrix& r, std::size_t batch_size,
                                        Rng& rng) {
    const std::size_t n = r.n_users();
    const std::size_t m = r.n_items();
    if (n == 0 || m == 0 || r.nnz() == 0) {
        throw std::invalid_argument("sample_bpr_batch: empty interaction matrix");
    }
    bool any_valid_user = false;
    for (std::size_t u = 0; u < n; ++u) {
        const std::size_t deg = r.user_degree(u);
        if (deg >= 1 && deg < m) {
            any_valid_user = true;
            break;
        }
    }
    if (!any_valid_user) {
        throw std::runtime_error("sample_bpr_batch: no user has both a positive and a negative item");
    }

    std::vector<BprTriple> batch;
    batch.reserve(batch_size);
    while (batch.size() < batch_size) {
        const std::size_t u = rng.uniform_index(n);
        const auto& positives = r.items_of(u);
        if (positives.empty() || positives.size() >= m) {
            continue;  // resample: no positive or no negative exists for this user
        }
        const std::size_t pos =
            static_cast<std::size_t>(positives[rng.uniform_index(positives.size())]);
        std::size_t neg = 0;
        do {
            neg = rng.uniform_index(m);
        } while (r.has(u, neg));
        batch.push_back({u, pos, neg});
    }
    return batch;
}

namespace {

// Distinct layer-0 rows referenced by a batch (user and item nodes).
std::vector<std::size_t> touched_rows(const std::vector<BprTriple>& batch, std::size_t n_users) {
    std::vector<std::size_t> rows;
    rows.reserve(batch.size() * 3);
    for (const auto& t : batch) {
        rows.push_back(t.user);
        rows.push_back(n_users + t.pos_item);
        rows.push_back(n_users + t.neg_item);
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    return rows;
}

double weight_squared_norm(const ModelParams& params) {
    double acc = 0.0;
    for (const auto& lw : params.layer_weights) {
        acc += squared_norm(lw.w1);
        acc += squared_norm(lw.w2);
    }
    return acc;
}

}  // namespace

BprLoss bpr_loss_value(const PropagationState& state, const std::vector<BprTriple>& batch,
                       const ModelParams& params, double reg_lambda) {
    if (batch.empty()) {
        throw std::invalid_argument("bpr_loss: empty batch");
    }
    BprLoss loss;
    for (const auto& t : batch) {
        const double margin = score(state, t.user, t.pos_item) - score(state, t.user, t.neg_item);
        loss.ranking += -log_sigmoid(margin);
    }
    loss.ranking /= static_cast<double>(batch.size());

    for (std::size_t row : touched_rows(batch, params.n_users)) {
        loss.regularization += dot(params.z0.row(row), params.z0.row(row));
    }
    loss.regularization += weight_squared_norm(params);
    loss.total = loss.ranking + reg_lambda * loss.regularization;
    return loss;
}

std::pair<BprLoss, BprGradients> bpr_loss(const ForwardTrace& trace,
                                          const std::vector<BprTriple>& batch,
                                          const ModelParams& params, double reg_lambda,
                                          const SparseMatrix& lap, const SparseMatrix& lap_plus_i,
                                          double leaky_slope) {
    if (batch.empty()) {
        throw std::invalid_argument("bpr_loss: empty batch");
    }
    const DenseMatrix& concat = trace.state.concatenated;
    const std::size_t n_users = trace.state.n_users;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    BprLoss loss;
    DenseMatrix grad_concat(concat.rows(), concat.cols());
    for (const auto& t : batch) {
        const auto e_u = concat.row(t.user);
        const auto e_i = concat.row(n_users + t.pos_item);
        const auto e_j = concat.row(n_users + t.neg_item);
        const double margin = dot(e_u, e_i) - dot(e_u, e_j);
        loss.ranking += -log_sigmoid(margin);
        // d(-log sigmoid(m))/dm = -sigmoid(-m)
        const double coeff = -sigmoid(-margin) * inv_batch;
        auto g_u = grad_concat.row(t.user);
        auto g_i = grad_concat.row(n_users + t.pos_item);
        auto g_j = grad_concat.row(n_users + t.neg_item);
        for (std::size_t d = 0; d < concat.cols(); ++d) {
            g_u[d] += coeff * (e_i[d] - e_j[d]);
            g_i[d] += coeff * e_u[d];
            g_j[d] -= coeff * e_u[d];
        }
    }
    loss.ranking *= inv_batch;

    BprGradients grads = propagate_backward(trace, params.layer_weights, lap, lap_plus_i,
                                            leaky_slope, grad_concat);

    for (std::size_t row : touched_rows(batch, n_users)) {
        loss.regularization += dot(params.z0.row(row), params.z0.row(row));
        auto g = grads.z0.row(row);
        auto z = params.z0.row(row);
        for (std::size_t d = 0; d < params.z0.cols(); ++d) {
            g[d] += 2.0 * reg_lambda * z[d];
        }
    }
    loss.regularization += weight_squared_norm(params);
    for (std::size_t l = 0; l < params.layer_weights.size(); ++l) {
        add_scaled(grads.weights[l].w1, params.layer_weights[l].w1, 2.0 * reg_lambda);
        add_scaled(grads.weights[l].w2, params.layer_weights[l].w2, 2.0 * reg_lambda);
    }
    loss.total = loss.ranking + reg_lambda * loss.regularization;
    return {loss, std::move(grads)};
}

TrainResult train(const InteractionMatrix& r, const DenseMatrix& z0_init, const TrainConfig& cfg,
                  const PropagationConfig& pcfg, const EvalSplit* heldout, std::size_t eval_k) {
    cfg.validate();
    pcfg.validate(z0_init.cols());
    if (z0_init.rows() != r.n_users() + r.n_items()) {
        throw std::invalid_argument("train: z0 rows must equal N+M");
    }

    const NormalizedLaplacian lap = build_laplacian(r);
    Rng rng(cfg.seed);
    TrainResult result;
    result.params = ModelParams::init(z0_init, r.n_users(), pcfg, rng);
    ModelParams& params = result.params;

    const std::size_t batches_per_epoch =
        (r.nnz() + cfg.batch_size - 1) / cfg.batch_size;
    const auto start = std::chrono::steady_clock::now();

    double best_recall = -1.0;
    std::size_t epochs_since_best = 0;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const SparseMatrix* lap_epoch = &lap.laplacian;
        const SparseMatrix* lap_plus_epoch = &lap.laplacian_plus_identity;
        std::pair<SparseMatrix, SparseMatrix> dropped;
        if (cfg.node_dropout > 0.0) {
            dropped = node_dropout_laplacian(lap, cfg.node_dropout, rng);
            lap_epoch = &dropped.first;
            lap_plus_epoch = &dropped.second;
        }

        double epoch_loss = 0.0;
        for (std::size_t b = 0; b < batches_per_epoch; ++b) {
            const std::vector<BprTriple> batch = sample_bpr_batch(r, cfg.batch_size, rng);
            const ForwardTrace trace =
                propagate_forward(params.z0, params.layer_weights, *lap_epoch, *lap_plus_epoch,
                                  r.n_users(), pcfg.leaky_slope, cfg.msg_dropout, &rng);
            auto [loss, grads] = bpr_loss(trace, batch, params, cfg.reg_lambda, *lap_epoch,
                                          *lap_plus_epoch, pcfg.leaky_slope);
            if (!std::isfinite(loss.total)) {
                std::ostringstream msg;
                msg << "train: non-finite loss at epoch " << epoch << " batch " << b
                    << " (ranking=" << loss.ranking << ", reg=" << loss.regularization << ")";
                throw std::runtime_error(msg.str());
            }
            epoch_loss += loss.total;

            adam_step(params.z0, grads.z0, params.z0_opt, cfg.lr);
            for (std::size_t l = 0; l < params.layer_weights.size(); ++l) {
                adam_step(params.layer_weights[l].w1, grads.weights[l].w1, params.w1_opt[l], cfg.lr);
                adam_step(params.layer_weights[l].w2, grads.weights[l].w2, params.w2_opt[l], cfg.lr);
            }
        }

        HistoryRow row;
        row.epoch = epoch;
        row.loss = epoch_loss / static_cast<double>(batches_per_epoch);
        row.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (heldout != nullptr && cfg.eval_every > 0 && epoch % cfg.eval_every == 0) {
            const MetricsReport report =
                evaluate(params.z0, params.layer_weights, lap, pcfg, *heldout, eval_k);
            row.recall = report.recall_at_k;
            row.ndcg = report.ndcg_at_k;
            row.evaluated = true;
            if (cfg.early_stopping) {
                if (report.recall_at_k > best_recall) {
                    best_recall = report.recall_at_k;
                    epochs_since_best = 0;
                } else if (++epochs_since_best >= cfg.patience) {
                    result.history.push_back(row);
                    break;
                }
            }
        }
        result.history.push_back(row);
    }
    result.final_rng_state = rng.serialize();
    return result;
}

GridSearchResult grid_search(const InteractionMatrix& r, const DenseMatrix& z0_init,
                             const std::vector<double>& lrs, const std::vector<double>& regs,
                             const std::vector<double>& node_dropouts, const TrainConfig& base,
                             const PropagationConfig& pcfg, const EvalSplit& validation,
                             std::size_t eval_k) {
    if (lrs.empty() || regs.empty() || node_dropouts.empty()) {
        throw std::invalid_argument("grid_search: grid axes must be non-empty");
    }
    GridSearchResult result;
    bool have_best = false;
    double best_recall = -1.0;
    const NormalizedLaplacian lap = build_laplacian(r);
    for (double lr : lrs) {
        for (double reg : regs) {
            for (double nd : node_dropouts) {
                TrainConfig cfg = base;
                cfg.lr = lr;
                cfg.reg_lambda = reg;
                cfg.node_dropout = nd;
                GridCell cell;
                cell.lr = lr;
                cell.reg_lambda = reg;
                cell.node_dropout = nd;
                try {
                    const TrainResult trained = train(r, z0_init, cfg, pcfg);
                    const MetricsReport report = evaluate(trained.params.z0,
                                                          trained.params.layer_weights, lap, pcfg,
                                                          validation, eval_k);
                    cell.recall = report.recall_at_k;
                    cell.ndcg = report.ndcg_at_k;
                } catch (const std::runtime_error&) {
                    cell.diverged = true;  // non-finite loss: score the cell as unusable
                }
                if (!cell.diverged && (!have_best || cell.recall > best_recall)) {
                    have_best = true;
                    best_recall = cell.recall;
                    result.best = cfg;
                }
                result.table.push_back(cell);
            }
        }
    }
    if (!have_best) {
        throw std::runtime_error("grid_search: every grid cell diverged");
    }
    return result;
}

}  // namespace gvecf
