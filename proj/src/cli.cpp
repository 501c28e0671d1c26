#include "gvecf/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gvecf/checkpoint.hpp"
#include "gvecf/config.hpp"
#include "gvecf/dataset.hpp"
#include "gvecf/evaluator.hpp"
#include "gvecf/initializer.hpp"
#include "gvecf/laplacian.hpp"
#include "gvecf/trainer.hpp"
#include "gvecf/vgae.hpp"

namespace gvecf {

namespace {

constexpr const char* kArtifactVersion = "0.1.0";

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) {
        std::filesystem::create_directories(dir);
    }
}

std::string join_path(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

std::string dataset_name(const std::string& dir) {
    const auto name = std::filesystem::path(dir).filename().string();
    return name.empty() ? dir : name;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    out << text;
}

// Reproducibility manifest: resolved config plus versions. The config section
// is itself a valid --config file.
void write_manifest(const std::string& command, const RunConfig& cfg) {
    std::ostringstream out;
    out << "# gvecf run manifest\n";
    out << "# command=" << command << '\n';
    out << "# artifact-version=" << kArtifactVersion << '\n';
    out << "# checkpoint-format-version=" << Checkpoint::kVersion << '\n';
    out << "# compiler=" << __VERSION__ << '\n';
    out << cfg.echo();
    write_text_file(join_path(cfg.out_dir, "manifest.txt"), out.str());
}

DatasetSplit load_dataset(const RunConfig& cfg) {
    if (cfg.dataset_dir.empty()) {
        throw std::runtime_error("--dataset is required");
    }
    DatasetSplit ds = load_split(join_path(cfg.dataset_dir, "train.txt"),
                                 join_path(cfg.dataset_dir, "test.txt"));
    ds.name = dataset_name(cfg.dataset_dir);
    return ds;
}

std::string format_history_csv(const std::vector<HistoryRow>& history) {
    std::ostringstream out;
    out.precision(17);
    out << "epoch,loss,recall,ndcg,seconds\n";
    for (const auto& row : history) {
        out << row.epoch << ',' << row.loss << ',';
        if (row.evaluated) {
            out << row.recall << ',' << row.ndcg;
        } else {
            out << ',';
        }
        out << ',' << row.seconds << '\n';
    }
    return out.str();
}

std::string format_pretrain_csv(const std::vector<VgaeEpochStats>& history) {
    std::ostringstream out;
    out.precision(17);
    out << "epoch,total,reconstruction,kl\n";
    for (std::size_t e = 0; e < history.size(); ++e) {
        out << e << ',' << history[e].total << ',' << history[e].reconstruction << ','
            << history[e].kl << '\n';
    }
    return out.str();
}

// Layer-0 embeddings for the requested init mode; runs the pretrainer inline
// when no embeddings checkpoint was supplied.
DenseMatrix initial_embeddings(const RunConfig& cfg, const DatasetSplit& ds) {
    const std::size_t total = ds.train.n_users() + ds.train.n_items();
    if (cfg.init == "xavier") {
        Rng rng(cfg.seed);
        return xavier_init(total, cfg.embed_size, rng);
    }
    VariationalEmbeddings ve;
    if (!cfg.pretrained.empty()) {
        const Checkpoint ckpt = load_checkpoint(cfg.pretrained);
        ve.mu = ckpt.require("mu");
        if (const DenseMatrix* ls = ckpt.find("log_sigma")) {
            ve.log_sigma = *ls;
        }
        ve.latent_dim = ve.mu.cols();
    } else {
        const VgaeResult result = train_vgae(ds.train, cfg.encoder_config());
        ve = result.embeddings;
    }
    if (ve.mu.rows() != total) {
        throw std::runtime_error("pretrained embeddings do not match the dataset size");
    }
    if (ve.mu.cols() != cfg.embed_size) {
        throw std::runtime_error("pretrained embedding width does not match --embed-size");
    }
    if (cfg.sample_embeddings) {
        Rng rng(cfg.seed + 1);
        return export_embeddings(ve, true, &rng);
    }
    return export_embeddings(ve);
}

DenseMatrix row_vector(const std::vector<double>& values) {
    DenseMatrix m(1, values.size());
    m.data() = values;
    return m;
}

DenseMatrix scalar_tensor(double value) {
    DenseMatrix m(1, 1);
    m(0, 0) = value;
    return m;
}

void add_adam_state(Checkpoint& ckpt, const std::string& prefix, const AdamState& state) {
    ckpt.add(prefix + ".m", row_vector(state.m));
    ckpt.add(prefix + ".v", row_vector(state.v));
    ckpt.add(prefix + ".t", scalar_tensor(static_cast<double>(state.t)));
}

Checkpoint model_checkpoint(const RunConfig& cfg, const TrainResult& result) {
    Checkpoint ckpt;
    ckpt.config_echo = cfg.echo();
    ckpt.epoch = result.history.empty() ? 0 : result.history.back().epoch;
    ckpt.rng_state = result.final_rng_state;
    const ModelParams& p = result.params;
    ckpt.add("z0", p.z0);
    add_adam_state(ckpt, "adam.z0", p.z0_opt);
    for (std::size_t l = 0; l < p.layer_weights.size(); ++l) {
        const std::string suffix = std::to_string(l);
        ckpt.add("w1." + suffix, p.layer_weights[l].w1);
        ckpt.add("w2." + suffix, p.layer_weights[l].w2);
        add_adam_state(ckpt, "adam.w1." + suffix, p.w1_opt[l]);
        add_adam_state(ckpt, "adam.w2." + suffix, p.w2_opt[l]);
    }
    return ckpt;
}

int run_stats(const RunConfig& cfg) {
    const DatasetSplit ds = load_dataset(cfg);
    const DatasetStats stats = ds.stats();
    std::cout << "dataset users items interactions density\n";
    std::cout << ds.name << ' ' << stats.n_users << ' ' << stats.n_items << ' '
              << stats.n_interactions << ' ' << std::fixed << std::setprecision(5)
              << stats.density << '\n';
    return 0;
}

int run_pretrain(const RunConfig& cfg) {
    const DatasetSplit ds = load_dataset(cfg);
    ensure_dir(cfg.out_dir);
    write_manifest("pretrain", cfg);
    const VgaeResult result = train_vgae(ds.train, cfg.encoder_config());
    write_text_file(join_path(cfg.out_dir, "pretrain_history.csv"),
                    format_pretrain_csv(result.history));

    Checkpoint ckpt;
    ckpt.config_echo = cfg.echo();
    ckpt.epoch = cfg.pretrain_epochs;
    ckpt.rng_state = result.final_rng_state;
    ckpt.add("mu", result.embeddings.mu);
    if (!result.embeddings.log_sigma.empty()) {
        ckpt.add("log_sigma", result.embeddings.log_sigma);
    }
    save_checkpoint(join_path(cfg.out_dir, "embeddings.ckpt"), ckpt);
    std::cout << "pretrained " << cfg.init << " embeddings: epochs=" << cfg.pretrain_epochs
              << " final_loss=" << result.history.back().total << '\n';
    return 0;
}

int run_train(const RunConfig& cfg) {
    const DatasetSplit ds = load_dataset(cfg);
    ensure_dir(cfg.out_dir);
    write_manifest("train", cfg);
    const DenseMatrix z0 = initial_embeddings(cfg, ds);
    const EvalSplit heldout = ds.eval_view();
    const TrainResult result =
        train(ds.train, z0, cfg.train_config(), cfg.propagation_config(), &heldout, cfg.k);
    write_text_file(join_path(cfg.out_dir, "history.csv"), format_history_csv(result.history));
    save_checkpoint(join_path(cfg.out_dir, "model.ckpt"), model_checkpoint(cfg, result));

    const NormalizedLaplacian lap = build_laplacian(ds.train);
    const MetricsReport report = evaluate(result.params.z0, result.params.layer_weights, lap,
                                          cfg.propagation_config(), heldout, cfg.k);
    write_text_file(join_path(cfg.out_dir, "metrics.json"), report.to_json() + "\n");
    std::cout << "trained init=" << cfg.init << " epochs=" << cfg.epochs << " recall@" << cfg.k
              << "=" << report.recall_at_k << " ndcg@" << cfg.k << "=" << report.ndcg_at_k << '\n';
    return 0;
}

int run_evaluate(const RunConfig& cli_cfg, const std::string& checkpoint_path) {
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    RunConfig cfg = RunConfig::from_echo(ckpt.config_echo);
    // The command line decides where to evaluate and at which cutoff.
    if (!cli_cfg.dataset_dir.empty()) cfg.dataset_dir = cli_cfg.dataset_dir;
    cfg.k = cli_cfg.k;
    cfg.out_dir = cli_cfg.out_dir;

    const DatasetSplit ds = load_dataset(cfg);
    const PropagationConfig pcfg = cfg.propagation_config();
    std::vector<LayerWeights> weights(pcfg.n_layers);
    for (std::size_t l = 0; l < pcfg.n_layers; ++l) {
        weights[l].w1 = ckpt.require("w1." + std::to_string(l));
        weights[l].w2 = ckpt.require("w2." + std::to_string(l));
    }
    const DenseMatrix& z0 = ckpt.require("z0");
    const NormalizedLaplacian lap = build_laplacian(ds.train);
    const EvalSplit split = ds.eval_view();
    const MetricsReport report = evaluate(z0, weights, lap, pcfg, split, cfg.k);
    if (!cfg.out_dir.empty()) {
        ensure_dir(cfg.out_dir);
        write_manifest("evaluate", cfg);
        write_text_file(join_path(cfg.out_dir, "metrics.json"), report.to_json() + "\n");
    }
    std::cout << report.to_json() << '\n';
    return 0;
}

int run_gensynth(const RunConfig& cfg, std::size_t users, std::size_t items, std::size_t blocks,
                 double intra, double inter, double test_fraction) {
    DatasetSplit ds =
        generate_synthetic(users, items, blocks, intra, inter, test_fraction, cfg.seed);
    ensure_dir(cfg.out_dir);
    write_manifest("gensynth", cfg);
    write_split(ds, join_path(cfg.out_dir, "train.txt"), join_path(cfg.out_dir, "test.txt"));
    const DatasetStats stats = ds.stats();
    std::cout << "generated synthetic split: users=" << stats.n_users
              << " items=" << stats.n_items << " interactions=" << stats.n_interactions
              << " density=" << stats.density << '\n';
    return 0;
}

int run_gridsearch(const RunConfig& cfg, const std::string& lr_grid, const std::string& reg_grid,
                   const std::string& nd_grid) {
    const DatasetSplit ds = load_dataset(cfg);
    ensure_dir(cfg.out_dir);
    write_manifest("gridsearch", cfg);
    const DenseMatrix z0 = initial_embeddings(cfg, ds);
    const EvalSplit validation = ds.eval_view();
    const GridSearchResult result =
        grid_search(ds.train, z0, parse_double_list(lr_grid), parse_double_list(reg_grid),
                    parse_double_list(nd_grid), cfg.train_config(), cfg.propagation_config(),
                    validation, cfg.k);

    std::ostringstream table;
    table.precision(17);
    table << "lr,reg,node_dropout,recall,ndcg,diverged\n";
    for (const auto& cell : result.table) {
        table << cell.lr << ',' << cell.reg_lambda << ',' << cell.node_dropout << ','
              << cell.recall << ',' << cell.ndcg << ',' << (cell.diverged ? 1 : 0) << '\n';
    }
    write_text_file(join_path(cfg.out_dir, "grid.csv"), table.str());

    RunConfig best = cfg;
    best.lr = result.best.lr;
    best.reg = result.best.reg_lambda;
    best.node_dropout = result.best.node_dropout;
    write_text_file(join_path(cfg.out_dir, "best.cfg"), best.echo());
    std::cout << "grid search best: lr=" << result.best.lr << " reg=" << result.best.reg_lambda
              << " node_dropout=" << result.best.node_dropout << '\n';
    return 0;
}

void add_shared_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->set_config("--config")->configurable(false);
    cmd->allow_config_extras(false);
    cmd->add_option("--dataset", cfg.dataset_dir, "Dataset directory with train.txt/test.txt");
    cmd->add_option("--out", cfg.out_dir, "Output directory");
    cmd->add_option("--seed", cfg.seed, "Random seed");
}

void add_model_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--init", cfg.init, "Layer-0 init: variational | gae | xavier");
    cmd->add_option("--embed-size", cfg.embed_size, "Layer-0 embedding width");
    cmd->add_option("--layers", cfg.layers, "Number of propagation layers");
    cmd->add_option("--layer-dims", cfg.layer_dims, "Comma list of layer widths");
    cmd->add_option("--lr", cfg.lr, "Learning rate");
    cmd->add_option("--reg", cfg.reg, "L2 regularization strength");
    cmd->add_option("--node-dropout", cfg.node_dropout, "Node dropout ratio");
    cmd->add_option("--msg-dropout", cfg.msg_dropout, "Message dropout ratio");
    cmd->add_option("--batch-size", cfg.batch_size, "Mini-batch size");
    cmd->add_option("--epochs", cfg.epochs, "Training epochs");
    cmd->add_option("--k", cfg.k, "Ranking cutoff");
    cmd->add_option("--eval-every", cfg.eval_every, "Evaluate every n epochs (0 = never)");
    cmd->add_option("--leaky-slope", cfg.leaky_slope, "LeakyReLU negative slope");
}

void add_pretrain_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--pretrain-epochs", cfg.pretrain_epochs, "Encoder training epochs");
    cmd->add_option("--pretrain-lr", cfg.pretrain_lr, "Encoder learning rate");
    cmd->add_option("--hidden-dims", cfg.hidden_dims, "Encoder trunk widths, comma list");
    cmd->add_option("--kl-weight", cfg.kl_weight, "KL term weight");
    cmd->add_option("--negative-ratio", cfg.negative_ratio,
                    "Negatives per positive when pair sampling");
    cmd->add_option("--features", cfg.features, "Encoder input features: laplacian | identity");
    cmd->add_option("--pretrained", cfg.pretrained, "Embeddings checkpoint to reuse");
    cmd->add_flag("--sample-embeddings", cfg.sample_embeddings,
                  "Export one sampled draw instead of the posterior mean");
}

}  // namespace

int cli_run(int argc, const char* const* argv) {
    CLI::App app{"Graph collaborative filtering with variationally pre-trained embeddings"};
    app.require_subcommand(1);

    RunConfig cfg;
    cfg.out_dir = "run-out";

    auto* stats_cmd = app.add_subcommand("stats", "Print dataset statistics");
    add_shared_options(stats_cmd, cfg);

    auto* gensynth_cmd = app.add_subcommand("gensynth", "Generate a synthetic planted-block split");
    std::size_t users = 300, items = 300, blocks = 2;
    double intra = 0.6, inter = 0.02, test_fraction = 0.1;
    add_shared_options(gensynth_cmd, cfg);
    gensynth_cmd->add_option("--users", users, "Number of users");
    gensynth_cmd->add_option("--items", items, "Number of items");
    gensynth_cmd->add_option("--blocks", blocks, "Number of planted communities");
    gensynth_cmd->add_option("--intra", intra, "Within-community edge probability");
    gensynth_cmd->add_option("--inter", inter, "Cross-community edge probability");
    gensynth_cmd->add_option("--test-fraction", test_fraction, "Held-out fraction per user");

    auto* pretrain_cmd = app.add_subcommand("pretrain", "Train the graph encoder and export embeddings");
    add_shared_options(pretrain_cmd, cfg);
    add_pretrain_options(pretrain_cmd, cfg);
    pretrain_cmd->add_option("--mode", cfg.init, "Encoder mode: variational | gae");
    pretrain_cmd->add_option("--embed-size", cfg.embed_size, "Latent embedding width");
    pretrain_cmd->add_option("--leaky-slope", cfg.leaky_slope, "LeakyReLU negative slope");

    auto* train_cmd = app.add_subcommand("train", "Train the recommender");
    add_shared_options(train_cmd, cfg);
    add_model_options(train_cmd, cfg);
    add_pretrain_options(train_cmd, cfg);

    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a model checkpoint");
    std::string checkpoint_path;
    add_shared_options(eval_cmd, cfg);
    eval_cmd->add_option("--checkpoint", checkpoint_path, "Model checkpoint path")->required();
    eval_cmd->add_option("--k", cfg.k, "Ranking cutoff");

    auto* grid_cmd = app.add_subcommand("gridsearch", "Hyperparameter grid search");
    std::string lr_grid = "5e-4,1e-4,5e-5,1e-5,5e-6";
    std::string reg_grid = "5e-4,1e-5,1e-6";
    std::string nd_grid = "0.1,0.2";
    add_shared_options(grid_cmd, cfg);
    add_model_options(grid_cmd, cfg);
    add_pretrain_options(grid_cmd, cfg);
    grid_cmd->add_option("--lr-grid", lr_grid, "Comma list of learning rates");
    grid_cmd->add_option("--reg-grid", reg_grid, "Comma list of regularization strengths");
    grid_cmd->add_option("--nd-grid", nd_grid, "Comma list of node dropout ratios");

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (app.got_subcommand(stats_cmd)) {
            return run_stats(cfg);
        }
        if (app.got_subcommand(gensynth_cmd)) {
            return run_gensynth(cfg, users, items, blocks, intra, inter, test_fraction);
        }
        cfg.validate();
        if (app.got_subcommand(pretrain_cmd)) {
            if (cfg.init == "xavier") {
                throw std::runtime_error("pretrain: --mode must be variational or gae");
            }
            return run_pretrain(cfg);
        }
        if (app.got_subcommand(train_cmd)) {
            return run_train(cfg);
        }
        if (app.got_subcommand(eval_cmd)) {
            return run_evaluate(cfg, checkpoint_path);
        }
        if (app.got_subcommand(grid_cmd)) {
            return run_gridsearch(cfg, lr_grid, reg_grid, nd_grid);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    std::cerr << "error: no subcommand\n";
    return 1;
}

int cli_run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return cli_run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace gvecf
