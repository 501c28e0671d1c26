#include "gvecf/config.hpp"

#include <sstream>
#include <stdexcept>

namespace gvecf {

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) {
        if (token.empty()) continue;
        std::size_t consumed = 0;
        const double v = std::stod(token, &consumed);
        if (consumed != token.size()) {
            throw std::invalid_argument("parse_double_list: bad token '" + token + "'");
        }
        out.push_back(v);
    }
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) {
        if (token.empty()) continue;
        std::size_t consumed = 0;
        const long long v = std::stoll(token, &consumed);
        if (consumed != token.size() || v < 0) {
            throw std::invalid_argument("parse_size_list: bad token '" + token + "'");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

void RunConfig::validate() const {
    if (init != "variational" && init != "gae" && init != "xavier") {
        throw std::invalid_argument("config: init must be variational, gae, or xavier");
    }
    if (features != "laplacian" && features != "identity") {
        throw std::invalid_argument("config: features must be laplacian or identity");
    }
    if (embed_size < 1) {
        throw std::invalid_argument("config: embed-size must be positive");
    }
    if (k < 1) {
        throw std::invalid_argument("config: k must be positive");
    }
    propagation_config().validate(embed_size);
    train_config().validate();
    encoder_config().validate();
}

std::string RunConfig::echo() const {
    std::ostringstream out;
    out.precision(17);
    out << "dataset=" << dataset_dir << '\n';
    out << "out=" << out_dir << '\n';
    out << "init=" << init << '\n';
    out << "embed-size=" << embed_size << '\n';
    out << "layers=" << layers << '\n';
    out << "layer-dims=" << layer_dims << '\n';
    out << "lr=" << lr << '\n';
    out << "reg=" << reg << '\n';
    out << "node-dropout=" << node_dropout << '\n';
    out << "msg-dropout=" << msg_dropout << '\n';
    out << "leaky-slope=" << leaky_slope << '\n';
    out << "batch-size=" << batch_size << '\n';
    out << "epochs=" << epochs << '\n';
    out << "k=" << k << '\n';
    out << "seed=" << seed << '\n';
    out << "eval-every=" << eval_every << '\n';
    out << "pretrain-epochs=" << pretrain_epochs << '\n';
    out << "pretrain-lr=" << pretrain_lr << '\n';
    out << "hidden-dims=" << hidden_dims << '\n';
    out << "kl-weight=" << kl_weight << '\n';
    out << "negative-ratio=" << negative_ratio << '\n';
    out << "features=" << features << '\n';
    out << "pretrained=" << pretrained << '\n';
    out << "sample-embeddings=" << (sample_embeddings ? 1 : 0) << '\n';
    return out.str();
}

RunConfig RunConfig::from_echo(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: missing '=' on line " + std::to_string(line_no));
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "dataset") cfg.dataset_dir = value;
        else if (key == "out") cfg.out_dir = value;
        else if (key == "init") cfg.init = value;
        else if (key == "embed-size") cfg.embed_size = std::stoull(value);
        else if (key == "layers") cfg.layers = std::stoull(value);
        else if (key == "layer-dims") cfg.layer_dims = value;
        else if (key == "lr") cfg.lr = std::stod(value);
        else if (key == "reg") cfg.reg = std::stod(value);
        else if (key == "node-dropout") cfg.node_dropout = std::stod(value);
        else if (key == "msg-dropout") cfg.msg_dropout = std::stod(value);
        else if (key == "leaky-slope") cfg.leaky_slope = std::stod(value);
        else if (key == "batch-size") cfg.batch_size = std::stoull(value);
        else if (key == "epochs") cfg.epochs = std::stoull(value);
        else if (key == "k") cfg.k = std::stoull(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "eval-every") cfg.eval_every = std::stoull(value);
        else if (key == "pretrain-epochs") cfg.pretrain_epochs = std::stoull(value);
        else if (key == "pretrain-lr") cfg.pretrain_lr = std::stod(value);
        else if (key == "hidden-dims") cfg.hidden_dims = value;
        else if (key == "kl-weight") cfg.kl_weight = std::stod(value);
        else if (key == "negative-ratio") cfg.negative_ratio = std::stod(value);
        else if (key == "features") cfg.features = value;
        else if (key == "pretrained") cfg.pretrained = value;
        else if (key == "sample-embeddings") cfg.sample_embeddings = value == "1" || value == "true";
        else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    return cfg;
}

InitMode RunConfig::init_mode() const {
    if (init == "variational") return InitMode::variational;
    if (init == "gae") return InitMode::gae;
    if (init == "xavier") return InitMode::xavier;
    throw std::invalid_argument("config: init must be variational, gae, or xavier");
}

PropagationConfig RunConfig::propagation_config() const {
    PropagationConfig cfg;
    cfg.n_layers = layers;
    if (layer_dims.empty()) {
        cfg.layer_dims.assign(layers, embed_size);
    } else {
        cfg.layer_dims = parse_size_list(layer_dims);
    }
    cfg.leaky_slope = leaky_slope;
    cfg.init_mode = init_mode();
    return cfg;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig cfg;
    cfg.batch_size = batch_size;
    cfg.epochs = epochs;
    cfg.lr = lr;
    cfg.reg_lambda = reg;
    cfg.node_dropout = node_dropout;
    cfg.msg_dropout = msg_dropout;
    cfg.seed = seed;
    cfg.eval_every = eval_every;
    return cfg;
}

EncoderConfig RunConfig::encoder_config() const {
    EncoderConfig cfg;
    cfg.hidden_dims = parse_size_list(hidden_dims);
    cfg.latent_dim = embed_size;
    cfg.learning_rate = pretrain_lr;
    cfg.epochs = pretrain_epochs;
    cfg.mode = init == "gae" ? EncoderMode::deterministic : EncoderMode::variational;
    cfg.features = features == "identity" ? FeatureMode::identity : FeatureMode::laplacian_rows;
    cfg.negative_sample_ratio = negative_ratio;
    cfg.kl_weight = kl_weight;
    cfg.leaky_slope = leaky_slope;
    cfg.seed = seed;
    return cfg;
}

}  // namespace gvecf
