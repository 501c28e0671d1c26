#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gvecf/propagation.hpp"
#include "gvecf/trainer.hpp"
#include "gvecf/vgae.hpp"

namespace gvecf {

// Aggregated run settings behind the command-line surface. The echo() text is
// a flat key=value rendering (keys match the long CLI flags) that is written
// into manifests and checkpoints and can be fed back through --config.
struct RunConfig {
    std::string dataset_dir;
    std::string out_dir;
    std::string init = "variational";  // variational | gae | xavier
    std::size_t embed_size = 64;
    std::size_t layers = 3;
    std::string layer_dims;  // comma list; empty = embed_size repeated
    double lr = 1e-4;
    double reg = 1e-5;
    double node_dropout = 0.1;
    double msg_dropout = 0.1;
    double leaky_slope = 0.2;
    std::size_t batch_size = 1024;
    std::size_t epochs = 400;
    std::size_t k = 20;
    std::uint64_t seed = 2024;
    std::size_t eval_every = 10;

    // pretrainer
    std::size_t pretrain_epochs = 200;
    double pretrain_lr = 0.01;
    std::string hidden_dims = "128,64";
    double kl_weight = 1.0;
    double negative_ratio = 1.0;
    std::string features = "laplacian";  // laplacian | identity
    std::string pretrained;              // embeddings checkpoint path
    bool sample_embeddings = false;      // export one sampled draw instead of mu

    void validate() const;
    std::string echo() const;
    static RunConfig from_echo(const std::string& text);  // rejects unknown keys

    InitMode init_mode() const;
    PropagationConfig propagation_config() const;
    TrainConfig train_config() const;
    EncoderConfig encoder_config() const;  // latent_dim = embed_size
};

std::vector<double> parse_double_list(const std::string& text);
std::vector<std::size_t> parse_size_list(const std::string& text);

}  // namespace gvecf
