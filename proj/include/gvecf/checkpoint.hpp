#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gvecf/dense_matrix.hpp"

namespace gvecf {

struct CheckpointError : std::runtime_error {
    enum class Kind { io, magic_mismatch, version_mismatch, truncated };
    Kind kind;
    CheckpointError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// Binary container: magic "GVCF", u32 version, length-prefixed config echo,
// u64 epoch, length-prefixed rng state, then named tensors as little-endian
// f64 arrays with shape headers. Round trips are bit-exact.
struct Checkpoint {
    static constexpr std::uint32_t kVersion = 1;

    std::string config_echo;
    std::uint64_t epoch = 0;
    std::string rng_state;
    std::vector<std::pair<std::string, DenseMatrix>> tensors;

    void add(std::string name, DenseMatrix tensor);
    const DenseMatrix* find(std::string_view name) const;  // nullptr when absent
    const DenseMatrix& require(std::string_view name) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace gvecf
