#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace gvecf {

// Deterministic random source. All randomness in the library flows through
// this wrapper so that a fixed seed reproduces runs bit-identically on any
// platform; std:: distributions are avoided because their output sequences
// are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform();

    // Uniform in [lo, hi).
    double uniform(double lo, double hi);

    // Uniform integer in [0, n); n must be positive.
    std::size_t uniform_index(std::size_t n);

    // Standard normal via Box-Muller; the paired draw is cached.
    double normal();

    std::string serialize() const;
    void deserialize(const std::string& text);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace gvecf
