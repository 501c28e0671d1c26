#include "gvecf/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace gvecf {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

void Checkpoint::add(std::string name, DenseMatrix tensor) {
    tensors.emplace_back(std::move(name), std::move(tensor));
}

const DenseMatrix* Checkpoint::find(std::string_view name) const {
    for (const auto& [n, t] : tensors) {
        if (n == name) {
            return &t;
        }
    }
    return nullptr;
}

const DenseMatrix& Checkpoint::require(std::string_view name) const {
    const DenseMatrix* t = find(name);
    if (t == nullptr) {
        throw CheckpointError(CheckpointError::Kind::truncated,
                              "checkpoint: missing tensor '" + std::string(name) + "'");
    }
    return *t;
}

namespace {

constexpr char kMagic[4] = {'G', 'V', 'C', 'F'};

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_string(std::ostream& out, const std::string& s) {
    write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void read_exact(std::istream& in, char* buffer, std::size_t n, const char* what) {
    in.read(buffer, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw CheckpointError(CheckpointError::Kind::truncated,
                              std::string("checkpoint: truncated while reading ") + what);
    }
}

std::uint32_t read_u32(std::istream& in, const char* what) {
    std::uint32_t v = 0;
    read_exact(in, reinterpret_cast<char*>(&v), sizeof(v), what);
    return v;
}

std::uint64_t read_u64(std::istream& in, const char* what) {
    std::uint64_t v = 0;
    read_exact(in, reinterpret_cast<char*>(&v), sizeof(v), what);
    return v;
}

std::string read_string(std::istream& in, const char* what) {
    const std::uint64_t n = read_u64(in, what);
    std::string s(n, '\0');
    if (n > 0) {
        read_exact(in, s.data(), n, what);
    }
    return s;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw CheckpointError(CheckpointError::Kind::io, "checkpoint: cannot open " + path);
    }
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, Checkpoint::kVersion);
    write_string(out, ckpt.config_echo);
    write_u64(out, ckpt.epoch);
    write_string(out, ckpt.rng_state);
    write_u32(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const auto& [name, tensor] : ckpt.tensors) {
        write_string(out, name);
        write_u64(out, tensor.rows());
        write_u64(out, tensor.cols());
        out.write(reinterpret_cast<const char*>(tensor.data().data()),
                  static_cast<std::streamsize>(tensor.size() * sizeof(double)));
    }
    if (!out) {
        throw CheckpointError(CheckpointError::Kind::io, "checkpoint: write failed for " + path);
    }
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CheckpointError(CheckpointError::Kind::io, "checkpoint: cannot open " + path);
    }
    char magic[4] = {};
    read_exact(in, magic, sizeof(magic), "magic");
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw CheckpointError(CheckpointError::Kind::magic_mismatch,
                              "checkpoint: bad magic bytes in " + path);
    }
    const std::uint32_t version = read_u32(in, "version");
    if (version != Checkpoint::kVersion) {
        throw CheckpointError(CheckpointError::Kind::version_mismatch,
                              "checkpoint: unsupported version " + std::to_string(version));
    }
    Checkpoint ckpt;
    ckpt.config_echo = read_string(in, "config echo");
    ckpt.epoch = read_u64(in, "epoch");
    ckpt.rng_state = read_string(in, "rng state");
    const std::uint32_t n_tensors = read_u32(in, "tensor count");
    for (std::uint32_t t = 0; t < n_tensors; ++t) {
        std::string name = read_string(in, "tensor name");
        const std::uint64_t rows = read_u64(in, "tensor rows");
        const std::uint64_t cols = read_u64(in, "tensor cols");
        DenseMatrix tensor(rows, cols);
        if (tensor.size() > 0) {
            read_exact(in, reinterpret_cast<char*>(tensor.data().data()),
                       tensor.size() * sizeof(double), "tensor data");
        }
        ckpt.add(std::move(name), std::move(tensor));
    }
    return ckpt;
}

}  // namespace gvecf
