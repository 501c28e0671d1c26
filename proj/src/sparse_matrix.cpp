#include "gvecf/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gvecf {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_offsets_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> entries) {
    for (const auto& t : entries) {
        if (t.row >= rows || t.col >= cols) {
            throw std::invalid_argument("SparseMatrix::from_triplets: index out of range");
        }
        if (!std::isfinite(t.value)) {
            throw std::invalid_argument("SparseMatrix::from_triplets: non-finite value");
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix out(rows, cols);
    out.col_indices_.reserve(entries.size());
    out.values_.reserve(entries.size());
    std::size_t i = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        while (i < entries.size() && entries[i].row == r) {
            double value = entries[i].value;
            const std::size_t c = entries[i].col;
            ++i;
            while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
                value += entries[i].value;
                ++i;
            }
            if (value != 0.0) {
                out.col_indices_.push_back(c);
                out.values_.push_back(value);
            }
        }
        out.row_offsets_[r + 1] = out.col_indices_.size();
    }
    return out;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    SparseMatrix out(n, n);
    out.col_indices_.resize(n);
    out.values_.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        out.col_indices_[i] = i;
        out.row_offsets_[i + 1] = i + 1;
    }
    return out;
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) {
        throw std::out_of_range("SparseMatrix::at: index out of range");
    }
    const auto begin = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
    const auto end = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) {
        return 0.0;
    }
    return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

DenseMatrix SparseMatrix::to_dense() const {
    DenseMatrix out(rows_, cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            out(r, col_indices_[k]) = values_[k];
        }
    }
    return out;
}

DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& d) {
    if (s.cols() != d.rows()) {
        throw std::invalid_argument("spmm: inner dimensions do not match");
    }
    const std::size_t out_cols = d.cols();
    DenseMatrix out(s.rows(), out_cols, 0.0);
    const auto& offsets = s.row_offsets();
    const auto& cols = s.col_indices();
    const auto& vals = s.values();
    for (std::size_t r = 0; r < s.rows(); ++r) {
        double* out_row = out.data().data() + r * out_cols;
        for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) {
            const double v = vals[k];
            const double* d_row = d.data().data() + cols[k] * out_cols;
            for (std::size_t j = 0; j < out_cols; ++j) {
                out_row[j] += v * d_row[j];
            }
        }
    }
    return out;
}

SparseMatrix transpose(const SparseMatrix& s) {
    std::vector<Triplet> entries;
    entries.reserve(s.nnz());
    for (std::size_t r = 0; r < s.rows(); ++r) {
        for (std::size_t k = s.row_offsets()[r]; k < s.row_offsets()[r + 1]; ++k) {
            entries.push_back({s.col_indices()[k], r, s.values()[k]});
        }
    }
    return SparseMatrix::from_triplets(s.cols(), s.rows(), std::move(entries));
}

SparseMatrix add_identity(const SparseMatrix& s) {
    if (s.rows() != s.cols()) {
        throw std::invalid_argument("add_identity: matrix must be square");
    }
    std::vector<Triplet> entries;
    entries.reserve(s.nnz() + s.rows());
    for (std::size_t r = 0; r < s.rows(); ++r) {
        for (std::size_t k = s.row_offsets()[r]; k < s.row_offsets()[r + 1]; ++k) {
            entries.push_back({r, s.col_indices()[k], s.values()[k]});
        }
        entries.push_back({r, r, 1.0});
    }
    return SparseMatrix::from_triplets(s.rows(), s.cols(), std::move(entries));
}

}  // namespace gvecf
