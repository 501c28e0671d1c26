#pragma once

#include <cstddef>
#include <vector>

#include "gvecf/dense_matrix.hpp"

namespace gvecf {

struct Triplet {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

// Compressed-row sparse matrix. Column indices are strictly increasing within
// each row and explicit zeros are never stored. Graph matrices are built once
// and treated as immutable afterwards.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::size_t rows, std::size_t cols);  // no nonzeros

    // Duplicate coordinates are summed; entries that end up exactly zero are
    // dropped.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                      std::vector<Triplet> entries);
    static SparseMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    const std::vector<std::size_t>& row_offsets() const { return row_offsets_; }
    const std::vector<std::size_t>& col_indices() const { return col_indices_; }
    const std::vector<double>& values() const { return values_; }

    double at(std::size_t i, std::size_t j) const;  // 0.0 when absent
    DenseMatrix to_dense() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_offsets_;  // size rows + 1
    std::vector<std::size_t> col_indices_;
    std::vector<double> values_;
};

// Sparse-dense product s * d. Accumulation is strictly per output row, so the
// result never depends on a parallel row schedule.
DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& d);

SparseMatrix transpose(const SparseMatrix& s);

// s + I; s must be square.
SparseMatrix add_identity(const SparseMatrix& s);

}  // namespace gvecf
