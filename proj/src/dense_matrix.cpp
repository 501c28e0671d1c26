#include "gvecf/dense_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gvecf {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

void DenseMatrix::fill(double value) {
    std::fill(data_.begin(), data_.end(), value);
}

bool DenseMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: inner dimensions do not match");
    }
    DenseMatrix out(a.rows(), b.cols(), 0.0);
    const std::size_t n = a.rows(), k_dim = a.cols(), m = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        const double* a_row = a.data().data() + i * k_dim;
        double* out_row = out.data().data() + i * m;
        for (std::size_t k = 0; k < k_dim; ++k) {
            const double a_ik = a_row[k];
            if (a_ik == 0.0) continue;
            const double* b_row = b.data().data() + k * m;
            for (std::size_t j = 0; j < m; ++j) {
                out_row[j] += a_ik * b_row[j];
            }
        }
    }
    return out;
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("hadamard: shapes do not match");
    }
    DenseMatrix out(a.rows(), a.cols());
    for (std::size_t idx = 0; idx < a.size(); ++idx) {
        out.data()[idx] = a.data()[idx] * b.data()[idx];
    }
    return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(j, i) = a(i, j);
        }
    }
    return out;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("operator+: shapes do not match");
    }
    DenseMatrix out(a.rows(), a.cols());
    for (std::size_t idx = 0; idx < a.size(); ++idx) {
        out.data()[idx] = a.data()[idx] + b.data()[idx];
    }
    return out;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("operator-: shapes do not match");
    }
    DenseMatrix out(a.rows(), a.cols());
    for (std::size_t idx = 0; idx < a.size(); ++idx) {
        out.data()[idx] = a.data()[idx] - b.data()[idx];
    }
    return out;
}

DenseMatrix& operator+=(DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("operator+=: shapes do not match");
    }
    for (std::size_t idx = 0; idx < a.size(); ++idx) {
        a.data()[idx] += b.data()[idx];
    }
    return a;
}

DenseMatrix scaled(const DenseMatrix& a, double factor) {
    DenseMatrix out(a.rows(), a.cols());
    for (std::size_t idx = 0; idx < a.size(); ++idx) {
        out.data()[idx] = a.data()[idx] * factor;
    }
    return out;
}

void add_scaled(DenseMatrix& a, const DenseMatrix& b, double factor) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("add_scaled: shapes do not match");
    }
    for (std::size_t idx = 0; idx < a.size(); ++idx) {
        a.data()[idx] += factor * b.data()[idx];
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dot: lengths do not match");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double squared_norm(const DenseMatrix& a) {
    double acc = 0.0;
    for (double v : a.data()) {
        acc += v * v;
    }
    return acc;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("max_abs_diff: shapes do not match");
    }
    double worst = 0.0;
    for (std::size_t idx = 0; idx < a.size(); ++idx) {
        worst = std::max(worst, std::abs(a.data()[idx] - b.data()[idx]));
    }
    return worst;
}

DenseMatrix concat_columns(const std::vector<DenseMatrix>& blocks) {
    if (blocks.empty()) {
        throw std::invalid_argument("concat_columns: no blocks");
    }
    const std::size_t rows = blocks.front().rows();
    std::size_t total_cols = 0;
    for (const auto& b : blocks) {
        if (b.rows() != rows) {
            throw std::invalid_argument("concat_columns: row counts differ");
        }
        total_cols += b.cols();
    }
    DenseMatrix out(rows, total_cols);
    for (std::size_t i = 0; i < rows; ++i) {
        std::size_t offset = 0;
        for (const auto& b : blocks) {
            auto src = b.row(i);
            std::copy(src.begin(), src.end(), out.row(i).begin() + offset);
            offset += b.cols();
        }
    }
    return out;
}

}  // namespace gvecf
