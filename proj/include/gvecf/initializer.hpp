#pragma once

#include "gvecf/dense_matrix.hpp"
#include "gvecf/rng.hpp"

namespace gvecf {

// Glorot-uniform draw in [-sqrt(6/(rows+cols)), +sqrt(6/(rows+cols))].
DenseMatrix xavier_init(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace gvecf
