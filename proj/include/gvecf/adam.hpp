#pragma once

#include <cstdint>
#include <vector>

#include "gvecf/dense_matrix.hpp"

namespace gvecf {

// Per-tensor Adam moment state with bias correction.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState for_param(const DenseMatrix& param);
};

void adam_step(DenseMatrix& param, const DenseMatrix& grad, AdamState& state, double lr);

}  // namespace gvecf
