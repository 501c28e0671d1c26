#pragma once

#include "gvecf/dense_matrix.hpp"

namespace gvecf {

// y = x for x >= 0, slope * x otherwise; slope must lie in (0, 1).
DenseMatrix leaky_relu(const DenseMatrix& x, double slope);

// Derivative convention at the kink: f'(0) = 1 (the x >= 0 branch).
double leaky_relu_derivative(double pre_activation, double slope);

double sigmoid(double x);

// log(1 + e^x), stable for large |x|.
double softplus(double x);

// log sigmoid(x) = -softplus(-x); finite for every finite x.
double log_sigmoid(double x);

}  // namespace gvecf
