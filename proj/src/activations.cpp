#include "gvecf/activations.hpp"

#include <cmath>
#include <stdexcept>

namespace gvecf {

DenseMatrix leaky_relu(const DenseMatrix& x, double slope) {
    if (!(slope > 0.0 && slope < 1.0)) {
        throw std::invalid_argument("leaky_relu: slope must lie in (0, 1)");
    }
    DenseMatrix out(x.rows(), x.cols());
    for (std::size_t idx = 0; idx < x.size(); ++idx) {
        const double v = x.data()[idx];
        out.data()[idx] = v >= 0.0 ? v : slope * v;
    }
    return out;
}

double leaky_relu_derivative(double pre_activation, double slope) {
    return pre_activation >= 0.0 ? 1.0 : slope;
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x) {
    if (x > 0.0) {
        return x + std::log1p(std::exp(-x));
    }
    return std::log1p(std::exp(x));
}

double log_sigmoid(double x) {
    return -softplus(-x);
}

}  // namespace gvecf
