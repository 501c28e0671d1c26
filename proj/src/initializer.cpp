#include "gvecf/initializer.hpp"

#include <cmath>
#include <stdexcept>

namespace gvecf {

DenseMatrix xavier_init(std::size_t rows, std::size_t cols, Rng& rng) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("xavier_init: dimensions must be positive");
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    DenseMatrix out(rows, cols);
    for (double& v : out.data()) {
        v = rng.uniform(-bound, bound);
    }
    return out;
}

}  // namespace gvecf
