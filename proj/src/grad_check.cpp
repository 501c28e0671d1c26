#include "gvecf/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gvecf {

double grad_check(const std::function<double()>& loss,
                  const std::vector<DenseMatrix*>& params,
                  const std::vector<const DenseMatrix*>& analytic,
                  double step) {
    if (params.size() != analytic.size()) {
        throw std::invalid_argument("grad_check: parameter/gradient counts differ");
    }
    double worst = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
        DenseMatrix& param = *params[p];
        const DenseMatrix& grad = *analytic[p];
        if (!param.same_shape(grad)) {
            throw std::invalid_argument("grad_check: gradient shape does not match parameter");
        }
        for (std::size_t idx = 0; idx < param.size(); ++idx) {
            const double saved = param.data()[idx];
            param.data()[idx] = saved + step;
            const double plus = loss();
            param.data()[idx] = saved - step;
            const double minus = loss();
            param.data()[idx] = saved;
            if (!std::isfinite(plus) || !std::isfinite(minus)) {
                throw std::runtime_error("grad_check: loss is non-finite at perturbed point");
            }
            const double fd = (plus - minus) / (2.0 * step);
            const double an = grad.data()[idx];
            const double denom = std::max({1.0, std::abs(fd), std::abs(an)});
            worst = std::max(worst, std::abs(fd - an) / denom);
        }
    }
    return worst;
}

}  // namespace gvecf
