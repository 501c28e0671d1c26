#include "gvecf/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace gvecf {

AdamState AdamState::for_param(const DenseMatrix& param) {
    AdamState state;
    state.m.assign(param.size(), 0.0);
    state.v.assign(param.size(), 0.0);
    return state;
}

void adam_step(DenseMatrix& param, const DenseMatrix& grad, AdamState& state, double lr) {
    if (!param.same_shape(grad)) {
        throw std::invalid_argument("adam_step: parameter and gradient shapes differ");
    }
    if (state.m.size() != param.size() || state.v.size() != param.size()) {
        throw std::invalid_argument("adam_step: state does not match parameter");
    }
    if (!(lr > 0.0)) {
        throw std::invalid_argument("adam_step: learning rate must be positive");
    }
    state.t += 1;
    const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t idx = 0; idx < param.size(); ++idx) {
        const double g = grad.data()[idx];
        state.m[idx] = state.beta1 * state.m[idx] + (1.0 - state.beta1) * g;
        state.v[idx] = state.beta2 * state.v[idx] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.m[idx] / bias1;
        const double v_hat = state.v[idx] / bias2;
        param.data()[idx] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

}  // namespace gvecf
