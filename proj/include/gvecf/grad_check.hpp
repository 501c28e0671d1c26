#pragma once

#include <functional>
#include <vector>

#include "gvecf/dense_matrix.hpp"

namespace gvecf {

// Central-difference gradient verification. loss must evaluate the objective
// at the current contents of params; analytic[i] matches params[i]'s shape.
// Returns the max over all coordinates of |g_fd - g_an| / max(1, |g_fd|, |g_an|).
//
// Callers are responsible for keeping the evaluation point away from
// activation kinks (re-sample when any pre-activation magnitude falls below
// the perturbation scale).
double grad_check(const std::function<double()>& loss,
                  const std::vector<DenseMatrix*>& params,
                  const std::vector<const DenseMatrix*>& analytic,
                  double step = 1e-5);

}  // namespace gvecf
