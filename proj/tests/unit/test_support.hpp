#pragma once

#include <cmath>

#include "irlm/asymptotics.hpp"

namespace irlm::testing {

// Exact Lambda0 columns with a made-up positive definite Gamma. Enough for
// the estimator's bookkeeping without the cost of the real integrals.
inline AsymptoticTable synthetic_table(int p_max) {
  AsymptoticTable t;
  t.p_max = p_max;
  t.d_min = kLambda0DMin;
  t.d_step = 0.01;
  for (int k = 0; k <= 198; ++k) {
    const double d = kLambda0DMin + 0.01 * k;
    t.d_grid.push_back(d);
    t.lambda0.push_back(lambda0(d));
    t.lambda0_prime.push_back(lambda0_prime(d));
    if (d <= kGammaDMax + 1e-9) {
      Eigen::MatrixXd g(p_max, p_max);
      for (int i = 0; i < p_max; ++i)
        for (int j = 0; j < p_max; ++j)
          g(i, j) = (0.02 + 0.01 * (d + 0.5)) * (0.5 * std::min(i, j) + 0.5 + (i == j ? 0.5 * (i + 1) : 0.0));
      t.gamma.push_back(g);
    }
  }
  return t;
}

}  // namespace irlm::testing
