#pragma once

// Test-only reference solver for the weighted hinge objective: accelerated
// projected-gradient ascent on the dual (box constraints 0 <= alpha <= U),
// deliberately independent of the library's coordinate-descent path.

#include <algorithm>
#include <cmath>
#include <vector>

#include "vocalics/matrix.hpp"

namespace testutil {

struct OracleSolution {
  std::vector<double> w;  // without bias
  double b = 0.0;
};

// Minimizes f(alpha) = 1/2 alpha^T Q alpha - sum(alpha) over the box
// [0, penalty], with Q_ij = s_i s_j (x_i . x_j + 1); the +1 is the implicit
// bias feature. FISTA with monotone restarts, fixed iteration budget.
inline OracleSolution solve_hinge_reference(const vocalics::Matrix& X,
                                            const std::vector<int>& sign,
                                            const std::vector<double>& penalty,
                                            std::size_t max_iters = 20000) {
  const std::size_t n = X.rows;
  const std::size_t d = X.cols;

  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double dot = 1.0;
      const double* xi = X.row(i);
      const double* xj = X.row(j);
      for (std::size_t c = 0; c < d; ++c) dot += xi[c] * xj[c];
      const double v = sign[i] * sign[j] * dot;
      q[i * n + j] = v;
      q[j * n + i] = v;
    }
  }

  // Lipschitz constant of the gradient via power iteration on Q
  std::vector<double> pv(n, 1.0), pw(n);
  double lip = 1.0;
  for (int it = 0; it < 60; ++it) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += q[i * n + j] * pv[j];
      pw[i] = acc;
      norm += acc * acc;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) break;
    for (std::size_t i = 0; i < n; ++i) pv[i] = pw[i] / norm;
    lip = norm;
  }
  const double step = 1.0 / (lip * 1.01);

  auto objective = [&](const std::vector<double>& a) {
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double qa = 0.0;
      for (std::size_t j = 0; j < n; ++j) qa += q[i * n + j] * a[j];
      obj += 0.5 * a[i] * qa - a[i];
    }
    return obj;
  };

  std::vector<double> alpha(n, 0.0), alpha_prev(n, 0.0), y(n, 0.0), grad(n);
  double t = 1.0;
  double best_obj = 0.0;
  std::vector<double> best_alpha(n, 0.0);
  for (std::size_t it = 0; it < max_iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double qy = 0.0;
      for (std::size_t j = 0; j < n; ++j) qy += q[i * n + j] * y[j];
      grad[i] = qy - 1.0;
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = std::clamp(y[i] - step * grad[i], 0.0, penalty[i]);
      change = std::max(change, std::abs(next - alpha[i]));
      alpha_prev[i] = alpha[i];
      alpha[i] = next;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double momentum = (t - 1.0) / t_next;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = alpha[i] + momentum * (alpha[i] - alpha_prev[i]);
    }
    t = t_next;

    if (it % 50 == 0 || it + 1 == max_iters) {
      const double obj = objective(alpha);
      if (obj < best_obj) {
        best_obj = obj;
        best_alpha = alpha;
      } else if (obj > best_obj + 1e-12) {
        // restart momentum when acceleration overshoots
        y = alpha;
        t = 1.0;
      }
      if (change < 1e-13) break;
    }
  }
  const double final_obj = objective(alpha);
  if (final_obj < best_obj) best_alpha = alpha;

  OracleSolution sol;
  sol.w.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double coef = best_alpha[i] * sign[i];
    if (coef == 0.0) continue;
    const double* x = X.row(i);
    for (std::size_t c = 0; c < d; ++c) sol.w[c] += coef * x[c];
    sol.b += coef;
  }
  return sol;
}

}  // namespace testutil
