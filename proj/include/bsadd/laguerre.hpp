// Copyright 2026 The bsadd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BSADD_LAGUERRE_HPP
#define BSADD_LAGUERRE_HPP

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "bsadd/detail/bigfloat.hpp"
#include "bsadd/errors.hpp"

namespace bsadd {

/// Laguerre polynomials L_0..L_n at one point, by the three-term relation
/// (n+1) L_{n+1}(x) = (2n+1-x) L_n(x) - n L_{n-1}(x).
inline void laguerre_eval_batch(int n_max, double x, std::span<double> out) {
  out[0] = 1.0;
  if (n_max == 0) return;
  out[1] = 1.0 - x;
  for (int n = 1; n < n_max; ++n) {
    out[n + 1] =
        ((2.0 * n + 1.0 - x) * out[n] - static_cast<double>(n) * out[n - 1]) /
        (n + 1.0);
  }
}

inline double laguerre_eval(int n, double x) {
  if (n < 0) throw DomainError("laguerre_eval: order must be >= 0");
  std::vector<double> vals(static_cast<std::size_t>(n) + 1);
  laguerre_eval_batch(n, x, vals);
  return vals.back();
}

/// Gauss-Laguerre rule for the weight e^{-s} on [0, inf):
/// sum(weights) = 1 and polynomials of degree <= 2K-1 integrate exactly.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

// L_{K-1}, L_K, L_{K+1} at x by the three-term recurrence in extended
// precision. Near the smallest node L_{K+1} is itself tiny (the weight
// formula divides by it squared), so double evaluation noise would cost
// ~10 digits there.
struct LaguerreTriple {
  BigFloat below, at, above;
};

inline LaguerreTriple laguerre_triple_mp(int k, const BigFloat &x, int bits) {
  BigFloat prev(1.0, bits);       // L_0
  BigFloat cur(1.0, bits);        // L_1 = 1 - x
  cur -= x;
  if (k == 0) {
    LaguerreTriple t{BigFloat(bits), prev, cur};
    return t;
  }
  BigFloat below(bits);
  for (int n = 1; n <= k; ++n) {
    // (n+1) L_{n+1} = (2n+1-x) L_n - n L_{n-1}
    BigFloat next(2.0 * n + 1.0, bits);
    next -= x;
    next *= cur;
    BigFloat tail = prev;
    tail *= static_cast<unsigned long>(n);
    next -= tail;
    next /= static_cast<unsigned long>(n + 1);
    below = prev;
    prev = cur;
    cur = next;
  }
  return LaguerreTriple{below, prev, cur};  // L_{K-1}, L_K, L_{K+1}
}

}  // namespace detail

/// Nodes/weights via Golub-Welsch on the Jacobi matrix for seeds, then a
/// Newton polish and weight evaluation in extended precision so both are
/// correct to double rounding at any order. Weights below the double range
/// (largest nodes of orders ~200+) flush to zero.
inline QuadratureRule gauss_laguerre_rule(int order) {
  if (order < 1) throw DomainError("gauss_laguerre_rule: order must be >= 1");
  const int k = order;
  constexpr int kBits = 192;

  // Monic recurrence for Laguerre: alpha_n = 2n+1, beta_n = n^2, so the
  // symmetric Jacobi matrix has diagonal 2n+1 and off-diagonal n.
  Eigen::VectorXd diag(k), subdiag(k > 1 ? k - 1 : 1);
  for (int i = 0; i < k; ++i) diag[i] = 2.0 * i + 1.0;
  for (int i = 0; i + 1 < k; ++i) subdiag[i] = static_cast<double>(i + 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, subdiag.head(std::max(k - 1, 0)),
                                Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailureError("gauss_laguerre_rule: eigensolver failed");
  }

  QuadratureRule rule;
  rule.nodes.resize(k);
  rule.weights.resize(k);

  for (int i = 0; i < k; ++i) {
    detail::BigFloat x(solver.eigenvalues()[i], kBits);
    if (!(x.sign() > 0)) {
      throw ConvergenceFailureError("gauss_laguerre_rule: non-positive seed");
    }
    // Newton on L_K with x L_K'(x) = K (L_K(x) - L_{K-1}(x)); the seed is
    // within ~eps * ||J||, so three iterations reach the working precision.
    for (int it = 0; it < 3; ++it) {
      const auto t = detail::laguerre_triple_mp(k, x, kBits);
      detail::BigFloat df = t.at - t.below;
      df *= static_cast<unsigned long>(k);
      df /= x;
      x -= t.at / df;
    }
    const auto t = detail::laguerre_triple_mp(k, x, kBits);
    detail::BigFloat w = t.above * t.above;
    w *= static_cast<unsigned long>(k + 1);
    w *= static_cast<unsigned long>(k + 1);
    w = x / w;
    rule.nodes[i] = x.to_double();
    rule.weights[i] = w.to_double();
    if (!(rule.nodes[i] > 0.0) || !(rule.weights[i] >= 0.0)) {
      throw ConvergenceFailureError(
          "gauss_laguerre_rule: refinement failed at node " + std::to_string(i));
    }
  }

  for (int i = 0; i + 1 < k; ++i) {
    if (!(rule.nodes[i] < rule.nodes[i + 1])) {
      throw ConvergenceFailureError("gauss_laguerre_rule: nodes out of order");
    }
  }
  return rule;
}

/// Process-wide rule cache; concurrent lookups share immutable entries.
inline const QuadratureRule &cached_gauss_laguerre_rule(int order) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) {
    it = cache.emplace(order, std::make_unique<QuadratureRule>(gauss_laguerre_rule(order)))
             .first;
  }
  return *it->second;
}

/// Gauss-Legendre rule on [-1, 1] (Newton with Chebyshev initial guesses).
/// Used by the continuous-side integrators; weight function 1.
inline QuadratureRule gauss_legendre_rule(int order) {
  if (order < 1) throw DomainError("gauss_legendre_rule: order must be >= 1");
  const int n = order;
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int j = 1; j < n; ++j) {
        const double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw ConvergenceFailureError("gauss_legendre_rule: Newton failed");
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace bsadd

#endif
