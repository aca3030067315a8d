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

#ifndef BSADD_CONTINUOUS_HPP
#define BSADD_CONTINUOUS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "bsadd/errors.hpp"
#include "bsadd/laguerre.hpp"
#include "bsadd/pmf.hpp"

namespace bsadd {

/// Radial density of the continuous counterpart of a pmf: with u = |r|^2,
///   f(u) = sum_n p[n] e^{-u} u^n / n!,
/// a Poisson-kernel mixture. The full planar density is f(|r|^2) / pi; the
/// angular factor cancels out of every integral this module computes.
class RadialDensity {
 public:
  explicit RadialDensity(Pmf base) : base_(std::move(base)) {}

  const Pmf &base() const noexcept { return base_; }

  /// log f(u), evaluated by log-sum-exp over the support; -inf when f = 0.
  double log_value(double u) const {
    if (!(u >= 0.0)) throw DomainError("radial density: u must be >= 0");
    const auto &pv = base_.probs();
    if (u == 0.0) {
      return pv[0] > 0.0 ? std::log(pv[0]) : -std::numeric_limits<double>::infinity();
    }
    const double log_u = std::log(u);
    double max_term = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < pv.size(); ++n) {
      if (pv[n] <= 0.0) continue;
      const double ell = std::log(pv[n]) - u + n * log_u - std::lgamma(n + 1.0);
      max_term = std::max(max_term, ell);
    }
    if (max_term == -std::numeric_limits<double>::infinity()) return max_term;
    double acc = 0.0;
    for (std::size_t n = 0; n < pv.size(); ++n) {
      if (pv[n] <= 0.0) continue;
      const double ell = std::log(pv[n]) - u + n * log_u - std::lgamma(n + 1.0);
      acc += std::exp(ell - max_term);
    }
    return max_term + std::log(acc);
  }

  double operator()(double u) const { return std::exp(log_value(u)); }

 private:
  Pmf base_;
};

inline RadialDensity radial_density(const Pmf &p) { return RadialDensity(p); }

struct IntegrationParams {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  int max_depth = 52;
  /// Mass both densities may hold beyond the integration window.
  double tail_mass_bound = 1e-13;
};

namespace detail {

// Upper bound on the mass of f beyond U: each mixture component holds
// P(Poisson(U) <= n) there, bounded by (n+1) times its largest term once
// U exceeds the support.
inline double radial_tail_mass_bound(const Pmf &p, double big_u) {
  const auto &pv = p.probs();
  double total = 0.0;
  for (std::size_t n = 0; n < pv.size(); ++n) {
    if (pv[n] <= 0.0) continue;
    const double log_term =
        -big_u + n * std::log(big_u) - std::lgamma(n + 1.0) + std::log(n + 1.0);
    total += pv[n] * std::min(1.0, std::exp(log_term));
  }
  return total;
}

inline double integration_upper_limit(const Pmf &a, const Pmf &b, double bound) {
  double u = 2.0 * (std::max(a.support_bound(), b.support_bound()) + 10.0);
  for (int i = 0; i < 64; ++i) {
    if (radial_tail_mass_bound(a, u) < bound && radial_tail_mass_bound(b, u) < bound) {
      return u;
    }
    u *= 2.0;
  }
  throw NonIntegrableError("could not bound the density tails");
}

template <typename F>
double panel_gauss(const F &f, const QuadratureRule &rule, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < rule.order(); ++i) {
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return acc * half;
}

// Adaptive bisection with paired Gauss-Legendre estimates. Open rules never
// touch the endpoints, so integrable log singularities at u = 0 only slow
// refinement rather than producing NaNs.
template <typename F>
double adaptive_integrate(const F &f, double lo, double hi,
                          const IntegrationParams &params) {
  const QuadratureRule &coarse = []() -> const QuadratureRule & {
    static const QuadratureRule r = gauss_legendre_rule(7);
    return r;
  }();
  const QuadratureRule &fine = []() -> const QuadratureRule & {
    static const QuadratureRule r = gauss_legendre_rule(15);
    return r;
  }();

  struct Panel {
    double a, b;
    int depth;
  };
  std::vector<Panel> stack{{lo, hi, 0}};
  double total = 0.0;
  double unresolved = 0.0;
  while (!stack.empty()) {
    const Panel panel = stack.back();
    stack.pop_back();
    const double i_fine = panel_gauss(f, fine, panel.a, panel.b);
    const double i_coarse = panel_gauss(f, coarse, panel.a, panel.b);
    const double err = std::abs(i_fine - i_coarse);
    const double budget =
        std::max(params.abs_tol, params.rel_tol * std::abs(total)) *
        std::max((panel.b - panel.a) / (hi - lo), 1e-6);
    if (err <= budget || panel.depth >= params.max_depth) {
      total += i_fine;
      if (err > budget) unresolved += err;
      continue;
    }
    const double mid = 0.5 * (panel.a + panel.b);
    stack.push_back({panel.a, mid, panel.depth + 1});
    stack.push_back({mid, panel.b, panel.depth + 1});
  }
  if (unresolved > 1e-6 * std::max(1.0, std::abs(total))) {
    throw NonIntegrableError("integrand failed to converge under refinement");
  }
  return total;
}

}  // namespace detail

/// D(X_c || Y_c) = int_0^inf fX(u) log(fX(u)/fY(u)) du. The log ratio is
/// formed in log space so underflow of either density at large u cannot
/// produce 0/0; the window [0, U] is sized so both tails hold mass below
/// `tail_mass_bound`.
inline double continuous_relative_entropy(const RadialDensity &fx,
                                          const RadialDensity &fy,
                                          const IntegrationParams &params = {}) {
  const double hi =
      detail::integration_upper_limit(fx.base(), fy.base(), params.tail_mass_bound);
  auto integrand = [&](double u) {
    const double lx = fx.log_value(u);
    if (lx == -std::numeric_limits<double>::infinity()) return 0.0;
    const double ly = fy.log_value(u);
    return std::exp(lx) * (lx - ly);
  };
  return detail::adaptive_integrate(integrand, 0.0, hi, params);
}

/// Relative entropy can only contract under the discrete-to-continuous map:
/// D(X_c || Y_c) <= D(X || Y). A +inf discrete side holds trivially.
struct LogSumReport {
  double continuous_divergence = 0.0;
  double discrete_divergence = 0.0;
  bool holds = false;
  double tolerance = 1e-8;
};

inline LogSumReport check_log_sum(const Pmf &x, const Pmf &y,
                                  const IntegrationParams &params = {}) {
  LogSumReport report;
  report.discrete_divergence = relative_entropy(x, y);
  report.continuous_divergence =
      continuous_relative_entropy(radial_density(x), radial_density(y), params);
  report.holds =
      report.continuous_divergence <= report.discrete_divergence + report.tolerance;
  return report;
}

}  // namespace bsadd

#endif
