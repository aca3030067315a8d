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

#ifndef BSADD_BEAMSPLITTER_HPP
#define BSADD_BEAMSPLITTER_HPP

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bsadd/errors.hpp"
#include "bsadd/pmf.hpp"
#include "bsadd/transforms.hpp"

namespace bsadd {

/// Beamsplitter transmissivity, constrained to [0, 1].
struct Eta {
  explicit Eta(double v) : value(v) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DomainError("eta out of range [0, 1]: " + std::to_string(v));
    }
  }
  double value;
};

enum class BeamsplitBackend {
  kQuadrature,    // Laguerre inversion of the H~ product (default)
  kExactMoments,  // extended-precision moment combination + inversion
};

struct BeamsplitConfig {
  BeamsplitBackend backend = BeamsplitBackend::kQuadrature;
  /// Highest output state computed; -1 means N_X + N_Y (the support bound
  /// of the output for finite inputs).
  int m_max = -1;
  int precision_bits = kDefaultPrecisionBits;
  std::optional<int> quadrature_order;
};

/// Coefficient form of the product rule H~_Z(t) = H~_X(eta t) H~_Y((1-eta) t):
/// c[k] = sum_m C(k,m) eta^m (1-eta)^{k-m} bX[m] bY[k-m].
/// Extended-precision backings are combined when both inputs carry one.
inline BinomialMomentSeq beamsplit_moments(const BinomialMomentSeq &bx,
                                           const BinomialMomentSeq &by, Eta eta) {
  if (bx.size() != by.size()) {
    throw DomainError("beamsplit_moments: sequences must have equal length");
  }
  const int m_count = static_cast<int>(bx.size());
  const double e = eta.value;
  const double f = 1.0 - e;

  std::vector<double> pow_e(m_count), pow_f(m_count);
  pow_e[0] = pow_f[0] = 1.0;
  for (int m = 1; m < m_count; ++m) {
    pow_e[m] = pow_e[m - 1] * e;
    pow_f[m] = pow_f[m - 1] * f;
  }

  std::vector<double> c(m_count, 0.0);
  for (int k = 0; k < m_count; ++k) {
    double coeff = 1.0;  // C(k, m)
    double acc = 0.0;
    for (int m = 0; m <= k; ++m) {
      if (m > 0) coeff *= static_cast<double>(k - m + 1) / static_cast<double>(m);
      acc += coeff * pow_e[m] * pow_f[k - m] * bx[m] * by[k - m];
    }
    if (!std::isfinite(acc)) throw OverflowError("beamsplit moment overflowed");
    c[k] = acc;
  }

  std::shared_ptr<const detail::BigVec> exact;
  if (bx.exact() && by.exact()) {
    const auto &ex = *bx.exact();
    const auto &ey = *by.exact();
    const int bits = std::min(ex[0].precision(), ey[0].precision());
    detail::BigVec pe, pf;
    pe.reserve(m_count);
    pf.reserve(m_count);
    pe.emplace_back(1.0, bits);
    pf.emplace_back(1.0, bits);
    const detail::BigFloat e_mp(e, bits), f_mp(f, bits);
    for (int m = 1; m < m_count; ++m) {
      pe.push_back(pe.back() * e_mp);
      pf.push_back(pf.back() * f_mp);
    }
    auto out = std::make_shared<detail::BigVec>();
    out->reserve(m_count);
    for (int k = 0; k < m_count; ++k) {
      detail::BigFloat acc(bits);
      for (int m = 0; m <= k; ++m) {
        detail::BigFloat term = ex[m] * ey[k - m];
        term *= pe[m];
        term *= pf[k - m];
        acc.add_binomial_times(k, m, term);
      }
      out->push_back(std::move(acc));
    }
    exact = std::move(out);
  }
  return BinomialMomentSeq(std::move(c), std::move(exact));
}

/// Z = X (+)_eta Y. Default backend: Gauss-Laguerre inversion of the
/// H~ product, which is polynomial-exact for finite supports at the
/// automatic rule order K = N_X + N_Y + ceil(m_max/2) + 2. The
/// exact-moments backend is an independent route kept for cross-validation.
inline Pmf beamsplit_add(const Pmf &x, const Pmf &y, Eta eta,
                         const BeamsplitConfig &cfg = {}) {
  if (eta.value == 1.0) return x;
  if (eta.value == 0.0) return y;

  const int nx = static_cast<int>(x.support_bound());
  const int ny = static_cast<int>(y.support_bound());
  if (cfg.m_max >= 0 && cfg.m_max < nx + ny) {
    throw DomainError("beamsplit m_max " + std::to_string(cfg.m_max) +
                      " is below the output support bound " + std::to_string(nx + ny));
  }
  const int m_max = cfg.m_max >= 0 ? cfg.m_max : nx + ny;
  const double base_tol = x.tail_tolerance() + y.tail_tolerance();

  if (cfg.backend == BeamsplitBackend::kExactMoments) {
    const auto bx = binomial_moments(x, m_max, cfg.precision_bits);
    const auto by = binomial_moments(y, m_max, cfg.precision_bits);
    return pmf_from_binomial_moments(beamsplit_moments(bx, by, eta),
                                     cfg.precision_bits);
  }

  // Beyond this the Laguerre values at the top quadrature nodes leave the
  // double range even though the integrand itself is tame.
  if (m_max > 250) {
    throw DomainError(
        "combined support " + std::to_string(m_max) +
        " exceeds the quadrature backend's range (250); use the exact_moments "
        "backend with enough precision bits, or coarser truncation");
  }
  const int order = cfg.quadrature_order ? *cfg.quadrature_order
                                         : nx + ny + (m_max + 1) / 2 + 2;
  const QuadratureRule &rule = cached_gauss_laguerre_rule(order);
  const double e = eta.value;
  auto htilde_product = [&](double t) {
    return eval_H_tilde(x, e * t) * eval_H_tilde(y, (1.0 - e) * t);
  };
  return detail::laguerre_invert_impl(htilde_product, m_max, rule, base_tol);
}

}  // namespace bsadd

#endif
