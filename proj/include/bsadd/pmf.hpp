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

#ifndef BSADD_PMF_HPP
#define BSADD_PMF_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bsadd/errors.hpp"

namespace bsadd {

/// Truncated geometric family Geom(lambda): p[n] = lambda^n / (1+lambda)^(n+1).
/// `mean` is the mean lambda of the untruncated distribution;
/// `truncation_epsilon` bounds the mass dropped by truncation.
struct GeometricSpec {
  double mean = 1.0;
  double truncation_epsilon = 1e-12;
};

/// Finite-support probability mass function on the non-negative integers.
///
/// Entries are non-negative and sum to 1 within `tail_tolerance` (the
/// admitted missing tail mass plus accumulated round-off). Values built
/// from a GeometricSpec remember their analytic family so that relative
/// entropies against them can use the exact tail beyond the stored support.
class Pmf {
 public:
  static constexpr double kDefaultTailTolerance = 1e-12;

  const std::vector<double> &probs() const noexcept { return probs_; }
  double operator[](std::size_t n) const noexcept {
    return n < probs_.size() ? probs_[n] : 0.0;
  }
  std::size_t size() const noexcept { return probs_.size(); }
  /// Largest representable state, N = length - 1 (trailing zeros count).
  std::size_t support_bound() const noexcept { return probs_.empty() ? 0 : probs_.size() - 1; }
  double tail_tolerance() const noexcept { return tail_tolerance_; }
  const std::optional<GeometricSpec> &geometric_origin() const noexcept {
    return geometric_origin_;
  }

  friend Pmf make_pmf(std::vector<double> values, double tail_tolerance);
  friend Pmf geometric_pmf(const GeometricSpec &spec);

 private:
  Pmf(std::vector<double> probs, double tail_tolerance,
      std::optional<GeometricSpec> origin)
      : probs_(std::move(probs)),
        tail_tolerance_(tail_tolerance),
        geometric_origin_(origin) {}

  std::vector<double> probs_;
  double tail_tolerance_ = kDefaultTailTolerance;
  std::optional<GeometricSpec> geometric_origin_;
};

/// Validates and wraps a mass vector. Trailing zeros are preserved.
inline Pmf make_pmf(std::vector<double> values,
                    double tail_tolerance = Pmf::kDefaultTailTolerance) {
  if (values.empty()) {
    throw MassDeficitError("pmf must have at least one entry");
  }
  double sum = 0.0;
  for (std::size_t n = 0; n < values.size(); ++n) {
    const double v = values[n];
    if (!(v >= 0.0)) {
      throw NegativeMassError("pmf entry " + std::to_string(n) + " is " +
                              std::to_string(v) + " < 0");
    }
    sum += v;
  }
  if (!(std::abs(sum - 1.0) <= tail_tolerance)) {
    throw MassDeficitError("pmf mass " + std::to_string(sum) +
                           " deviates from 1 beyond tolerance " +
                           std::to_string(tail_tolerance));
  }
  return Pmf(std::move(values), tail_tolerance, std::nullopt);
}

/// Point mass at state k.
inline Pmf delta_pmf(std::size_t k) {
  std::vector<double> v(k + 1, 0.0);
  v[k] = 1.0;
  return make_pmf(std::move(v), 0.0);
}

/// Truncated Geom(lambda), keeping mass >= 1 - truncation_epsilon.
/// The result's tail_tolerance equals truncation_epsilon and the analytic
/// family is recorded for tail-aware relative entropies.
inline Pmf geometric_pmf(const GeometricSpec &spec) {
  const double lambda = spec.mean;
  const double eps = spec.truncation_epsilon;
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("geometric mean must be finite and >= 0");
  }
  if (!(eps > 0.0)) {
    throw DomainError("truncation_epsilon must be > 0");
  }
  std::size_t support = 0;
  if (lambda > 0.0) {
    // Missing tail after keeping 0..N is (lambda/(1+lambda))^(N+1).
    const double r = lambda / (1.0 + lambda);
    const double n = std::ceil(std::log(eps) / std::log(r)) - 1.0;
    support = n > 0.0 ? static_cast<std::size_t>(n) : 0;
  }
  std::vector<double> probs(support + 1);
  double mass = 1.0 / (1.0 + lambda);
  for (std::size_t n = 0; n <= support; ++n) {
    probs[n] = mass;
    mass *= lambda / (1.0 + lambda);
  }
  Pmf result(std::move(probs), eps, spec);
  return result;
}

inline double mean(const Pmf &p) {
  double acc = 0.0;
  const auto &v = p.probs();
  for (std::size_t n = 0; n < v.size(); ++n) acc += static_cast<double>(n) * v[n];
  return acc;
}

/// Shannon entropy in nats, with 0 log 0 = 0.
inline double entropy(const Pmf &p) {
  double acc = 0.0;
  for (double v : p.probs()) {
    if (v > 0.0) acc -= v * std::log(v);
  }
  return acc;
}

/// Entropy of the untruncated Geom(lambda): (1+l) log(1+l) - l log l.
inline double geometric_entropy(double lambda) {
  if (lambda <= 0.0) return 0.0;
  return (1.0 + lambda) * std::log1p(lambda) - lambda * std::log(lambda);
}

/// log q[n] for the untruncated Geom(lambda); -inf where the mass vanishes.
inline double geometric_log_pmf(double lambda, std::size_t n) {
  if (lambda == 0.0) {
    return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  const double dn = static_cast<double>(n);
  return dn * std::log(lambda) - (dn + 1.0) * std::log1p(lambda);
}

namespace detail {

// log q[n], preferring the analytic geometric tail when q records one.
inline double log_q(const Pmf &q, std::size_t n) {
  if (q.geometric_origin()) {
    return geometric_log_pmf(q.geometric_origin()->mean, n);
  }
  const double v = q[n];
  return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Relative entropy D(p||q) in nats; +inf when p charges a state q does not.
/// A q built from a GeometricSpec contributes its exact analytic mass at
/// every state, including beyond its stored support.
inline double relative_entropy(const Pmf &p, const Pmf &q) {
  double acc = 0.0;
  const auto &pv = p.probs();
  for (std::size_t n = 0; n < pv.size(); ++n) {
    const double pn = pv[n];
    if (pn <= 0.0) continue;
    const double lq = detail::log_q(q, n);
    if (lq == -std::numeric_limits<double>::infinity()) {
      return std::numeric_limits<double>::infinity();
    }
    acc += pn * (std::log(pn) - lq);
  }
  return acc;
}

/// Truncation-aware variant: p-mass on states where q vanishes is treated as
/// a truncation artifact and skipped as long as it stays below
/// `excess_tolerance`; beyond that the divergence is genuinely +inf.
inline double relative_entropy_trunc(const Pmf &p, const Pmf &q,
                                     double excess_tolerance) {
  double acc = 0.0;
  double excess = 0.0;
  const auto &pv = p.probs();
  for (std::size_t n = 0; n < pv.size(); ++n) {
    const double pn = pv[n];
    if (pn <= 0.0) continue;
    const double lq = detail::log_q(q, n);
    if (lq == -std::numeric_limits<double>::infinity()) {
      excess += pn;
      if (excess > excess_tolerance) {
        return std::numeric_limits<double>::infinity();
      }
      continue;
    }
    acc += pn * (std::log(pn) - lq);
  }
  return acc;
}

/// Total variation distance over the union of supports.
inline double total_variation(const Pmf &p, const Pmf &q) {
  const std::size_t n_max = std::max(p.size(), q.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < n_max; ++n) acc += std::abs(p[n] - q[n]);
  return 0.5 * acc;
}

}  // namespace bsadd

#endif
