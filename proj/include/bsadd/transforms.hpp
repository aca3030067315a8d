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

#ifndef BSADD_TRANSFORMS_HPP
#define BSADD_TRANSFORMS_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "bsadd/detail/bigfloat.hpp"
#include "bsadd/errors.hpp"
#include "bsadd/laguerre.hpp"
#include "bsadd/pmf.hpp"

namespace bsadd {

namespace detail {

using BigVec = std::vector<BigFloat>;

/// b[m] = sum_n C(n,m) p[n] for m = 0..m_max, carried at `precision_bits`.
/// The products C(n,m) * p[n] are exact at >= 110 bits for any double pmf
/// with support below 2^53, so these values are correct to the working
/// precision rather than to double.
inline std::shared_ptr<const BigVec> exact_binomial_moments(const Pmf &p, int m_max,
                                                            int precision_bits) {
  auto out = std::make_shared<BigVec>();
  out->reserve(m_max + 1);
  const auto &pv = p.probs();
  const std::size_t n_max = pv.size() - 1;
  for (int m = 0; m <= m_max; ++m) {
    BigFloat acc(precision_bits);
    if (static_cast<std::size_t>(m) <= n_max) {
      // C(n,m) accumulated multiplicatively as n climbs.
      BigFloat coeff(1.0, precision_bits);
      for (std::size_t n = m; n <= n_max; ++n) {
        if (n > static_cast<std::size_t>(m)) {
          coeff *= static_cast<unsigned long>(n);
          coeff /= static_cast<unsigned long>(n - m);
        }
        if (pv[n] != 0.0) {
          acc += coeff * BigFloat(pv[n], precision_bits);
        }
      }
    }
    out->push_back(std::move(acc));
  }
  return out;
}

}  // namespace detail

/// Binomial-moment sequence b[m] = E(X)_(m) / m!, the coefficient sequence of
/// both generating functions of X. Carries an extended-precision backing
/// (when built by binomial_moments or beamsplit_moments) so that the
/// ill-conditioned inversion back to a pmf does not lose information to
/// double rounding.
class BinomialMomentSeq {
 public:
  explicit BinomialMomentSeq(std::vector<double> b,
                             std::shared_ptr<const detail::BigVec> exact = nullptr)
      : b_(std::move(b)), exact_(std::move(exact)) {
    if (b_.empty()) throw DomainError("moment sequence must be non-empty");
    for (double v : b_) {
      if (!std::isfinite(v)) throw OverflowError("binomial moment overflowed");
      if (v < -1e-12) throw NegativeMassError("binomial moment < 0");
    }
    if (std::abs(b_[0] - 1.0) > 1e-6) {
      throw MassDeficitError("binomial moment b[0] = " + std::to_string(b_[0]) +
                             " is not total mass 1");
    }
  }

  const std::vector<double> &values() const noexcept { return b_; }
  double operator[](std::size_t m) const noexcept { return b_[m]; }
  std::size_t size() const noexcept { return b_.size(); }
  int max_order() const noexcept { return static_cast<int>(b_.size()) - 1; }
  double source_mean() const noexcept { return b_.size() > 1 ? b_[1] : 0.0; }
  const std::shared_ptr<const detail::BigVec> &exact() const noexcept { return exact_; }

 private:
  std::vector<double> b_;
  std::shared_ptr<const detail::BigVec> exact_;
};

/// Continuous-side moment sequence d[m] = E|X_c|^{2m} / m!.
class ContinuousMomentSeq {
 public:
  explicit ContinuousMomentSeq(std::vector<double> d) : d_(std::move(d)) {
    if (d_.empty()) throw DomainError("moment sequence must be non-empty");
    for (double v : d_) {
      if (!std::isfinite(v)) throw OverflowError("continuous moment overflowed");
      if (v < -1e-12) throw NegativeMassError("continuous moment < 0");
    }
  }
  const std::vector<double> &values() const noexcept { return d_; }
  double operator[](std::size_t m) const noexcept { return d_[m]; }
  std::size_t size() const noexcept { return d_.size(); }

 private:
  std::vector<double> d_;
};

constexpr int kDefaultPrecisionBits = 256;

/// b[m] = sum_{n>=m} C(n,m) p[n] for m = 0..m_max (default: the support
/// bound). Upward recursion over n; coefficients grow monotonically so the
/// double sums carry no cancellation.
inline BinomialMomentSeq binomial_moments(const Pmf &p, int m_max = -1,
                                          int precision_bits = kDefaultPrecisionBits) {
  if (m_max < 0) m_max = static_cast<int>(p.support_bound());
  const auto &pv = p.probs();
  std::vector<double> b(m_max + 1, 0.0);
  for (int m = 0; m <= m_max; ++m) {
    double coeff = 1.0;
    double acc = 0.0;
    for (std::size_t n = m; n < pv.size(); ++n) {
      if (n > static_cast<std::size_t>(m)) {
        coeff *= static_cast<double>(n) / static_cast<double>(n - m);
      }
      acc += coeff * pv[n];
    }
    if (!std::isfinite(acc)) {
      throw OverflowError("binomial moment b[" + std::to_string(m) + "] overflowed");
    }
    b[m] = acc;
  }
  return BinomialMomentSeq(std::move(b),
                           detail::exact_binomial_moments(p, m_max, precision_bits));
}

/// Inverts binomial moments by inclusion-exclusion,
/// p[n] = sum_{m>=n} (-1)^{m-n} C(m,n) b[m], in extended precision.
///
/// The alternating sum cancels catastrophically (partial terms reach
/// C(M, M/2) * max b), so the computation runs at `precision_bits` on the
/// sequence's extended backing when present. A running cancellation estimate
/// (largest term exponent vs. precision budget) raises PrecisionExhausted
/// instead of returning silently wrong mass.
inline Pmf pmf_from_binomial_moments(const BinomialMomentSeq &b,
                                     int precision_bits = kDefaultPrecisionBits) {
  if (precision_bits < 53) {
    throw DomainError("precision_bits must be >= 53");
  }
  const int m_count = static_cast<int>(b.size());
  const detail::BigVec *exact = b.exact() ? b.exact().get() : nullptr;

  std::vector<double> probs(m_count, 0.0);
  long max_term_exp = std::numeric_limits<long>::min();
  for (int n = 0; n < m_count; ++n) {
    detail::BigFloat acc(precision_bits);
    for (int m = n; m < m_count; ++m) {
      detail::BigFloat term =
          exact ? (*exact)[m] : detail::BigFloat(b[m], precision_bits);
      if (term.is_zero()) continue;
      term *= detail::BigFloat::exact_binomial(m, n, precision_bits);
      if ((m - n) % 2 != 0) term.negate();
      max_term_exp = std::max(max_term_exp, term.exponent2());
      acc += term;
    }
    probs[n] = acc.to_double();
  }

  const double terms_bits = std::log2(static_cast<double>(m_count) + 1.0);
  // Absolute round-off bound; past ~2^-44 (~6e-14) the entries can no
  // longer be certified against the pmf validation tolerance.
  const double err_exp =
      (max_term_exp == std::numeric_limits<long>::min())
          ? -1074.0
          : static_cast<double>(max_term_exp) + terms_bits - precision_bits;
  if (err_exp > -44.0) {
    throw PrecisionExhaustedError(
        "moment inversion cancellation needs about " +
        std::to_string(static_cast<long>(max_term_exp + terms_bits) + 64) +
        " bits, have " + std::to_string(precision_bits));
  }
  const double err_abs = std::exp2(err_exp);
  const double neg_tol = std::max(1e-15, 8.0 * err_abs);

  double sum = 0.0;
  for (double &v : probs) {
    if (v < 0.0) {
      if (v < -neg_tol) {
        throw NotAPmfError("moment inversion produced entry " + std::to_string(v) +
                           "; input moments are not a pmf's");
      }
      v = 0.0;
    }
    sum += v;
  }
  const double tol = std::max(Pmf::kDefaultTailTolerance, 2.0 * std::abs(1.0 - sum));
  return make_pmf(std::move(probs), tol);
}

/// Exponential generating function H~(t) = sum b[m] t^m / m!, series route.
/// Only t <= 0 keeps the sum bounded for arbitrary inputs; positive t
/// must be opted into.
inline double eval_H_tilde(const BinomialMomentSeq &b, double t,
                           bool allow_positive_t = false) {
  if (t > 0.0 && !allow_positive_t) {
    throw DomainError("eval_H_tilde: t must be <= 0 (set allow_positive_t to override)");
  }
  const int m_max = b.max_order();
  double acc = b[m_max];
  for (int m = m_max - 1; m >= 0; --m) {
    acc = b[m] + acc * t / (m + 1.0);
  }
  return acc;
}

/// H~(t) = sum_n p[n] L_n(-t), the Laguerre route (one batched recurrence).
inline double eval_H_tilde(const Pmf &p, double t, bool allow_positive_t = false) {
  if (t > 0.0 && !allow_positive_t) {
    throw DomainError("eval_H_tilde: t must be <= 0 (set allow_positive_t to override)");
  }
  const auto &pv = p.probs();
  std::vector<double> lag(pv.size());
  laguerre_eval_batch(static_cast<int>(pv.size()) - 1, -t, lag);
  double acc = 0.0;
  for (std::size_t n = 0; n < pv.size(); ++n) acc += pv[n] * lag[n];
  return acc;
}

namespace detail {

// Ordinary power sum over stored coefficients, with a term-ratio divergence
// heuristic: transient growth (binomial-type coefficients rise before they
// decay) is fine, but |terms| still growing in the tail of the sequence
// means the series the truncation stands for does not converge at this
// argument, and the partial sum would be reported as if it did.
inline double ordinary_series(const std::vector<double> &coeffs, double t,
                              const char *name) {
  const std::size_t count = coeffs.size();
  std::vector<double> mag(count);
  double power = 1.0;
  double acc = 0.0;
  for (std::size_t m = 0; m < count; ++m) {
    const double term = coeffs[m] * power;
    mag[m] = std::abs(term);
    acc += term;
    power *= t;
  }
  if (count >= 10) {
    std::size_t last_growth = 0;
    int growth_count = 0;
    for (std::size_t m = 1; m < count; ++m) {
      if (mag[m] > 1e-300 && mag[m] >= mag[m - 1]) {
        last_growth = m;
        ++growth_count;
      }
    }
    if (growth_count >= 3 &&
        last_growth * 5 >= 4 * (count - 1)) {
      throw DivergentSeriesError(std::string(name) +
                                 " series has a sustained term ratio >= 1");
    }
  }
  if (!std::isfinite(acc)) throw OverflowError(std::string(name) + " overflowed");
  return acc;
}

}  // namespace detail

/// Ordinary generating function H(t) = sum b[m] t^m over the stored
/// coefficients. Divergence of the underlying series is detected by a
/// sustained term-ratio heuristic.
inline double eval_H(const BinomialMomentSeq &b, double t) {
  return detail::ordinary_series(b.values(), t, "eval_H");
}

/// d[k] = sum_{j<=k} C(k,j) b[j], the binomial transform linking the
/// discrete sequence to the continuous-side moments.
inline ContinuousMomentSeq continuous_moments(const BinomialMomentSeq &b) {
  const int m_count = static_cast<int>(b.size());
  std::vector<double> d(m_count, 0.0);
  for (int k = 0; k < m_count; ++k) {
    double coeff = 1.0;
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) {
      if (j > 0) coeff *= static_cast<double>(k - j + 1) / static_cast<double>(j);
      acc += coeff * b[j];
    }
    if (!std::isfinite(acc)) {
      throw OverflowError("continuous moment d[" + std::to_string(k) + "] overflowed");
    }
    d[k] = acc;
  }
  return ContinuousMomentSeq(std::move(d));
}

/// phi~(t) = sum d[m] t^m / m! over the stored coefficients.
inline double eval_phi_tilde(const ContinuousMomentSeq &d, double t) {
  const int m_max = static_cast<int>(d.size()) - 1;
  double acc = d[m_max];
  for (int m = m_max - 1; m >= 0; --m) {
    acc = d[m] + acc * t / (m + 1.0);
  }
  return acc;
}

/// phi(t) = sum d[m] t^m over the stored coefficients (ordinary series).
inline double eval_phi(const ContinuousMomentSeq &d, double t) {
  return detail::ordinary_series(d.values(), t, "eval_phi");
}

/// H~(t) via the series route evaluated in extended precision straight from
/// the pmf. For |t| of a few units the double series loses ~10 digits to
/// cancellation on wide supports; this route keeps them.
inline double eval_H_tilde_exact(const Pmf &p, double t,
                                 int precision_bits = kDefaultPrecisionBits) {
  const int m_max = static_cast<int>(p.support_bound());
  auto b = detail::exact_binomial_moments(p, m_max, precision_bits);
  detail::BigFloat acc(precision_bits);
  detail::BigFloat power(1.0, precision_bits);
  const detail::BigFloat t_mp(t, precision_bits);
  for (int m = 0; m <= m_max; ++m) {
    if (m > 0) {
      power *= t_mp;
      power /= static_cast<unsigned long>(m);
    }
    acc += (*b)[m] * power;
  }
  return acc.to_double();
}

namespace detail {

// Sums sum_m w(m) * (sum_n p[n] C(m+n, n)) in extended precision, where
// w(m) is either t^m/m! (exponential) or s^m (ordinary). The continuous
// moments d[m] = sum_n p[n] C(m+n,n) grow polynomially of degree N, so the
// exponential series always converges and the ordinary one does for |s| < 1.
inline double phi_series_exact(const Pmf &p, double arg, bool exponential,
                               int precision_bits) {
  const auto &pv = p.probs();
  const std::size_t n_count = pv.size();
  BigVec coeff;  // coeff[n] = C(m+n, n), updated multiplicatively in m
  coeff.reserve(n_count);
  for (std::size_t n = 0; n < n_count; ++n) coeff.emplace_back(1.0, precision_bits);

  const BigFloat arg_mp(arg, precision_bits);
  BigFloat power(1.0, precision_bits);
  BigFloat acc(precision_bits);
  long acc_peak_exp = std::numeric_limits<long>::min();
  int quiet_run = 0;
  const long target_drop = precision_bits - 60;

  for (long m = 0; m < 2000000; ++m) {
    if (m > 0) {
      power *= arg_mp;
      if (exponential) power /= static_cast<unsigned long>(m);
      for (std::size_t n = 0; n < n_count; ++n) {
        coeff[n] *= static_cast<unsigned long>(m + n);
        coeff[n] /= static_cast<unsigned long>(m);
      }
    }
    BigFloat d_m(precision_bits);
    for (std::size_t n = 0; n < n_count; ++n) {
      if (pv[n] != 0.0) d_m += coeff[n] * BigFloat(pv[n], precision_bits);
    }
    BigFloat term = d_m * power;
    acc += term;
    const long term_exp = term.is_zero() ? std::numeric_limits<long>::min()
                                         : term.exponent2();
    acc_peak_exp = std::max(acc_peak_exp, term_exp);
    const bool negligible =
        term.is_zero() || (acc_peak_exp - term_exp) > target_drop;
    if (negligible && m >= static_cast<long>(n_count)) {
      if (++quiet_run >= 6) return acc.to_double();
    } else {
      quiet_run = 0;
    }
  }
  throw ConvergenceFailureError("phi series did not converge");
}

}  // namespace detail

/// phi~(t) = sum_m d[m] t^m / m!, extended-precision series from the pmf.
inline double eval_phi_tilde_exact(const Pmf &p, double t,
                                   int precision_bits = kDefaultPrecisionBits) {
  return detail::phi_series_exact(p, t, true, precision_bits);
}

/// phi(s) = sum_m d[m] s^m, extended-precision series from the pmf.
/// Requires |s| < 1 (the moments grow polynomially).
inline double eval_phi_exact(const Pmf &p, double s,
                             int precision_bits = kDefaultPrecisionBits) {
  if (std::abs(s) >= 1.0) {
    throw DivergentSeriesError("phi ordinary series requires |s| < 1");
  }
  return detail::phi_series_exact(p, s, false, precision_bits);
}

/// Normal-ordered characteristic function chi_N(zeta) = H~(-|zeta|^2).
inline double chi_normal(const Pmf &p, std::complex<double> zeta) {
  return eval_H_tilde(p, -std::norm(zeta));
}

/// Anti-normal-ordered characteristic function chi_A(zeta) = phi~(-|zeta|^2),
/// computed by the independent moment-series route.
inline double chi_antinormal(const Pmf &p, std::complex<double> zeta,
                             int precision_bits = kDefaultPrecisionBits) {
  return eval_phi_tilde_exact(p, -std::norm(zeta), precision_bits);
}

namespace detail {

inline Pmf laguerre_invert_impl(const std::function<double(double)> &htilde,
                                int m_max, const QuadratureRule &rule,
                                double base_tolerance) {
  const int k = rule.order();
  std::vector<double> probs(m_max + 1, 0.0);
  std::vector<double> comp(m_max + 1, 0.0);  // Kahan compensation
  std::vector<double> lag(m_max + 1);
  double max_mag = 0.0;

  for (int i = 0; i < k; ++i) {
    // Weights below the double range flush to zero at extreme orders; the
    // polynomial integrand carries nothing there, while its factors can
    // overflow and would turn the products into NaNs.
    if (rule.weights[i] == 0.0) continue;
    const double s = rule.nodes[i];
    const double wf = rule.weights[i] * htilde(-s);
    laguerre_eval_batch(m_max, s, lag);
    for (int m = 0; m <= m_max; ++m) {
      const double term = wf * lag[m];
      max_mag = std::max(max_mag, std::abs(term));
      const double y = term - comp[m];
      const double t = probs[m] + y;
      comp[m] = (t - probs[m]) - y;
      probs[m] = t;
    }
  }

  // Round-off scale of the accumulation; entries below -10x of it signal an
  // inconsistent H~ or an inadequate rule order rather than noise.
  const double ulp_scale =
      std::numeric_limits<double>::epsilon() * max_mag * std::max(k, 1);
  const double neg_tol = std::max(10.0 * ulp_scale, 1e-15);
  double sum = 0.0;
  for (int m = 0; m <= m_max; ++m) {
    if (probs[m] < 0.0) {
      if (probs[m] < -neg_tol) {
        throw NotAPmfError("laguerre_invert: entry p[" + std::to_string(m) + "] = " +
                           std::to_string(probs[m]) +
                           " (rule order too small or H~ not a pmf transform)");
      }
      probs[m] = 0.0;
    }
    sum += probs[m];
  }
  if (!(std::abs(sum - 1.0) < 0.25)) {
    throw NotAPmfError("laguerre_invert: mass " + std::to_string(sum) +
                       " is far from 1");
  }
  for (double &v : probs) v /= sum;
  const double tol = std::max(Pmf::kDefaultTailTolerance,
                              base_tolerance + (m_max + 1) * neg_tol);
  return make_pmf(std::move(probs), tol);
}

}  // namespace detail

/// Recovers p[m] = int_0^inf e^{-s} H~(-s) L_m(s) ds for m = 0..m_max by
/// Gauss-Laguerre quadrature. Exact (to round-off) whenever H~ is a
/// polynomial of degree <= 2K-1-m_max, i.e. for finite supports with an
/// adequate rule order. The output is validated and renormalized.
inline Pmf laguerre_invert(const std::function<double(double)> &htilde, int m_max,
                           const QuadratureRule &rule) {
  if (m_max < 0) throw DomainError("laguerre_invert: m_max must be >= 0");
  return detail::laguerre_invert_impl(htilde, m_max, rule, 0.0);
}

}  // namespace bsadd

#endif
