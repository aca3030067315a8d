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

#ifndef BSADD_DETAIL_BIGFLOAT_HPP
#define BSADD_DETAIL_BIGFLOAT_HPP

#include <gmp.h>
#include <mpfr.h>

#include <utility>

namespace bsadd::detail {

/// Thin RAII value type over an mpfr_t with a fixed per-value precision
/// in bits. Only the operations the moment pipelines need.
class BigFloat {
 public:
  explicit BigFloat(int precision_bits) {
    mpfr_init2(v_, precision_bits);
    mpfr_set_zero(v_, 1);
  }
  BigFloat(double x, int precision_bits) {
    mpfr_init2(v_, precision_bits);
    mpfr_set_d(v_, x, MPFR_RNDN);
  }
  BigFloat(const BigFloat &other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat &&other) noexcept {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_swap(v_, other.v_);
  }
  BigFloat &operator=(const BigFloat &other) {
    if (this != &other) mpfr_set(v_, other.v_, MPFR_RNDN);
    return *this;
  }
  BigFloat &operator=(BigFloat &&other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  int precision() const { return static_cast<int>(mpfr_get_prec(v_)); }

  BigFloat &operator+=(const BigFloat &o) {
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  BigFloat &operator-=(const BigFloat &o) {
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  BigFloat &operator*=(const BigFloat &o) {
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  BigFloat &operator/=(const BigFloat &o) {
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  BigFloat &operator*=(double d) {
    mpfr_mul_d(v_, v_, d, MPFR_RNDN);
    return *this;
  }
  BigFloat &operator*=(unsigned long u) {
    mpfr_mul_ui(v_, v_, u, MPFR_RNDN);
    return *this;
  }
  BigFloat &operator/=(unsigned long u) {
    mpfr_div_ui(v_, v_, u, MPFR_RNDN);
    return *this;
  }

  friend BigFloat operator+(BigFloat a, const BigFloat &b) { return a += b; }
  friend BigFloat operator-(BigFloat a, const BigFloat &b) { return a -= b; }
  friend BigFloat operator*(BigFloat a, const BigFloat &b) { return a *= b; }
  friend BigFloat operator/(BigFloat a, const BigFloat &b) { return a /= b; }

  /// this += C(n, k) * x, with the binomial taken exactly.
  void add_binomial_times(unsigned long n, unsigned long k, const BigFloat &x) {
    mpz_t bin;
    mpz_init(bin);
    mpz_bin_uiui(bin, n, k);
    BigFloat term(precision());
    mpfr_mul_z(term.v_, x.v_, bin, MPFR_RNDN);
    mpz_clear(bin);
    *this += term;
  }

  void negate() { mpfr_neg(v_, v_, MPFR_RNDN); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  /// Base-2 exponent of the magnitude (0 for zero values); tracks the scale
  /// of partial terms for cancellation estimates.
  long exponent2() const { return is_zero() ? 0 : mpfr_get_exp(v_); }

  static BigFloat abs(const BigFloat &x) {
    BigFloat r(x.precision());
    mpfr_abs(r.v_, x.v_, MPFR_RNDN);
    return r;
  }

  static BigFloat exact_binomial(unsigned long n, unsigned long k, int precision_bits) {
    mpz_t bin;
    mpz_init(bin);
    mpz_bin_uiui(bin, n, k);
    BigFloat r(precision_bits);
    mpfr_set_z(r.v_, bin, MPFR_RNDN);
    mpz_clear(bin);
    return r;
  }

  friend bool operator<(const BigFloat &a, const BigFloat &b) {
    return mpfr_cmp(a.v_, b.v_) < 0;
  }

 private:
  mpfr_t v_;
};

}  // namespace bsadd::detail

#endif
