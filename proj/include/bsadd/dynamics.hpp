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

#ifndef BSADD_DYNAMICS_HPP
#define BSADD_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "bsadd/beamsplitter.hpp"
#include "bsadd/errors.hpp"
#include "bsadd/pmf.hpp"

namespace bsadd {

/// A signed sequence of mass-per-unit-eta values; sums to zero by the
/// telescoping structure of the difference operator that produces it.
struct SignedSeq {
  std::vector<double> values;
};

/// Right-hand side of the heat equation along Z_eta = X (+)_eta Geom(l_Y):
///   d p[n] / d eta = (u[n+1] - u[n]),
///   u[n] = (n / eta) (p[n-1] l_Y - p[n] (1 + l_Y)),  u[0] = 0.
/// The returned vector covers states 0..N+1.
inline SignedSeq heat_rhs(const Pmf &p, Eta eta, double lambda_y) {
  if (!(eta.value > 0.0)) {
    throw EtaZeroError("heat_rhs: eta = 0 is a singular point of the 1/eta factor");
  }
  if (!(lambda_y >= 0.0)) throw DomainError("lambda_y must be >= 0");
  const auto &pv = p.probs();
  const std::size_t len = pv.size();
  auto u = [&](std::size_t n) -> double {
    if (n == 0 || n > len) return 0.0;
    const double prev = pv[n - 1];
    const double cur = n < len ? pv[n] : 0.0;
    return (static_cast<double>(n) / eta.value) * (prev * lambda_y - cur * (1.0 + lambda_y));
  };
  SignedSeq rhs;
  rhs.values.resize(len + 1);
  for (std::size_t n = 0; n <= len; ++n) {
    rhs.values[n] = u(n + 1) - u(n);
  }
  return rhs;
}

/// One (eta, state) sample of an evolution trajectory.
struct EvolvePoint {
  double eta;
  Pmf pmf;
};

struct EvolveConfig {
  /// Output sample points; strictly descending, within (0, 1].
  std::vector<double> eta_grid;
  /// Fixed RK4 step in tau = -log(eta). The substitution removes the 1/eta
  /// singularity: the tau-flow has eta-independent coefficients.
  double tau_step = 1e-3;
};

namespace detail {

// dp/dtau = -(v[n+1] - v[n]) with v[n] = n (l_Y p[n-1] - (1+l_Y) p[n]);
// the eta factors of the heat operator cancel against d eta/d tau = -eta.
// `state` is padded so that v vanishes at the working boundary and mass is
// conserved exactly by telescoping.
inline void heat_tau_deriv(const std::vector<double> &state, double lambda_y,
                           std::vector<double> &out) {
  const std::size_t len = state.size();
  out.assign(len, 0.0);
  auto v = [&](std::size_t n) -> double {
    if (n == 0 || n > len) return 0.0;
    const double prev = state[n - 1];
    const double cur = n < len ? state[n] : 0.0;
    return static_cast<double>(n) * (lambda_y * prev - (1.0 + lambda_y) * cur);
  };
  for (std::size_t n = 0; n < len; ++n) {
    out[n] = v(n) - v(n + 1);
  }
}

}  // namespace detail

/// Integrates the heat flow from eta = 1 (state X) down through the grid.
/// Each grid point yields a renormalized Pmf; the trajectory at eta matches
/// beamsplit_add(X, Geom(lambda_y), eta) up to integrator tolerance.
inline std::vector<EvolvePoint> evolve_heat(const Pmf &x, double lambda_y,
                                            const EvolveConfig &cfg) {
  if (!(lambda_y >= 0.0)) throw DomainError("lambda_y must be >= 0");
  if (cfg.eta_grid.empty()) throw DomainError("eta grid is empty");
  if (!(cfg.tau_step > 0.0)) throw DomainError("tau_step must be > 0");
  for (std::size_t i = 0; i < cfg.eta_grid.size(); ++i) {
    const double g = cfg.eta_grid[i];
    if (!(g > 0.0 && g <= 1.0)) {
      throw DomainError("eta grid value " + std::to_string(g) + " outside (0, 1]");
    }
    if (i > 0 && !(g < cfg.eta_grid[i - 1])) {
      throw DomainError("eta grid must be strictly descending");
    }
  }

  std::vector<double> state = x.probs();
  double tau = 0.0;
  std::vector<EvolvePoint> trajectory;
  trajectory.reserve(cfg.eta_grid.size());
  std::vector<double> k1, k2, k3, k4, tmp;

  // Entries at the scale of the input's own truncation are not trustworthy;
  // transient undershoot there is drift, not a bug.
  const double drift_floor = std::max(1e-12, 100.0 * x.tail_tolerance());

  auto clamp_and_check = [&](double eta_now) {
    double sum = 0.0;
    for (double &v : state) {
      if (v < 0.0) {
        if (v < -drift_floor) {
          throw StepFailureError("trajectory entry " + std::to_string(v) +
                                     " left [0, 1] at eta " + std::to_string(eta_now),
                                 eta_now);
        }
        v = 0.0;
      } else if (v > 1.0 + drift_floor) {
        throw StepFailureError("trajectory entry " + std::to_string(v) +
                                   " left [0, 1] at eta " + std::to_string(eta_now),
                               eta_now);
      }
      sum += v;
    }
    for (double &v : state) v /= sum;
  };

  // Mass far below every tolerance only extends the active length, and the
  // operator's spectral radius grows with it; trimming keeps the explicit
  // step inside the RK4 stability region.
  constexpr double kTrimFloor = 1e-90;

  for (double eta_target : cfg.eta_grid) {
    const double tau_target = -std::log(eta_target);
    while (tau < tau_target - 1e-15) {
      // Stability bound: the stiffest mode scales like n (1 + l_Y).
      const double h_stable =
          0.45 / ((1.0 + lambda_y) * (static_cast<double>(state.size()) + 6.0));
      const double h = std::min({cfg.tau_step, h_stable, tau_target - tau});
      // Mass can spread by one state per derivative evaluation.
      state.resize(state.size() + 5, 0.0);
      const std::size_t len = state.size();
      detail::heat_tau_deriv(state, lambda_y, k1);
      tmp.assign(len, 0.0);
      for (std::size_t i = 0; i < len; ++i) tmp[i] = state[i] + 0.5 * h * k1[i];
      detail::heat_tau_deriv(tmp, lambda_y, k2);
      for (std::size_t i = 0; i < len; ++i) tmp[i] = state[i] + 0.5 * h * k2[i];
      detail::heat_tau_deriv(tmp, lambda_y, k3);
      for (std::size_t i = 0; i < len; ++i) tmp[i] = state[i] + h * k3[i];
      detail::heat_tau_deriv(tmp, lambda_y, k4);
      for (std::size_t i = 0; i < len; ++i) {
        state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
      while (state.size() > 1 && std::abs(state.back()) < kTrimFloor) {
        state.pop_back();
      }
      tau += h;
      clamp_and_check(std::exp(-tau));
    }
    std::vector<double> snapshot = state;
    const double tol = std::max(1e-9, x.tail_tolerance());
    trajectory.push_back(EvolvePoint{eta_target, make_pmf(std::move(snapshot), tol)});
  }
  return trajectory;
}

/// The size-biased tilts p+[n] = (n+1) p[n+1] / lambda and
/// p-[n] = (n+1) p[n] / (1 + lambda); both are pmfs, equal exactly when p
/// is geometric.
struct TiltedPair {
  Pmf plus;
  Pmf minus;
};

inline TiltedPair tilted_pair(const Pmf &p) {
  const double lambda = mean(p);
  if (!(lambda > 0.0)) {
    throw ZeroMeanError("tilted_pair: p+ requires mean > 0");
  }
  const auto &pv = p.probs();
  const std::size_t len = pv.size();

  std::vector<double> plus(len > 1 ? len - 1 : 1, 0.0);
  double plus_sum = 0.0;
  for (std::size_t n = 0; n + 1 < len; ++n) {
    plus[n] = (n + 1.0) * pv[n + 1] / lambda;
    plus_sum += plus[n];
  }
  std::vector<double> minus(len, 0.0);
  double minus_sum = 0.0;
  for (std::size_t n = 0; n < len; ++n) {
    minus[n] = (n + 1.0) * pv[n] / (1.0 + lambda);
    minus_sum += minus[n];
  }
  const double tol_plus =
      std::max(Pmf::kDefaultTailTolerance, 2.0 * std::abs(1.0 - plus_sum));
  const double tol_minus =
      std::max(Pmf::kDefaultTailTolerance, 2.0 * std::abs(1.0 - minus_sum));
  return TiltedPair{make_pmf(std::move(plus), tol_plus),
                    make_pmf(std::move(minus), tol_minus)};
}

namespace detail {

// Tilts of truncated-tail inputs charge a top state that the opposite tilt
// cannot; mass below this threshold is a truncation artifact, mass above
// it makes the divergence genuinely infinite.
inline double tilt_excess_tolerance(const Pmf &p) {
  return std::max(1e-9, 20.0 * (p.support_bound() + 2.0) * p.tail_tolerance());
}

}  // namespace detail

/// RHS of the de Bruijn identity at state p sitting at parameter eta of a
/// Geom(lambda_y) flow:
///   (l_Y (1+l)/eta) D(p- || p+) + ((1+l_Y) l/eta) D(p+ || p-),  l = mean(p).
/// +inf when a tilt charges states beyond truncation tolerance (finite
/// supports), matching the divergence of the derivative there.
inline double debruijn_rhs(const Pmf &p, Eta eta, double lambda_y) {
  if (!(eta.value > 0.0)) throw EtaZeroError("debruijn_rhs: eta must be > 0");
  if (!(lambda_y >= 0.0)) throw DomainError("lambda_y must be >= 0");
  const double lambda = mean(p);
  const TiltedPair tilt = tilted_pair(p);
  const double excess = detail::tilt_excess_tolerance(p);
  const double d_mp = relative_entropy_trunc(tilt.minus, tilt.plus, excess);
  const double d_pm = relative_entropy_trunc(tilt.plus, tilt.minus, excess);
  return lambda_y * (1.0 + lambda) / eta.value * d_mp +
         (1.0 + lambda_y) * lambda / eta.value * d_pm;
}

/// Central-difference oracle for the de Bruijn LHS:
///   (D(Z_{eta+h} || G_{eta+h}) - D(Z_{eta-h} || G_{eta-h})) / (2h),
/// with Z by beamsplit_add against Geom(lambda_y) and G_eta the geometric
/// with the matched mean eta*mean(X) + (1-eta)*lambda_y (analytic tail).
inline double debruijn_lhs_numeric(const Pmf &x, double lambda_y, Eta eta, double h) {
  if (!(h > 0.0)) throw DomainError("h must be > 0");
  if (!(eta.value - h > 0.0 && eta.value + h <= 1.0)) {
    throw DomainError("[eta-h, eta+h] must lie within (0, 1]");
  }
  const Pmf y = geometric_pmf({lambda_y, 1e-14});
  const double lx = mean(x);
  auto d_at = [&](double e) {
    const Pmf z = beamsplit_add(x, y, Eta(e));
    const Pmf g = geometric_pmf({e * lx + (1.0 - e) * lambda_y, 1e-14});
    return relative_entropy(z, g);
  };
  return (d_at(eta.value + h) - d_at(eta.value - h)) / (2.0 * h);
}

/// Score of p against the geometric with its own mean, and the two
/// Fisher-type functionals built from it. rho vanishes exactly on
/// geometrics. Off-support entries of rho are undefined (NaN) and excluded
/// from the sums; holes in the support make J- infinite.
struct ScoreProfile {
  std::vector<double> rho;
  double j_plus = 0.0;
  double j_minus = 0.0;
};

inline ScoreProfile score(const Pmf &p) {
  const double lambda = mean(p);
  if (!(lambda > 0.0)) throw ZeroMeanError("score: requires mean > 0");
  const auto &pv = p.probs();
  ScoreProfile out;
  out.rho.assign(pv.size(), std::numeric_limits<double>::quiet_NaN());
  out.rho[0] = 0.0;
  const double ratio = lambda / (1.0 + lambda);
  for (std::size_t n = 1; n < pv.size(); ++n) {
    if (pv[n] <= 0.0) continue;
    const double dn = static_cast<double>(n);
    const double rho =
        pv[n - 1] > 0.0 ? dn * pv[n - 1] * ratio / pv[n] - dn : -dn;
    out.rho[n] = rho;
    if (rho == 0.0) continue;
    out.j_plus += pv[n] / dn * rho * rho;
    const double denom = dn + rho;
    if (denom > 0.0) {
      out.j_minus += pv[n] / denom * rho * rho;
    } else {
      out.j_minus = std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

/// Both geometric log-Sobolev bounds on D(X || Geom(mean X)):
/// the entropic form l(1+l)[D(p-||p+) + D(p+||p-)] and the quadratic form
/// (1+l)[J+ + J-]. Infinite right-hand sides hold trivially.
struct LogSobolevReport {
  double lhs = 0.0;
  double rhs_entropic = 0.0;
  double rhs_quadratic = 0.0;
  bool entropic_holds = false;
  bool quadratic_holds = false;
  double tolerance = 1e-10;
};

inline LogSobolevReport check_log_sobolev(const Pmf &p) {
  const double lambda = mean(p);
  if (!(lambda > 0.0)) throw ZeroMeanError("check_log_sobolev: requires mean > 0");
  LogSobolevReport report;
  const Pmf g = geometric_pmf({lambda, 1e-14});
  report.lhs = relative_entropy(p, g);

  const TiltedPair tilt = tilted_pair(p);
  const double excess = detail::tilt_excess_tolerance(p);
  report.rhs_entropic =
      lambda * (1.0 + lambda) *
      (relative_entropy_trunc(tilt.minus, tilt.plus, excess) +
       relative_entropy_trunc(tilt.plus, tilt.minus, excess));

  const ScoreProfile sc = score(p);
  report.rhs_quadratic = (1.0 + lambda) * (sc.j_plus + sc.j_minus);

  report.entropic_holds = report.lhs <= report.rhs_entropic + report.tolerance;
  report.quadratic_holds = report.lhs <= report.rhs_quadratic + report.tolerance;
  return report;
}

}  // namespace bsadd

#endif
