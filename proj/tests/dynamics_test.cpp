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

#include "bsadd/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "bsadd/beamsplitter.hpp"
#include "bsadd/pmf.hpp"
#include "test_util.hpp"

namespace bsadd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Central difference of the channel output in eta, one component at a time.
std::vector<double> channel_derivative_oracle(const Pmf &x, double lambda_y,
                                              double eta, double h) {
  const Pmf y = geometric_pmf({lambda_y, 1e-14});
  const Pmf hi = beamsplit_add(x, y, Eta(eta + h));
  const Pmf lo = beamsplit_add(x, y, Eta(eta - h));
  const std::size_t len = std::max(hi.size(), lo.size()) + 1;
  std::vector<double> out(len, 0.0);
  for (std::size_t n = 0; n < len; ++n) {
    out[n] = (hi[n] - lo[n]) / (2.0 * h);
  }
  return out;
}

TEST(HeatRhs, HandValueAtDelta1) {
  const SignedSeq rhs = heat_rhs(delta_pmf(1), Eta(0.5), 1.0);
  ASSERT_EQ(rhs.values.size(), 3u);
  EXPECT_DOUBLE_EQ(rhs.values[0], -4.0);
  EXPECT_DOUBLE_EQ(rhs.values[1], 8.0);
  EXPECT_DOUBLE_EQ(rhs.values[2], -4.0);
}

TEST(HeatRhs, GeometricIsStationary) {
  const Pmf g = geometric_pmf({1.5, 1e-13});
  for (double eta : {0.3, 0.5, 0.8}) {
    const SignedSeq rhs = heat_rhs(g, Eta(eta), 1.5);
    // Zero except for the truncation artifact at the top states.
    const double tol = 100.0 * g.size() * g.tail_tolerance() / eta;
    for (double v : rhs.values) EXPECT_LT(std::abs(v), tol);
  }
}

TEST(HeatRhs, TelescopesToZeroMass) {
  std::mt19937_64 rng(0x8899aabbull);
  for (int trial = 0; trial < 100; ++trial) {
    const Pmf p = testing::random_pmf(rng, 30);
    const SignedSeq rhs = heat_rhs(p, Eta(0.4), 0.7);
    double sum = 0.0, scale = 1.0;
    for (double v : rhs.values) {
      sum += v;
      scale = std::max(scale, std::abs(v));
    }
    EXPECT_LT(std::abs(sum), 1e-12 * scale);
  }
}

TEST(HeatRhs, MatchesChannelDerivative) {
  // d/d eta of beamsplit_add(X, Geom(l), eta) against the operator, with
  // O(h^2) decay of the residual under h -> h/2.
  const std::vector<Pmf> inputs = {delta_pmf(1),
                                   make_pmf({0.2, 0.2, 0.2, 0.2, 0.2}),
                                   geometric_pmf({2.0, 1e-12})};
  for (const Pmf &x : inputs) {
    for (double eta : {0.3, 0.5, 0.8}) {
      for (double lambda_y : {0.5, 1.0, 2.0}) {
        const Pmf y = geometric_pmf({lambda_y, 1e-14});
        const Pmf z = beamsplit_add(x, y, Eta(eta));
        const SignedSeq rhs = heat_rhs(z, Eta(eta), lambda_y);

        auto max_residual = [&](double h) {
          const auto diff = channel_derivative_oracle(x, lambda_y, eta, h);
          double worst = 0.0;
          for (std::size_t n = 0; n < diff.size(); ++n) {
            const double r = n < rhs.values.size() ? rhs.values[n] : 0.0;
            worst = std::max(worst, std::abs(diff[n] - r));
          }
          return worst;
        };

        const double res_h = max_residual(1e-4);
        EXPECT_LT(res_h, 1e-6) << "eta " << eta << " ly " << lambda_y;
        const double res_h2 = max_residual(5e-5);
        EXPECT_LT(res_h2, 0.3 * res_h + 1e-11);
      }
    }
  }
}

TEST(HeatRhs, MatchesChannelDerivativeOnRandomInputs) {
  std::mt19937_64 rng(0x600df00dull);
  for (int trial = 0; trial < 5; ++trial) {
    const Pmf x = testing::random_pmf(rng, 20, /*allow_sparse=*/false);
    for (double eta : {0.3, 0.8}) {
      const double lambda_y = 1.0;
      const Pmf y = geometric_pmf({lambda_y, 1e-14});
      const Pmf z = beamsplit_add(x, y, Eta(eta));
      const SignedSeq rhs = heat_rhs(z, Eta(eta), lambda_y);
      const auto diff = channel_derivative_oracle(x, lambda_y, eta, 1e-4);
      double worst = 0.0;
      for (std::size_t n = 0; n < diff.size(); ++n) {
        const double r = n < rhs.values.size() ? rhs.values[n] : 0.0;
        worst = std::max(worst, std::abs(diff[n] - r));
      }
      EXPECT_LT(worst, 1e-6) << "trial " << trial << " eta " << eta;
    }
  }
}

TEST(HeatRhs, EtaZeroIsSingular) {
  EXPECT_THROW(heat_rhs(delta_pmf(1), Eta(0.0), 1.0), EtaZeroError);
}

TEST(EvolveHeat, InitialConditionAndStationarity) {
  const Pmf g = geometric_pmf({1.0, 1e-12});
  EvolveConfig cfg;
  cfg.eta_grid = {1.0, 0.8, 0.6, 0.4};
  const auto trajectory = evolve_heat(g, 1.0, cfg);
  ASSERT_EQ(trajectory.size(), 4u);
  EXPECT_DOUBLE_EQ(trajectory[0].eta, 1.0);
  EXPECT_LT(total_variation(trajectory[0].pmf, g), 1e-12);
  for (const auto &point : trajectory) {
    EXPECT_LT(total_variation(point.pmf, g), 1e-8) << "eta " << point.eta;
  }
}

TEST(EvolveHeat, MatchesChannelAtHalf) {
  EvolveConfig cfg;
  cfg.eta_grid = {0.5};
  const auto trajectory = evolve_heat(delta_pmf(1), 1.0, cfg);
  const Pmf z =
      beamsplit_add(delta_pmf(1), geometric_pmf({1.0, 1e-14}), Eta(0.5));
  EXPECT_LT(total_variation(trajectory[0].pmf, z), 1e-6);
}

TEST(EvolveHeat, ValidatesGrid) {
  EvolveConfig cfg;
  cfg.eta_grid = {0.5, 0.6};
  EXPECT_THROW(evolve_heat(delta_pmf(0), 1.0, cfg), DomainError);
  cfg.eta_grid = {1.0, 0.0};
  EXPECT_THROW(evolve_heat(delta_pmf(0), 1.0, cfg), DomainError);
  cfg.eta_grid = {};
  EXPECT_THROW(evolve_heat(delta_pmf(0), 1.0, cfg), DomainError);
}

TEST(TiltedPair, GeometricTiltsCoincide) {
  const Pmf g = geometric_pmf({1.0, 1e-13});
  const TiltedPair tilt = tilted_pair(g);
  // Both equal the negative binomial (n+1) 2^{-(n+2)}.
  for (std::size_t n = 0; n + 1 < g.size(); ++n) {
    const double expected = (n + 1.0) * std::pow(2.0, -(static_cast<double>(n) + 2.0));
    EXPECT_NEAR(tilt.plus[n], expected, 1e-12);
    EXPECT_NEAR(tilt.minus[n], expected, 1e-12);
  }
}

TEST(TiltedPair, Delta1AndNormalization) {
  const TiltedPair tilt = tilted_pair(delta_pmf(1));
  EXPECT_LT(total_variation(tilt.plus, delta_pmf(0)), 1e-15);
  EXPECT_LT(total_variation(tilt.minus, delta_pmf(1)), 1e-15);

  std::mt19937_64 rng(0x13571357ull);
  for (int trial = 0; trial < 100; ++trial) {
    const Pmf p = testing::random_pmf(rng, 30);
    if (mean(p) <= 0.0) continue;
    const TiltedPair t = tilted_pair(p);
    double sum_plus = 0.0, sum_minus = 0.0;
    for (double v : t.plus.probs()) sum_plus += v;
    for (double v : t.minus.probs()) sum_minus += v;
    EXPECT_NEAR(sum_plus, 1.0, 1e-12);
    EXPECT_NEAR(sum_minus, 1.0, 1e-12);
  }

  EXPECT_THROW(tilted_pair(delta_pmf(0)), ZeroMeanError);
}

TEST(DebruijnRhs, GeometricGivesZero) {
  for (double lambda : {0.5, 1.0, 3.0}) {
    const Pmf g = geometric_pmf({lambda, 1e-14});
    const double rhs = debruijn_rhs(g, Eta(0.6), lambda);
    EXPECT_NEAR(rhs, 0.0, 1e-10) << "lambda " << lambda;
  }
}

TEST(DebruijnRhs, FiniteSupportIsInfinite) {
  // p- charges the top state, p+ cannot: the slope genuinely diverges.
  EXPECT_EQ(debruijn_rhs(delta_pmf(1), Eta(0.5), 1.0), kInf);
}

TEST(DebruijnLhsNumeric, GeometricFlowIsFlat) {
  const Pmf g = geometric_pmf({1.0, 1e-14});
  EXPECT_NEAR(debruijn_lhs_numeric(g, 1.0, Eta(0.5), 1e-4), 0.0, 1e-9);
}

TEST(DebruijnIdentity, MixtureMatchesFiniteDifference) {
  // Equal mixture of Geom(0.5) and Geom(4); lhs via the channel, rhs via
  // the tilted divergences at Z_eta.
  const Pmf a = geometric_pmf({0.5, 1e-13});
  const Pmf b = geometric_pmf({4.0, 1e-13});
  std::vector<double> mix(std::max(a.size(), b.size()), 0.0);
  for (std::size_t n = 0; n < mix.size(); ++n) mix[n] = 0.5 * (a[n] + b[n]);
  const Pmf x = make_pmf(std::move(mix), 1e-12);

  const double lambda_y = 1.0;
  const Eta eta(0.5);
  const Pmf z = beamsplit_add(x, geometric_pmf({lambda_y, 1e-14}), eta);
  const double rhs = debruijn_rhs(z, eta, lambda_y);
  ASSERT_TRUE(std::isfinite(rhs));
  EXPECT_GT(rhs, 0.0);

  const double lhs_h = debruijn_lhs_numeric(x, lambda_y, eta, 1e-4);
  EXPECT_NEAR(lhs_h / rhs, 1.0, 1e-5);

  // Central differences decay like O(h^2); checked at steps large enough
  // that the h^2 term dominates the divergence-evaluation noise (~1e-13
  // divided by 2h).
  const double coarse = debruijn_lhs_numeric(x, lambda_y, eta, 1e-3);
  const double fine = debruijn_lhs_numeric(x, lambda_y, eta, 5e-4);
  EXPECT_LT(std::abs(fine - rhs), 0.3 * std::abs(coarse - rhs) + 2e-9);
}

TEST(Score, GeometricScoreVanishes) {
  const Pmf g = geometric_pmf({0.8, 1e-13});
  const ScoreProfile sc = score(g);
  EXPECT_DOUBLE_EQ(sc.rho[0], 0.0);
  for (std::size_t n = 1; n < g.size(); ++n) {
    EXPECT_NEAR(sc.rho[n], 0.0, 1e-10) << "n " << n;
  }
  EXPECT_NEAR(sc.j_plus, 0.0, 1e-18);
  EXPECT_NEAR(sc.j_minus, 0.0, 1e-18);
}

TEST(Score, Delta1Conventions) {
  const ScoreProfile sc = score(delta_pmf(1));
  ASSERT_EQ(sc.rho.size(), 2u);
  EXPECT_DOUBLE_EQ(sc.rho[0], 0.0);
  EXPECT_DOUBLE_EQ(sc.rho[1], -1.0);
  EXPECT_DOUBLE_EQ(sc.j_plus, 1.0);
  EXPECT_EQ(sc.j_minus, kInf);
  EXPECT_THROW(score(delta_pmf(0)), ZeroMeanError);
}

TEST(Score, NonGeometricInputsHavePositiveFisherInfo) {
  // rho vanishes only on the geometric family.
  std::mt19937_64 rng(0x77665544ull);
  for (int trial = 0; trial < 50; ++trial) {
    const Pmf p = testing::random_geometric_mixture(rng, 1e-12, 2);
    if (total_variation(p, geometric_pmf({mean(p), 1e-12})) < 1e-6) continue;
    const ScoreProfile sc = score(p);
    EXPECT_GT(sc.j_plus, 1e-12) << "trial " << trial;
  }
}

TEST(Score, CenteringOnRandomInputs) {
  // sum_n p[n] rho[n] = 0, with the products at states where p[n] = 0 taken
  // as their limits n p[n-1] lambda/(1+lambda); the top of any finite
  // support contributes one such term.
  std::mt19937_64 rng(0xc0ffee00ull);
  for (int trial = 0; trial < 100; ++trial) {
    const Pmf p = testing::random_pmf(rng, 30);
    const double lambda = mean(p);
    if (lambda <= 0.0) continue;
    const ScoreProfile sc = score(p);
    const double ratio = lambda / (1.0 + lambda);
    double centered = 0.0;
    for (std::size_t n = 1; n <= p.size(); ++n) {
      if (n < p.size() && p[n] > 0.0) {
        centered += p[n] * sc.rho[n];
      } else {
        centered += static_cast<double>(n) * p[n - 1] * ratio;
      }
    }
    EXPECT_LT(std::abs(centered), 1e-10);
  }
}

TEST(LogSobolev, GeometricIsEquality) {
  const Pmf g = geometric_pmf({1.0, 1e-14});
  const LogSobolevReport report = check_log_sobolev(g);
  EXPECT_NEAR(report.lhs, 0.0, 1e-10);
  EXPECT_NEAR(report.rhs_entropic, 0.0, 1e-10);
  EXPECT_NEAR(report.rhs_quadratic, 0.0, 1e-10);
  EXPECT_TRUE(report.entropic_holds);
  EXPECT_TRUE(report.quadratic_holds);
}

TEST(LogSobolev, Delta1HasInfiniteBounds) {
  const LogSobolevReport report = check_log_sobolev(delta_pmf(1));
  EXPECT_NEAR(report.lhs, std::log(4.0), 1e-12);
  EXPECT_EQ(report.rhs_entropic, kInf);
  EXPECT_EQ(report.rhs_quadratic, kInf);
  EXPECT_TRUE(report.entropic_holds);
  EXPECT_TRUE(report.quadratic_holds);
}

TEST(LogSobolev, HoldsOnRandomMixtures) {
  std::mt19937_64 rng(0xabcdabcdull);
  for (int trial = 0; trial < 300; ++trial) {
    const Pmf p = testing::random_geometric_mixture(rng);
    const LogSobolevReport report = check_log_sobolev(p);
    EXPECT_TRUE(report.entropic_holds) << "trial " << trial;
    EXPECT_TRUE(report.quadratic_holds) << "trial " << trial;
  }
}

TEST(EntropyConcavity, HoldsOnRandomPairs) {
  // H(X (+)_eta Y) >= eta H(X) + (1-eta) H(Y), checked empirically.
  std::mt19937_64 rng(0xfaceb00cull);
  std::uniform_real_distribution<double> eta_dist(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Pmf x = testing::random_pmf(rng, 20);
    const Pmf y = testing::random_pmf(rng, 20);
    const double eta = eta_dist(rng);
    const Pmf z = beamsplit_add(x, y, Eta(eta));
    EXPECT_GE(entropy(z), eta * entropy(x) + (1.0 - eta) * entropy(y) - 1e-9);
  }
}

}  // namespace
}  // namespace bsadd
