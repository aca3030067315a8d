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

#include "bsadd/beamsplitter.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bsadd/pmf.hpp"
#include "bsadd/transforms.hpp"
#include "test_util.hpp"

namespace bsadd {
namespace {

// Series-product oracle: multiply sum bx[m] (eta t)^m / m! by
// sum by[m] ((1-eta) t)^m / m! as formal series and read off coefficients
// of t^k / k!.
std::vector<double> beamsplit_moments_oracle(const std::vector<double> &bx,
                                             const std::vector<double> &by,
                                             double eta) {
  const std::size_t count = bx.size();
  std::vector<double> cx(count), cy(count);
  double fx = 1.0, fy = 1.0, fact = 1.0;
  for (std::size_t m = 0; m < count; ++m) {
    if (m > 0) {
      fx *= eta;
      fy *= 1.0 - eta;
      fact *= m;
    }
    cx[m] = bx[m] * fx / fact;
    cy[m] = by[m] * fy / fact;
  }
  std::vector<double> out(count, 0.0);
  double kfact = 1.0;
  for (std::size_t k = 0; k < count; ++k) {
    if (k > 0) kfact *= k;
    for (std::size_t m = 0; m <= k; ++m) {
      out[k] += cx[m] * cy[k - m];
    }
    out[k] *= kfact;
  }
  return out;
}

TEST(BeamsplitMoments, HandCases) {
  const double eta = 0.37;
  // delta_1 against delta_0: only the m = k path survives.
  const auto c1 = beamsplit_moments(BinomialMomentSeq({1.0, 1.0}),
                                    BinomialMomentSeq({1.0, 0.0}), Eta(eta));
  EXPECT_DOUBLE_EQ(c1[0], 1.0);
  EXPECT_DOUBLE_EQ(c1[1], eta);

  // Both delta_1: c = [1, 1, 2 eta (1-eta)].
  const auto c2 = beamsplit_moments(BinomialMomentSeq({1.0, 1.0, 0.0}),
                                    BinomialMomentSeq({1.0, 1.0, 0.0}), Eta(eta));
  EXPECT_DOUBLE_EQ(c2[0], 1.0);
  EXPECT_DOUBLE_EQ(c2[1], 1.0);
  EXPECT_NEAR(c2[2], 2.0 * eta * (1.0 - eta), 1e-15);

  // Powers stay powers: geometric in, geometric out.
  std::vector<double> geo(8);
  for (std::size_t m = 0; m < geo.size(); ++m) geo[m] = std::pow(0.8, m);
  const auto cg = beamsplit_moments(BinomialMomentSeq(geo), BinomialMomentSeq(geo),
                                    Eta(0.3));
  for (std::size_t k = 0; k < geo.size(); ++k) {
    EXPECT_NEAR(cg[k], std::pow(0.8, k), 1e-13) << "k " << k;
  }

  EXPECT_THROW(beamsplit_moments(BinomialMomentSeq({1.0, 1.0}),
                                 BinomialMomentSeq({1.0}), Eta(0.5)),
               DomainError);
}

TEST(BeamsplitMoments, MatchesSeriesProductOracle) {
  std::mt19937_64 rng(0xace0fba5eull);
  for (int trial = 0; trial < 80; ++trial) {
    const Pmf x = testing::random_pmf(rng, 12);
    const Pmf y = testing::random_pmf(rng, 12);
    const int m_count = 14;
    const double eta = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto bx = binomial_moments(x, m_count);
    const auto by = binomial_moments(y, m_count);
    const auto lib = beamsplit_moments(bx, by, Eta(eta));
    const auto oracle = beamsplit_moments_oracle(bx.values(), by.values(), eta);
    for (int k = 0; k <= m_count; ++k) {
      EXPECT_NEAR(lib[k], oracle[k], 1e-11 * (1.0 + std::abs(oracle[k])));
    }
    EXPECT_NEAR(lib[1], eta * bx[1] + (1.0 - eta) * by[1], 1e-12);
  }
}

TEST(Eta, RangeIsValidated) {
  EXPECT_NO_THROW(Eta(0.0));
  EXPECT_NO_THROW(Eta(1.0));
  EXPECT_THROW(Eta(-0.01), DomainError);
  EXPECT_THROW(Eta(1.5), DomainError);
}

TEST(BeamsplitAdd, PointMassCases) {
  // delta_0 against delta_0 stays delta_0 for any eta.
  for (double eta : {0.1, 0.5, 0.9}) {
    const Pmf z = beamsplit_add(delta_pmf(0), delta_pmf(0), Eta(eta));
    EXPECT_NEAR(total_variation(z, delta_pmf(0)), 0.0, 1e-13);
  }

  // Two single photons interfere: [2e(1-e), (1-2e)^2, 2e(1-e)].
  const Pmf hom = beamsplit_add(delta_pmf(1), delta_pmf(1), Eta(0.5));
  ASSERT_GE(hom.size(), 3u);
  EXPECT_NEAR(hom[0], 0.5, 1e-12);
  EXPECT_NEAR(hom[1], 0.0, 1e-12);
  EXPECT_NEAR(hom[2], 0.5, 1e-12);

  const double eta = 0.3;
  const Pmf z = beamsplit_add(delta_pmf(1), delta_pmf(1), Eta(eta));
  EXPECT_NEAR(z[0], 2.0 * eta * (1.0 - eta), 1e-12);
  EXPECT_NEAR(z[1], (1.0 - 2.0 * eta) * (1.0 - 2.0 * eta), 1e-12);
  EXPECT_NEAR(z[2], 2.0 * eta * (1.0 - eta), 1e-12);
}

TEST(BeamsplitAdd, EndpointsReturnInputsExactly) {
  std::mt19937_64 rng(0xdead1234ull);
  const Pmf x = testing::random_pmf(rng, 10);
  const Pmf y = testing::random_pmf(rng, 10);
  const Pmf zx = beamsplit_add(x, y, Eta(1.0));
  const Pmf zy = beamsplit_add(x, y, Eta(0.0));
  EXPECT_EQ(zx.probs(), x.probs());
  EXPECT_EQ(zy.probs(), y.probs());
}

TEST(BeamsplitAdd, GeometricClosure) {
  const Pmf gx = geometric_pmf({1.0, 1e-14});
  const Pmf gy = geometric_pmf({1.0, 1e-14});
  for (auto backend :
       {BeamsplitBackend::kQuadrature, BeamsplitBackend::kExactMoments}) {
    BeamsplitConfig cfg;
    cfg.backend = backend;
    const Pmf z = beamsplit_add(gx, gy, Eta(0.3), cfg);
    EXPECT_LT(total_variation(z, geometric_pmf({1.0, 1e-14})), 1e-10);
  }

  // Unequal means: Geom(lx) (+)_eta Geom(ly) = Geom(eta lx + (1-eta) ly).
  const Pmf ga = geometric_pmf({0.5, 1e-14});
  const Pmf gb = geometric_pmf({2.5, 1e-14});
  const Pmf z = beamsplit_add(ga, gb, Eta(0.7));
  const double lz = 0.7 * 0.5 + 0.3 * 2.5;
  EXPECT_LT(total_variation(z, geometric_pmf({lz, 1e-14})), 1e-9);
}

TEST(BeamsplitAdd, MeanLinearityOnRandomInputs) {
  std::mt19937_64 rng(0xbeefcafeull);
  std::uniform_real_distribution<double> eta_dist(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Pmf x = testing::random_pmf(rng, 30);
    const Pmf y = testing::random_pmf(rng, 30);
    const double eta = eta_dist(rng);
    const Pmf z = beamsplit_add(x, y, Eta(eta));
    EXPECT_LT(
        std::abs(mean(z) - eta * mean(x) - (1.0 - eta) * mean(y)), 1e-10);
  }
}

TEST(BeamsplitAdd, OutputIsAlwaysAPmf) {
  std::mt19937_64 rng(0x600dull);
  std::uniform_real_distribution<double> eta_dist(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Pmf x = testing::random_pmf(rng, 25);
    const Pmf y = testing::random_pmf(rng, 25);
    const Pmf z = beamsplit_add(x, y, Eta(eta_dist(rng)));
    double sum = 0.0;
    for (double v : z.probs()) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, z.tail_tolerance());
  }
}

TEST(BeamsplitAdd, SymmetryInEta) {
  std::mt19937_64 rng(0x5ca1ab1eull);
  for (int trial = 0; trial < 50; ++trial) {
    const Pmf x = testing::random_pmf(rng, 20);
    const Pmf y = testing::random_pmf(rng, 20);
    const double eta = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const Pmf a = beamsplit_add(x, y, Eta(eta));
    const Pmf b = beamsplit_add(y, x, Eta(1.0 - eta));
    EXPECT_LT(total_variation(a, b), 1e-12);
  }
}

TEST(BeamsplitAdd, BackendsAgree) {
  std::mt19937_64 rng(0x0123456789ull);
  std::uniform_real_distribution<double> eta_dist(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const Pmf x = testing::random_pmf(rng, 25);
    const Pmf y = testing::random_pmf(rng, 25);
    const Eta eta(eta_dist(rng));
    BeamsplitConfig exact;
    exact.backend = BeamsplitBackend::kExactMoments;
    const Pmf zq = beamsplit_add(x, y, eta);
    const Pmf zm = beamsplit_add(x, y, eta, exact);
    EXPECT_LT(total_variation(zq, zm), 1e-9);
  }
}

TEST(BeamsplitAdd, ContinuousSideProductLaw) {
  // continuous_moments of the combined sequence obeys the scaled product
  // law d_Z[k] = sum_m C(k,m) eta^m (1-eta)^{k-m} dX[m] dY[k-m].
  std::mt19937_64 rng(0x77aa77ull);
  for (int trial = 0; trial < 50; ++trial) {
    const Pmf x = testing::random_pmf(rng, 12);
    const Pmf y = testing::random_pmf(rng, 12);
    const double eta = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const int m_count = 12;
    const auto bx = binomial_moments(x, m_count);
    const auto by = binomial_moments(y, m_count);
    const auto dx = continuous_moments(bx);
    const auto dy = continuous_moments(by);
    const auto dz = continuous_moments(beamsplit_moments(bx, by, Eta(eta)));
    for (int k = 0; k <= m_count; ++k) {
      double expected = 0.0;
      double coeff = 1.0;
      for (int m = 0; m <= k; ++m) {
        if (m > 0) coeff *= static_cast<double>(k - m + 1) / m;
        expected += coeff * std::pow(eta, m) * std::pow(1.0 - eta, k - m) *
                    dx[m] * dy[k - m];
      }
      EXPECT_NEAR(dz[k], expected, 1e-9 * (1.0 + std::abs(expected)));
    }
  }
}

TEST(BeamsplitAdd, WideGeometricSupportsStayAccurate) {
  // Supports of ~123 each put the rule order near 350, where the top-node
  // weights underflow and get skipped.
  const Pmf g = geometric_pmf({4.0, 1e-12});
  ASSERT_GT(g.support_bound(), 100u);
  const Pmf z = beamsplit_add(g, g, Eta(0.4));
  EXPECT_LT(total_variation(z, geometric_pmf({4.0, 1e-12})), 1e-9);

  // The exact backend needs ~M log2(2(1+lambda)) bits here.
  BeamsplitConfig exact;
  exact.backend = BeamsplitBackend::kExactMoments;
  exact.precision_bits = 1024;
  const Pmf z_exact = beamsplit_add(g, g, Eta(0.4), exact);
  EXPECT_LT(total_variation(z, z_exact), 1e-9);
}

TEST(BeamsplitAdd, SupportBeyondQuadratureRangeIsRejected) {
  const Pmf wide = geometric_pmf({4.0, 1e-14});  // support ~144 each
  EXPECT_THROW(beamsplit_add(wide, wide, Eta(0.5)), DomainError);
}

TEST(BeamsplitAdd, RejectsTooSmallMmax) {
  BeamsplitConfig cfg;
  cfg.m_max = 1;
  EXPECT_THROW(beamsplit_add(delta_pmf(2), delta_pmf(2), Eta(0.5), cfg),
               DomainError);
}

}  // namespace
}  // namespace bsadd
