/*
 * Copyright 2026 The vsmhl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "vsmhl/model.hpp"

using namespace vsmhl;

namespace {

bool contains(const std::vector<std::string> &v, const std::string &needle) {
  return std::any_of(v.begin(), v.end(),
                     [&](const std::string &s) { return s.find(needle) != std::string::npos; });
}

struct SampleStats {
  double mean;
  double se;
};

SampleStats stats(const std::vector<double> &x, int power) {
  const double n = static_cast<double>(x.size());
  double s = 0.0;
  double s2 = 0.0;
  for (double v : x) {
    const double p = power == 1 ? v : v * v;
    s += p;
    s2 += p * p;
  }
  const double m = s / n;
  return {m, std::sqrt((s2 / n - m * m) / n)};
}

} // namespace

TEST(Moments, PointMass) {
  const auto m = moments(PointMass{1.0});
  EXPECT_EQ(m.m1, 1.0);
  EXPECT_EQ(m.m2, 1.0);
}

TEST(Moments, GammaMatchesClosedFormAndQuadrature) {
  const auto m = moments(GammaLaw{2.0, 0.5});
  EXPECT_NEAR(m.m1, 1.0, 1e-15);
  EXPECT_NEAR(m.m2, 1.5, 1e-15);
  auto pdf = [](double x) { return oracle::gamma_pdf(2.0, 0.5, x); };
  const double q1 = oracle::simpson([&](double x) { return x * pdf(x); }, 0.0, 60.0, 60000);
  const double q2 = oracle::simpson([&](double x) { return x * x * pdf(x); }, 0.0, 60.0, 60000);
  EXPECT_NEAR(m.m1, q1, 1e-10);
  EXPECT_NEAR(m.m2, q2, 1e-10);
}

TEST(Moments, UniformMatchesClosedFormAndQuadrature) {
  const auto m = moments(UniformLaw{0.0, 2.0});
  EXPECT_NEAR(m.m1, 1.0, 1e-15);
  EXPECT_NEAR(m.m2, 4.0 / 3.0, 1e-15);
  const double q2 = oracle::simpson([](double x) { return 0.5 * x * x; }, 0.0, 2.0, 100);
  EXPECT_NEAR(m.m2, q2, 1e-13);
}

TEST(Moments, Atoms) {
  const auto m = moments(DiscreteAtoms{{{1.0, 0.25}, {3.0, 0.75}}});
  EXPECT_NEAR(m.m1, 2.5, 1e-15);
  EXPECT_NEAR(m.m2, 0.25 + 6.75, 1e-15);
}

TEST(Moments, RejectsInvalidLawNamingInvariant) {
  try {
    moments(GammaLaw{-1.0, 1.0});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError &e) {
    EXPECT_TRUE(contains(e.violations(), "gamma shape must be positive"));
  }
  EXPECT_THROW(moments(PointMass{-1.0}), ValidationError);
  EXPECT_THROW(moments(PointMass{0.0}), ValidationError);
  EXPECT_THROW(moments(UniformLaw{2.0, 1.0}), ValidationError);
  EXPECT_THROW(moments(DiscreteAtoms{{{1.0, 0.5}, {2.0, 0.4}}}), ValidationError);
}

TEST(Validate, AcceptsGoodConfiguration) {
  EXPECT_TRUE(validate({2.0, 10, 1.0}, PointMass{1.0}).empty());
}

TEST(Validate, EtaBoundary) {
  const auto v = validate({1.0, 10, 1.0}, PointMass{1.0});
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "eta must exceed 1");
}

TEST(Validate, ZeroMean) {
  const auto v = validate({2.0, 10, 1.0}, PointMass{0.0});
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "m_lambda must be positive");
}

TEST(Validate, ReportsEveryViolation) {
  const auto v = validate({0.5, 0, -1.0}, UniformLaw{-1.0, -2.0});
  EXPECT_TRUE(contains(v, "eta must exceed 1"));
  EXPECT_TRUE(contains(v, "n_particles must be at least 1"));
  EXPECT_TRUE(contains(v, "horizon must be positive"));
  EXPECT_TRUE(contains(v, "support must lie in [0, inf)"));
  EXPECT_TRUE(contains(v, "uniform bounds must satisfy a < b"));
}

TEST(Validate, AtomWeightTolerance) {
  const double w = 1.0 / 3.0;
  EXPECT_TRUE(law_violations(DiscreteAtoms{{{1.0, w}, {2.0, w}, {3.0, w}}}).empty());
  EXPECT_TRUE(contains(law_violations(DiscreteAtoms{{{1.0, 0.5}, {2.0, 0.5 + 1e-10}}}),
                       "atom weights must sum to 1"));
  EXPECT_TRUE(contains(law_violations(DiscreteAtoms{{{-1.0, 0.5}, {2.0, 0.5}}}),
                       "support must lie in [0, inf)"));
  EXPECT_TRUE(contains(law_violations(DiscreteAtoms{}), "at least one atom"));
}

// validate accepts iff every typed invariant holds.
TEST(Validate, AcceptsIffInvariantsHold) {
  Rng rng(99);
  std::uniform_real_distribution<double> u(-2.0, 4.0);
  for (int i = 0; i < 500; ++i) {
    const double eta = u(rng);
    const double horizon = u(rng);
    const double a = u(rng);
    const double b = u(rng);
    const bool ok = eta > 1.0 && horizon > 0.0 && a >= 0.0 && b > a;
    EXPECT_EQ(validate({eta, 3, horizon}, UniformLaw{a, b}).empty(), ok);
  }
}

TEST(SampleInitial, PointMass) {
  Rng rng(1);
  EXPECT_EQ(sample_initial(PointMass{2.0}, 3, rng), (std::vector<double>{2.0, 2.0, 2.0}));
}

TEST(SampleInitial, GammaMeanLln) {
  Rng rng(2);
  const auto x = sample_initial(GammaLaw{2.0, 0.5}, 100000, rng);
  const auto s = stats(x, 1);
  EXPECT_LT(std::abs(s.mean - 1.0), 3.0 * s.se);
}

TEST(SampleInitial, UniformSecondMomentLln) {
  Rng rng(3);
  const auto x = sample_initial(UniformLaw{0.0, 2.0}, 100000, rng);
  const auto s = stats(x, 2);
  EXPECT_LT(std::abs(s.mean - 4.0 / 3.0), 3.0 * s.se);
}

TEST(SampleInitial, NonnegativeAndDeterministic) {
  for (const InitialLaw &law :
       {InitialLaw{GammaLaw{0.5, 3.0}}, InitialLaw{UniformLaw{0.0, 1.0}},
        InitialLaw{DiscreteAtoms{{{0.0, 0.5}, {4.0, 0.5}}}}}) {
    Rng a(8);
    Rng b(8);
    const auto x = sample_initial(law, 5000, a);
    EXPECT_EQ(x, sample_initial(law, 5000, b));
    EXPECT_TRUE(std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0; }));
  }
}

TEST(SampleInitial, RejectsZeroCount) {
  Rng rng(1);
  EXPECT_THROW(sample_initial(PointMass{1.0}, 0, rng), DomainError);
}

// Moments agree with 10^6-sample Monte Carlo moments within 4 standard errors.
TEST(SampleInitial, MomentsMatchMonteCarloForEveryVariant) {
  const std::vector<InitialLaw> laws = {
      PointMass{1.5}, GammaLaw{2.0, 0.5}, UniformLaw{0.5, 2.0},
      DiscreteAtoms{{{0.5, 0.2}, {1.0, 0.3}, {3.0, 0.5}}}};
  std::uint64_t id = 0;
  for (const auto &law : laws) {
    Rng rng = Rng(2024).split(id++);
    const auto x = sample_initial(law, 1000000, rng);
    const auto m = moments(law);
    for (int p = 1; p <= 2; ++p) {
      const auto s = stats(x, p);
      const double expected = p == 1 ? m.m1 : m.m2;
      if (s.se == 0.0) {
        EXPECT_DOUBLE_EQ(s.mean, expected);
      } else {
        EXPECT_LT(std::abs(s.mean - expected), 4.0 * s.se) << describe(law) << " moment " << p;
      }
    }
  }
}

TEST(IntegrateAgainst, MatchesMoments) {
  for (const InitialLaw &law : {InitialLaw{GammaLaw{3.0, 0.7}}, InitialLaw{UniformLaw{1.0, 4.0}}}) {
    const auto m = moments(law);
    EXPECT_NEAR(integrate_against(law, [](double x) { return x; }), m.m1, 1e-11 * m.m1);
    EXPECT_NEAR(integrate_against(law, [](double x) { return x * x; }), m.m2, 1e-11 * m.m2);
    EXPECT_NEAR(integrate_against(law, [](double) { return 1.0; }), 1.0, 1e-12);
  }
}

TEST(InitialCdf, GammaAgainstQuadrature) {
  const InitialLaw law = GammaLaw{2.0, 0.5};
  for (double x : {0.1, 0.5, 1.0, 2.5}) {
    const double q =
        oracle::simpson([](double s) { return oracle::gamma_pdf(2.0, 0.5, s); }, 0.0, x, 2000);
    EXPECT_NEAR(initial_cdf(law, x), q, 1e-11);
  }
}
