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

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>

#include "oracles.hpp"
#include "vsmhl/bessel.hpp"

using namespace vsmhl;

TEST(Bessel, IZeroAtZero) { EXPECT_EQ(modified_bessel_i(0.0, 0.0), 1.0); }

TEST(Bessel, PositiveOrderAtZero) { EXPECT_EQ(modified_bessel_i(1.5, 0.0), 0.0); }

TEST(Bessel, IOneAtOne) {
  const double series = static_cast<double>(oracle::bessel_i_series(1.0L, 1.0L));
  EXPECT_NEAR(series, 0.5651591040, 1e-10);
  EXPECT_NEAR(modified_bessel_i(1.0, 1.0), series, 1e-12 * series);
}

// Power-series oracle to 1e-12 relative on nu in [0, 5], z in [0, 30].
TEST(Bessel, MatchesPowerSeriesOnGrid) {
  for (int a = 0; a <= 20; ++a) {
    const double nu = 0.25 * a;
    for (int b = 0; b <= 120; ++b) {
      const double z = 0.25 * b;
      const auto ref = static_cast<double>(oracle::bessel_i_series(nu, z));
      const double got = modified_bessel_i(nu, z);
      if (ref == 0.0) {
        EXPECT_EQ(got, 0.0);
      } else {
        EXPECT_NEAR(got, ref, 1e-12 * ref) << "nu=" << nu << " z=" << z;
      }
    }
  }
}

// The first correction is (4 nu^2 - 1) / (8 z), below 1e-2 at z = 700 for nu <= 3.
TEST(Bessel, AsymptoticLeadingTerm) {
  for (double nu : {0.0, 0.5, 1.0, 2.0, 3.0}) {
    const double v = bessel_i_scaled(nu, 700.0) * std::sqrt(2.0 * std::numbers::pi * 700.0);
    EXPECT_NEAR(v, 1.0, 1e-2) << nu;
  }
}

// Independent library implementation as a second oracle, including the
// large-argument branch.
TEST(Bessel, AgreesWithBoostAcrossBranches) {
  for (double nu : {0.0, 0.3, 1.0, 2.0, 3.5, 7.0}) {
    for (double z : {0.01, 1.0, 10.0, 29.9, 31.0, 60.0, 79.0, 81.0, 150.0, 400.0, 700.0}) {
      const double ref = boost::math::cyl_bessel_i(nu, z);
      EXPECT_NEAR(modified_bessel_i(nu, z), ref, 1e-12 * ref) << "nu=" << nu << " z=" << z;
    }
  }
}

TEST(Bessel, ContinuousAtBranchSwitch) {
  for (double nu : {0.0, 1.0, 2.5}) {
    const double zs = 30.0 + nu * nu;
    const double below = log_bessel_i_scaled(nu, std::nextafter(zs, 0.0));
    const double above = log_bessel_i_scaled(nu, std::nextafter(zs, 1e9));
    EXPECT_NEAR(below, above, 1e-13);
  }
}

TEST(Bessel, ScaledStaysFiniteBeyondOverflow) {
  const double v = log_bessel_i_scaled(1.0, 1e6);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, -0.5 * std::log(2.0 * std::numbers::pi * 1e6), 1e-6);
  EXPECT_TRUE(std::isinf(modified_bessel_i(1.0, 1e6)));
}

TEST(Bessel, RecurrenceIdentity) {
  // I_{nu-1}(z) - I_{nu+1}(z) = (2 nu / z) I_nu(z)
  for (double nu : {1.0, 1.5, 3.0}) {
    for (double z : {0.5, 5.0, 50.0, 200.0}) {
      const double lhs = bessel_i_scaled(nu - 1.0, z) - bessel_i_scaled(nu + 1.0, z);
      const double rhs = 2.0 * nu / z * bessel_i_scaled(nu, z);
      EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(bessel_i_scaled(nu - 1.0, z)));
    }
  }
}

TEST(Bessel, DomainErrors) {
  EXPECT_THROW(modified_bessel_i(-1.0, 1.0), DomainError);
  EXPECT_THROW(modified_bessel_i(1.0, -1.0), DomainError);
  EXPECT_THROW(log_bessel_i_scaled(0.0, std::nan("")), DomainError);
}
