#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "gateminer/charprops.hpp"

using gateminer::optical_band_gap;

TEST(BandGap, PeakAt372nm) {
  auto r = optical_band_gap(372);
  EXPECT_EQ(r.lambda_nm, 372);
  EXPECT_NEAR(r.e_g_ev, 3.3333, 3.3333 * 1e-4);
  // Formula as printed, not the 3.35 eV quoted alongside it.
  EXPECT_GT(std::abs(r.e_g_ev - 3.35), 0.01);
}

TEST(BandGap, FormulaIdentities) {
  EXPECT_DOUBLE_EQ(optical_band_gap(1240).e_g_ev, 1.0);
  EXPECT_DOUBLE_EQ(optical_band_gap(620).e_g_ev, 2.0);
}

TEST(BandGap, InverseProperty) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> log_x(-6.0, 6.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = std::pow(10.0, log_x(rng));
    EXPECT_NEAR(optical_band_gap(1240.0 / x).e_g_ev, x, x * 1e-12);
  }
}

TEST(BandGap, RejectsNonPositiveWavelength) {
  EXPECT_THROW(optical_band_gap(0), std::invalid_argument);
  EXPECT_THROW(optical_band_gap(-372), std::invalid_argument);
  EXPECT_THROW(optical_band_gap(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
  EXPECT_THROW(optical_band_gap(std::numeric_limits<double>::infinity()), std::invalid_argument);
}
