#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "worklab/asymptotics.hpp"
#include "worklab/error.hpp"
#include "worklab/spectra.hpp"

using namespace worklab;

namespace {

const Bath unit = Bath::with_kT(1.0);

}  // namespace

TEST(Flat, LevelsAreQuantileMidpoints) {
  const auto h = flat_levels(2.0, 4);
  EXPECT_EQ(h.size(), 4u);
  EXPECT_NEAR(h[0], -1.5, 1e-15);
  EXPECT_NEAR(h[3], 1.5, 1e-15);
}

TEST(Flat, RatiosFollowContinuumForms) {
  for (double a : {5.0, 20.0, 50.0}) {
    const auto f = flat_spectrum_quantities(a, unit, 0.05, 10000);
    // Continuum: A = a - kT ln(2 beta a) + O(e^{-2 beta a}).
    EXPECT_NEAR(f.A_ratio, 1.0 - std::log(2 * a) / a, 1e-3);
    EXPECT_NEAR(f.sigma_ratio, 1.0, 1e-4);
    EXPECT_NEAR(f.values.sigma, a / std::sqrt(3.0) * f.sigma_ratio, 1e-12);
  }
  const auto f = flat_spectrum_quantities(50.0, unit, 0.05, 10000);
  EXPECT_NEAR(f.Aeps_ratio, 1.0, 0.05);
}

TEST(Flat, AepsMatchesClosedRemoval) {
  // Uniform q: the optimal event drops the eps N lowest levels.
  const double a = 10.0, eps = 0.1;
  const std::size_t n = 200;
  const auto h = flat_levels(a, n);
  const auto f = flat_spectrum_quantities(a, unit, eps, n);
  const auto drop = static_cast<std::size_t>(std::ceil(eps * n)) - 1;
  std::vector<double> lv(h.values().begin(), h.values().end());
  const long double lz = oracle::log_z(lv, 1.0);
  std::vector<double> kept(lv.begin() + static_cast<std::ptrdiff_t>(drop), lv.end());
  const long double lz_kept = oracle::log_z(kept, 1.0);
  // D0 in nats times kT = -ln G(kept) = lnZ - lnZ_kept.
  EXPECT_NEAR(f.values.Aeps, static_cast<double>(lz - lz_kept), 1e-9);
}

TEST(Semicircle, CdfAgreesWithQuadrature) {
  for (double y : {-0.99, -0.5, -0.1, 0.0, 0.3, 0.77, 0.999}) {
    EXPECT_NEAR(semicircle_cdf(y), oracle::semicircle_cdf(y), 1e-12);
  }
  EXPECT_EQ(semicircle_cdf(-2.0), 0.0);
  EXPECT_EQ(semicircle_cdf(2.0), 1.0);
  for (double p : {0.01, 0.25, 0.5, 0.9}) {
    EXPECT_NEAR(semicircle_cdf(semicircle_quantile(p)), p, 1e-13);
  }
  EXPECT_NEAR(semicircle_quantile(0.5), 0.0, 1e-14);
}

TEST(Wigner, VarianceAndConstant) {
  const auto w = wigner_quantities(40.0, unit, 0.01, 100000);
  EXPECT_NEAR(w.sigma_ratio, 0.5, 1e-3);
  EXPECT_NEAR(w.c_lower, std::pow(3 * M_PI * 0.01 / (4 * std::sqrt(2.0)), 2.0 / 3), 1e-15);
  EXPECT_NEAR(w.c_upper, std::pow(3 * M_PI * 0.01 / 4, 2.0 / 3), 1e-15);
  EXPECT_NEAR(w.c_lower, 0.06523, 1e-5);
  EXPECT_NEAR(w.c_upper, 0.08219, 1e-5);
  EXPECT_GE(w.c_eps, w.c_lower);
  EXPECT_LE(w.c_eps, w.c_upper);
}

TEST(Wigner, ConstantTendsToOneNearHalf) {
  double prev = 0;
  for (double eps : {0.1, 0.3, 0.45, 0.499}) {
    const auto w = wigner_quantities(10.0, unit, eps, 1000);
    EXPECT_GT(w.c_eps, prev);
    prev = w.c_eps;
  }
  EXPECT_NEAR(prev, 1.0, 1e-2);
  EXPECT_THROW(wigner_quantities(10.0, unit, 0.5, 100), Error);
}

TEST(Wigner, DiscretizationConverges) {
  double prev_ratio = wigner_quantities(20.0, unit, 0.05, 1000).sigma_ratio;
  double prev_change = 1e9;
  for (std::size_t n : {2000, 4000, 8000}) {
    const double r = wigner_quantities(20.0, unit, 0.05, n).sigma_ratio;
    EXPECT_LT(std::abs(r - prev_ratio), prev_change);
    prev_change = std::abs(r - prev_ratio);
    prev_ratio = r;
  }
}

TEST(Mixed, PointMassHasNoLeadingSigma) {
  const auto m = mixed_family_quantities(EnergyLevels({0, 0}), unit, 0.0, 1, 6, 0.1);
  EXPECT_EQ(m.sigma_leading, 0.0);
  ASSERT_TRUE(m.sigma_exact);
  EXPECT_NEAR(*m.sigma_exact, 0.0, 1e-12);
  EXPECT_NEAR(*m.A_exact, 6 * std::log(2.0), 1e-12);
}

TEST(Mixed, LeadingFormsAndGibbsCondition) {
  const auto m = mixed_family_quantities(EnergyLevels({0, 0}), unit, 0.1, 1, 12, 0.1);
  const double l = 12 * std::log(2.0);  // -kT ln G_x(h^m)
  EXPECT_NEAR(m.gibbs_x, std::pow(0.5, 12), 1e-18);
  EXPECT_NEAR(m.A_leading, 0.9 * l, 1e-12);
  EXPECT_NEAR(m.sigma_leading, std::sqrt(0.09) * l, 1e-12);
  EXPECT_NEAR(m.Aeps_leading, l, 1e-12);
}

TEST(Mixed, ExactValuesAgainstDirectSums) {
  // q = 0.9 delta_x + 0.1 uniform over 2^6 outcomes, uniform Gibbs state.
  const std::size_t m = 6, n = 64;
  const double nu = 0.1, u = 1.0 / n;
  const double px = (1 - nu) + nu * u, po = nu * u;
  const double lx = std::log(px / u), lo = std::log(po / u);
  const double a = px * lx + (n - 1) * po * lo;
  const double var = px * (lx - a) * (lx - a) + (n - 1) * po * (lo - a) * (lo - a);
  const auto q = mixed_family_quantities(EnergyLevels({0, 0}), unit, nu, 1, m, 0.1);
  EXPECT_NEAR(*q.A_exact, a, 1e-12);
  EXPECT_NEAR(*q.sigma_exact, std::sqrt(var), 1e-12);
  // eps = 0.1: keep x plus enough others to exceed 0.9.
  std::size_t k = 1;
  double kept = px;
  while (!(kept > 0.9)) kept += po, ++k;
  EXPECT_NEAR(*q.Aeps_exact, -std::log(k * u), 1e-12);
}

TEST(Mixed, RatiosImproveAlongLadder) {
  double prev_a = 1e9, prev_e = 1e9;
  for (std::size_t m : {6, 9, 12}) {
    const auto q = mixed_family_quantities(EnergyLevels({0, 0}), unit, 0.1, 1, m, 0.1);
    const double da = std::abs(*q.A_exact / q.A_leading - 1);
    const double de = std::abs(*q.Aeps_exact / q.Aeps_leading - 1);
    EXPECT_LT(da, prev_a);
    EXPECT_LE(de, prev_e + 1e-12);
    prev_a = da;
    prev_e = de;
  }
  EXPECT_LT(prev_a, 0.1);
}

TEST(Mixed, ExactPathCapped) {
  const auto q = mixed_family_quantities(EnergyLevels({0, 0}), unit, 0.1, 1, 20, 0.1);
  EXPECT_FALSE(q.A_exact);
  EXPECT_GT(q.A_leading, 0.0);
}
