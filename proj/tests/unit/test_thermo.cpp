#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "worklab/error.hpp"
#include "worklab/thermo.hpp"

using namespace worklab;

namespace {
const Bath unit = Bath::with_kT(1.0);
}

TEST(Bath, BetaAndKTAreReciprocal) {
  const Bath a = Bath::with_kT(2.5);
  EXPECT_NEAR(a.beta() * a.kT(), 1.0, 1e-12);
  const Bath b = Bath::with_beta(0.125);
  EXPECT_DOUBLE_EQ(b.kT(), 8.0);
  EXPECT_THROW(Bath::with_kT(0.0), Error);
  EXPECT_THROW(Bath::with_beta(-1.0), Error);
}

TEST(Distribution, RejectsInvalidInput) {
  EXPECT_THROW(Distribution({}), Error);
  EXPECT_THROW(Distribution({0.5, -0.1, 0.6}), Error);
  EXPECT_THROW(Distribution({0.5, 0.6}), Error);
  EXPECT_THROW(Distribution({NAN, 1.0}), Error);
}

TEST(Distribution, RenormalizesSmallRoundingOnly) {
  const Distribution q({0.3 + 5e-10, 0.7});
  EXPECT_NEAR(q[0] + q[1], 1.0, 1e-15);
  EXPECT_THROW(Distribution({0.3 + 5e-9, 0.7}), Error);
}

TEST(Distribution, SupportPredicate) {
  EXPECT_TRUE(Distribution({0.5, 0.5}).has_full_support());
  EXPECT_FALSE(Distribution({1.0, 0.0}).has_full_support());
  EXPECT_EQ(Distribution::point_mass(3, 2)[2], 1.0);
  EXPECT_THROW(Distribution::point_mass(3, 3), Error);
}

TEST(EnergyLevels, RejectsInfiniteEnergies) {
  EXPECT_THROW(EnergyLevels({0.0, INFINITY}), Error);
  EXPECT_THROW(EnergyLevels({}), Error);
}

TEST(EventSet, ValidatesMembers) {
  EXPECT_THROW(EventSet({0, 3}, 3), Error);
  EXPECT_THROW(EventSet({1, 1}, 3), Error);
  const EventSet s({2, 0}, 4);
  EXPECT_EQ(s.members(), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(s.complement().members(), (std::vector<std::size_t>{1, 3}));
}

TEST(PartitionFunction, WorkedValues) {
  EXPECT_DOUBLE_EQ(partition_function(EnergyLevels({0, 0}), unit), 2.0);
  EXPECT_NEAR(partition_function(EnergyLevels({0, std::log(3.0)}), unit), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(partition_function(EnergyLevels({1.7}), Bath::with_beta(2.0)), std::exp(-3.4),
              1e-15);
}

TEST(Gibbs, WorkedValues) {
  const auto g = gibbs(EnergyLevels({0, std::log(3.0)}), unit);
  EXPECT_NEAR(g[0], 0.75, 1e-15);
  EXPECT_NEAR(g[1], 0.25, 1e-15);
  const auto u = gibbs(EnergyLevels({4.2, 4.2, 4.2}), unit);
  for (std::size_t n = 0; n < 3; ++n) EXPECT_NEAR(u[n], 1.0 / 3.0, 1e-15);
}

TEST(Gibbs, ShiftInvariantAndNormalizedOnWideRanges) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const auto h = oracle::random_levels(rng, 1 + t % 7, 50.0);
    const EnergyLevels lv(h);
    const auto g = gibbs(lv, unit);
    const auto ref = oracle::gibbs(h, 1.0);
    double sum = 0;
    for (std::size_t n = 0; n < h.size(); ++n) {
      sum += g[n];
      EXPECT_NEAR(g[n], static_cast<double>(ref[n]), 1e-13);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    const auto gs = gibbs(lv.shifted(123.0), unit);
    for (std::size_t n = 0; n < h.size(); ++n) EXPECT_NEAR(gs[n], g[n], 1e-13);
    const auto argmax = std::max_element(g.probs().begin(), g.probs().end()) - g.probs().begin();
    EXPECT_EQ(h[argmax], *std::min_element(h.begin(), h.end()));
  }
}

TEST(Gibbs, SurvivesLargeBetaTimesEnergy) {
  const auto g = gibbs(EnergyLevels({0.0, 1500.0, -900.0}), unit);
  EXPECT_NEAR(g[2], 1.0, 1e-15);
  EXPECT_NEAR(free_energy(EnergyLevels({0.0, 1500.0, -900.0}), unit), -900.0, 1e-9);
}

TEST(FreeEnergy, WorkedValuesAndBounds) {
  EXPECT_DOUBLE_EQ(free_energy(EnergyLevels({3.5}), unit), 3.5);
  EXPECT_NEAR(free_energy(EnergyLevels({0, 0}), unit), -std::log(2.0), 1e-15);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto h = oracle::random_levels(rng, 1 + t % 5, 10.0);
    const EnergyLevels lv(h);
    const double f = free_energy(lv, Bath::with_kT(0.7));
    EXPECT_NEAR(f, static_cast<double>(oracle::free_energy(h, 0.7)), 1e-12);
    EXPECT_LE(f, lv.min() + 1e-15);
    EXPECT_NEAR(free_energy(lv.shifted(2.5), Bath::with_kT(0.7)), f + 2.5, 1e-12);
  }
}

TEST(TruncatedPartition, WorkedValuesAndPartitionSum) {
  const EnergyLevels h({0, 1});
  EXPECT_DOUBLE_EQ(truncated_partition(h, EventSet({0}, 2), unit), 1.0);
  EXPECT_NEAR(truncated_partition(h, EventSet({1}, 2), unit), std::exp(-1.0), 1e-16);
  EXPECT_NEAR(truncated_partition(h, EventSet::full(2), unit), partition_function(h, unit),
              1e-15);
  EXPECT_THROW(truncated_partition(h, EventSet({}, 2), unit), Error);
  const EnergyLevels h5({0.3, -1.0, 2.0, 0.0, 0.7});
  const EventSet part({0, 3}, 5);
  EXPECT_NEAR(truncated_partition(h5, part, unit) +
                  truncated_partition(h5, part.complement(), unit),
              partition_function(h5, unit), 1e-13);
}

TEST(EventProbability, PartialSums) {
  const Distribution q({0.9, 0.1});
  EXPECT_DOUBLE_EQ(event_probability(q, EventSet::full(2)), 1.0);
  EXPECT_DOUBLE_EQ(event_probability(q, EventSet({}, 2)), 0.0);
  EXPECT_DOUBLE_EQ(event_probability(q, EventSet({1}, 2)), 0.1);
}

TEST(Json, RoundTripsArrays) {
  const Distribution q({0.25, 0.75});
  const EnergyLevels h({-1.5, 2.0});
  EXPECT_EQ(distribution_from_json(to_json(q)).probs(), q.probs());
  EXPECT_EQ(levels_from_json(to_json(h)), h);
  EXPECT_THROW(levels_from_json(nlohmann::json::parse(R"({"a":1})")), Error);
}
