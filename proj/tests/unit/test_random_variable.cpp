#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "worklab/error.hpp"
#include "worklab/random_variable.hpp"

using namespace worklab;

namespace {

DiscreteRandomVariable uniform_on(std::vector<double> values) {
  std::vector<Atom> atoms;
  for (double v : values) atoms.push_back({v, 1.0 / static_cast<double>(values.size())});
  return DiscreteRandomVariable::from_atoms(atoms);
}

DiscreteRandomVariable random_rv(std::mt19937_64& rng, std::size_t max_atoms = 8) {
  std::uniform_int_distribution<std::size_t> count(1, max_atoms);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  const std::size_t k = count(rng);
  const auto p = oracle::random_simplex(rng, k);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < k; ++i) atoms.push_back({std::round(val(rng) * 20) / 20, p[i]});
  return DiscreteRandomVariable::from_atoms(atoms);
}

// Brute force: sample x densely and at every candidate breakpoint.
bool in_delta_set_oracle(const DiscreteRandomVariable& x, double c, double eps, double delta) {
  long double m = 0;
  for (const auto& a : x.atoms())
    if (std::abs(a.value - c) <= delta) m += a.prob;
  return m > 1.0L - eps;
}

}  // namespace

TEST(RandomVariable, CanonicalizesAtoms) {
  const auto x = DiscreteRandomVariable::from_atoms({{2.0, 0.25}, {1.0, 0.5}, {2.0, 0.25}, {3.0, 0.0}});
  ASSERT_EQ(x.size(), 2u);
  EXPECT_EQ(x.atoms()[0].value, 1.0);
  EXPECT_DOUBLE_EQ(x.atoms()[1].prob, 0.5);
  EXPECT_THROW(DiscreteRandomVariable::from_atoms({{0.0, 0.5}}), Error);
  EXPECT_THROW(DiscreteRandomVariable::from_atoms({{0.0, 1.5}, {1.0, -0.5}}), Error);
}

TEST(RandomVariable, MergesFloatEqualValues) {
  const auto x = DiscreteRandomVariable::from_atoms({{0.1 + 0.2, 0.5}, {0.3, 0.5}});
  EXPECT_EQ(x.size(), 1u);
  EXPECT_TRUE(values_merge(1e6, 1e6 * (1 + 5e-13)));
  EXPECT_FALSE(values_merge(1.0, 1.0 + 1e-10));
}

TEST(RandomVariable, MomentsAndTransforms) {
  const auto x = uniform_on({0, 1, 2, 3});
  EXPECT_DOUBLE_EQ(x.mean(), 1.5);
  EXPECT_DOUBLE_EQ(x.variance(), 1.25);
  EXPECT_DOUBLE_EQ(x.negated().mean(), -1.5);
  EXPECT_DOUBLE_EQ(x.shifted(2).min(), 2.0);
}

TEST(RandomVariable, CsvUsesSeventeenDigits) {
  const auto x = DiscreteRandomVariable::from_atoms({{0.1, 1.0}});
  EXPECT_EQ(x.to_csv(), "value,probability\n0.10000000000000001,1\n");
}

TEST(Convolve, MatchesPairwiseSum) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto x = random_rv(rng), y = random_rv(rng);
    const auto z = convolve(x, y);
    std::map<double, long double> ref;
    for (const auto& a : x.atoms())
      for (const auto& b : y.atoms()) ref[a.value + b.value] += a.prob * b.prob;
    long double total = 0;
    for (const auto& a : z.atoms()) {
      long double m = 0;
      for (const auto& [v, p] : ref)
        if (values_merge(v, a.value) || std::abs(v - a.value) < 1e-12) m += p;
      EXPECT_NEAR(a.prob, static_cast<double>(m), 1e-14);
      total += a.prob;
    }
    EXPECT_NEAR(static_cast<double>(total), 1.0, 1e-12);
    EXPECT_NEAR(z.mean(), x.mean() + y.mean(), 1e-12);
    EXPECT_NEAR(z.variance(), x.variance() + y.variance(), 1e-11);
  }
}

TEST(Convolve, EnforcesAtomCap) {
  const auto x = uniform_on({0, 1, 2, 3});
  const auto y = uniform_on({0, 10, 20, 30});
  EXPECT_EQ(convolve(x, y, 16).size(), 16u);
  try {
    convolve(x, y, 15);
    FAIL() << "expected a cap error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::cap_exceeded);
  }
}

TEST(DeltaSet, WorkedValues) {
  const auto five = DiscreteRandomVariable::point_mass(5.0);
  const auto d = delta_set(five, 0.3, 0.25);
  ASSERT_EQ(d.intervals.size(), 1u);
  EXPECT_DOUBLE_EQ(d.intervals[0].lo, 4.75);
  EXPECT_DOUBLE_EQ(d.intervals[0].hi, 5.25);
  EXPECT_DOUBLE_EQ(d.infimum, 4.75);

  const auto coin = uniform_on({0, 1});
  const auto empty = delta_set(coin, 0.4, 0.1);
  EXPECT_TRUE(empty.empty());
  EXPECT_TRUE(std::isinf(empty.infimum));
  EXPECT_DOUBLE_EQ(delta_set(coin, 0.6, 0.1).infimum, -0.1);
}

TEST(DeltaSet, AgreesWithPointwiseDefinition) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ue(0.05, 0.95), ud(0.0, 0.6);
  for (int t = 0; t < 300; ++t) {
    const auto x = random_rv(rng);
    const double eps = ue(rng), delta = ud(rng);
    const auto d = delta_set(x, eps, delta);
    std::vector<double> probes;
    for (const auto& a : x.atoms())
      for (double s : {-delta, delta})
        for (double j : {-1e-9, 1e-9}) probes.push_back(a.value + s + j);
    for (int k = 0; k <= 400; ++k) probes.push_back(-4.0 + 8.0 * k / 400.0);
    for (double c : probes)
      EXPECT_EQ(d.contains(c), in_delta_set_oracle(x, c, eps, delta))
          << "c=" << c << " eps=" << eps << " delta=" << delta;
    for (std::size_t i = 1; i < d.intervals.size(); ++i)
      EXPECT_LT(d.intervals[i - 1].hi, d.intervals[i].lo);
    if (!d.empty()) EXPECT_EQ(d.infimum, d.intervals.front().lo);
  }
}

TEST(WindowMass, ClosedWindow) {
  const auto x = uniform_on({0, 1});
  EXPECT_DOUBLE_EQ(window_mass(x, 0.5, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(window_mass(x, 0.5, 0.49), 0.0);
}

TEST(MaxEps, WorkedValues) {
  EXPECT_DOUBLE_EQ(max_eps(DiscreteRandomVariable::point_mass(2.5), 0.3), 2.5);
  EXPECT_DOUBLE_EQ(max_eps(uniform_on({0, 1, 2, 3}), 0.2), 3.0);
  EXPECT_DOUBLE_EQ(max_eps(uniform_on({0, 1}), 0.6), 0.0);
}

TEST(MaxEps, BoundedByDeltaSetInfimum) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ue(0.05, 0.95), ud(0.0, 0.5);
  for (int t = 0; t < 300; ++t) {
    const auto x = random_rv(rng);
    const double eps = ue(rng), delta = ud(rng);
    const auto d = delta_set(x, eps, delta);
    if (!d.empty()) EXPECT_GE(delta + d.infimum, max_eps(x, eps) - 1e-12);
  }
}
