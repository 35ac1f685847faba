#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "random_process.hpp"
#include "worklab/error.hpp"
#include "worklab/process.hpp"

using namespace worklab;
using testing_support::random_process;

namespace {

const Bath unit = Bath::with_kT(1.0);

LevelTransformation lt(std::vector<double> h) { return {EnergyLevels(std::move(h))}; }

// Compares a law with the oracle's (prob, work) list by window masses around
// every atom.
void expect_same_law(const DiscreteRandomVariable& law,
                     const std::vector<std::pair<double, double>>& pv) {
  long double total = 0;
  for (const auto& [p, w] : pv) total += p;
  EXPECT_NEAR(static_cast<double>(total), 1.0, 1e-12);
  for (const auto& a : law.atoms()) {
    const double tol = 1e-9 * std::max(1.0, std::abs(a.value));
    EXPECT_NEAR(a.prob, static_cast<double>(oracle::window(pv, a.value, tol)), 1e-12);
  }
  for (const auto& [p, w] : pv) {
    const double tol = 1e-9 * std::max(1.0, std::abs(w));
    EXPECT_GT(window_mass(law, w, tol), 0.0);
  }
}

}  // namespace

TEST(Process, RejectsDimensionMismatch) {
  EXPECT_THROW(Process(EnergyLevels({0, 0}), {lt({0, 0, 0})}), Error);
}

TEST(Process, JsonRoundTrip) {
  const Process p(EnergyLevels({0, 1}), {lt({0.5, 1}), Thermalization{}, lt({0, 1})});
  const auto j = p.to_json();
  EXPECT_EQ(j.dump(), R"({"initial_levels":[0.0,1.0],"steps":[{"lt":[0.5,1.0]},"therm",{"lt":[0.0,1.0]}]})");
  const Process back = Process::from_json(j);
  EXPECT_EQ(back.to_json(), j);
  EXPECT_THROW(Process::from_json(nlohmann::json::parse(R"({"steps":[]})")), Error);
  EXPECT_THROW(Process::from_json(nlohmann::json::parse(R"({"initial_levels":[0],"steps":["boil"]})")),
               Error);
}

TEST(Normalize, MergesConsecutiveSteps) {
  const Process p(EnergyLevels({0, 0}),
                  {lt({1, 0}), lt({2, 3}), Thermalization{}, Thermalization{}, lt({0, 0})});
  const Process n = normalize(p);
  ASSERT_EQ(n.steps().size(), 3u);
  EXPECT_EQ(std::get<LevelTransformation>(n.steps()[0]).target, EnergyLevels({2, 3}));
  EXPECT_TRUE(n.is_normalized());
  EXPECT_EQ(final_levels(n), final_levels(p));
  const Process t(EnergyLevels({0, 0}), {Thermalization{}, Thermalization{}});
  EXPECT_EQ(normalize(t).steps().size(), 1u);
}

TEST(Normalize, PreservesWorkLaw) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + t % 3;
    const EnergyLevels h0(oracle::random_levels(rng, n));
    std::vector<ProcessStep> steps;
    std::bernoulli_distribution coin(0.5);
    for (int k = 0; k < 6; ++k) {
      if (coin(rng)) steps.emplace_back(Thermalization{});
      else steps.emplace_back(lt(oracle::random_levels(rng, n)));
    }
    const Process p(h0, steps);
    const auto q0 = oracle::random_simplex(rng, n);
    const auto law = exact_work_distribution(p, Distribution(q0), unit).law;
    expect_same_law(law, oracle::paths(p, q0, 1.0));
    expect_same_law(exact_work_distribution(normalize(p), Distribution(q0), unit).law,
                    oracle::paths(p, q0, 1.0));
  }
}

TEST(FinalState, PureLtKeepsInitialAndThermUsesLastConfiguration) {
  const Distribution q0({0.2, 0.8});
  const Process pure(EnergyLevels({0, 0}), {lt({3, -1})});
  EXPECT_EQ(final_state_distribution(pure, q0, unit).probs(), q0.probs());
  const Process th(EnergyLevels({0, 0}), {lt({0, std::log(3.0)}), Thermalization{}, lt({5, 5})});
  const auto f = final_state_distribution(th, q0, unit);
  EXPECT_NEAR(f[0], 0.75, 1e-15);
  const Process two(EnergyLevels({0, 0}),
                    {Thermalization{}, lt({0, std::log(3.0)}), Thermalization{}, lt({1, 0})});
  EXPECT_NEAR(final_state_distribution(two, q0, unit)[1], 0.25, 1e-15);
}

TEST(ExactWork, WorkedValues) {
  const Process single(EnergyLevels({0, 0}), {lt({0, 1})});
  const auto a = exact_work_distribution(single, Distribution({1, 0}), unit).law;
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a.atoms()[0].value, 0.0);
  const auto b = exact_work_distribution(single, Distribution({0.5, 0.5}), unit).law;
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b.atoms()[1].value, 1.0);
  EXPECT_DOUBLE_EQ(b.atoms()[1].prob, 0.5);
}

TEST(ExactWork, MatchesPathEnumerationOracle) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 80; ++t) {
    const std::size_t n = 2 + t % 3, L = 1 + t % 4;
    const Process p = random_process(rng, n, L, t % 2 == 0);
    const auto q0 = oracle::random_simplex(rng, n, 0.2);
    const auto w = exact_work_distribution(p, Distribution(q0), unit);
    EXPECT_EQ(w.provenance, Provenance::exact);
    expect_same_law(w.law, oracle::paths(p, q0, 1.0));
  }
}

TEST(ExactWork, AdditiveAcrossThermalization) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 30; ++t) {
    const Process a = random_process(rng, 3, 2, false);
    const EnergyLevels junction = final_levels(a);
    std::vector<ProcessStep> steps{Thermalization{}, lt(oracle::random_levels(rng, 3)),
                                   Thermalization{}, lt(oracle::random_levels(rng, 3))};
    const Process b(junction, steps);
    const auto q0 = Distribution(oracle::random_simplex(rng, 3));
    const auto whole = exact_work_distribution(concatenate(a, b), q0, unit).law;
    const auto split = convolve(exact_work_distribution(a, q0, unit).law,
                                exact_work_distribution(b, gibbs(junction, unit), unit).law);
    ASSERT_EQ(whole.size(), split.size());
    for (std::size_t i = 0; i < whole.size(); ++i) {
      EXPECT_NEAR(whole.atoms()[i].value, split.atoms()[i].value, 1e-12);
      EXPECT_NEAR(whole.atoms()[i].prob, split.atoms()[i].prob, 1e-14);
    }
  }
}

TEST(ExactWork, RefusesBeyondAtomCap) {
  std::mt19937_64 rng(1);
  const Process p = random_process(rng, 4, 8, true);
  try {
    exact_work_distribution(p, Distribution::uniform(4), unit, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::cap_exceeded);
  }
}

TEST(ExactWork, JarzynskiIdentity) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + t % 3, L = 1 + t % 4;
    const Process p = random_process(rng, n, L, t % 3 == 0);
    const Bath b = Bath::with_kT(0.5 + 0.5 * (t % 3));
    const auto law = exact_work_distribution(p, gibbs(p.initial_levels(), b), b).law;
    long double s = 0;
    for (const auto& a : law.atoms()) s += a.prob * std::exp(-static_cast<long double>(a.value) / b.kT());
    const long double ratio =
        std::exp(oracle::log_z(final_levels(p).values(), b.kT()) -
                 oracle::log_z(p.initial_levels().values(), b.kT()));
    EXPECT_NEAR(static_cast<double>(s / ratio), 1.0, 1e-10);
  }
}

TEST(ExactMoments, AgreeWithLaw) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 40; ++t) {
    const Process p = random_process(rng, 3, 3, false);
    const auto q0 = Distribution(oracle::random_simplex(rng, 3));
    const auto law = exact_work_distribution(p, q0, unit).law;
    const auto m = exact_work_moments(p, q0, unit);
    EXPECT_NEAR(m.mean, law.mean(), 1e-12);
    EXPECT_NEAR(m.variance, law.variance(), 1e-10);
  }
}

TEST(SampleWork, DeterministicProcessGivesPointMass) {
  const Process p(EnergyLevels({0, 0}), {lt({2, 0})});
  for (std::uint64_t seed : {1ull, 99ull}) {
    const auto w = sample_work(p, Distribution({1, 0}), unit, {seed, 1000, 128, 2});
    ASSERT_EQ(w.law.size(), 1u);
    EXPECT_EQ(w.law.atoms()[0].value, 2.0);
    EXPECT_EQ(w.provenance, Provenance::monte_carlo);
    EXPECT_EQ(w.sample_count, 1000u);
  }
}

TEST(SampleWork, IndependentOfThreadCountAndReproducible) {
  std::mt19937_64 rng(30);
  const Process p = random_process(rng, 3, 4, true);
  const Distribution q0({0.2, 0.3, 0.5});
  const auto a = sample_work(p, q0, unit, {7, 50000, 4096, 1});
  const auto b = sample_work(p, q0, unit, {7, 50000, 4096, 4});
  ASSERT_EQ(a.law.size(), b.law.size());
  for (std::size_t i = 0; i < a.law.size(); ++i) {
    EXPECT_EQ(a.law.atoms()[i].value, b.law.atoms()[i].value);
    EXPECT_EQ(a.law.atoms()[i].prob, b.law.atoms()[i].prob);
  }
  const auto meta = a.metadata();
  EXPECT_EQ(meta["seed"], 7);
  EXPECT_EQ(meta["generator"], kGeneratorName);
}

TEST(SampleWork, MeanWithinFiveStandardErrors) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 10; ++t) {
    const Process p = random_process(rng, 3, 3, t % 2 == 0);
    const auto q0 = Distribution(oracle::random_simplex(rng, 3));
    const auto exact = exact_work_moments(p, q0, unit);
    const auto s = sample_work(p, q0, unit, {static_cast<std::uint64_t>(100 + t), 100000, 16384, 2});
    EXPECT_LE(std::abs(s.law.mean() - exact.mean), 5 * std::sqrt(exact.variance / 1e5) + 1e-12);
  }
}

TEST(SampleWork, DifferentSeedsDifferByStatisticalNoise) {
  std::mt19937_64 rng(32);
  const Process p = random_process(rng, 3, 3, true);
  const Distribution q0 = Distribution::uniform(3);
  const auto a = sample_work(p, q0, unit, {1, 100000, 16384, 1});
  const auto b = sample_work(p, q0, unit, {2, 100000, 16384, 1});
  EXPECT_NE(a.law.mean(), b.law.mean());
  const double se = std::sqrt(exact_work_moments(p, q0, unit).variance / 1e5);
  EXPECT_LE(std::abs(a.law.mean() - b.law.mean()), 8 * se);
}

TEST(Reverse, SingleLtAndInvolution) {
  const Process p(EnergyLevels({0, 0}), {lt({0, 1})});
  const Process r = reverse(p);
  EXPECT_EQ(r.initial_levels(), EnergyLevels({0, 1}));
  EXPECT_EQ(std::get<LevelTransformation>(r.steps()[0]).target, EnergyLevels({0, 0}));
  std::mt19937_64 rng(40);
  for (int t = 0; t < 50; ++t) {
    const Process q = random_process(rng, 2 + t % 3, 1 + t % 4, t % 2 == 1);
    EXPECT_EQ(reverse(reverse(q)).to_json(), q.to_json());
    auto fwd = q.configurations();
    auto back = reverse(q).configurations();
    std::reverse(back.begin(), back.end());
    EXPECT_EQ(fwd.front(), back.front());
    EXPECT_EQ(fwd.back(), back.back());
  }
}

TEST(Reverse, PathWorkNegatesUnderReversal) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 20; ++t) {
    const Process p = random_process(rng, 3, 3, true);
    const Process r = reverse(p);
    // Forward path (n_0..n_k) has work w; the reversed path (n_k..n_0) has -w.
    std::map<std::vector<std::size_t>, double> fwd;
    enumerate_paths(p, Distribution::uniform(3), unit,
                    [&](double, double w, const std::vector<std::size_t>& s) { fwd[s] = w; });
    std::size_t checked = 0;
    enumerate_paths(r, Distribution::uniform(3), unit,
                    [&](double, double w, const std::vector<std::size_t>& s) {
                      std::vector<std::size_t> back(s.rbegin(), s.rend());
                      auto it = fwd.find(back);
                      ASSERT_NE(it, fwd.end());
                      EXPECT_NEAR(w, -it->second, 1e-12);
                      ++checked;
                    });
    EXPECT_EQ(checked, fwd.size());
  }
}
