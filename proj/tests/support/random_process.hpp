#pragma once

#include <random>
#include <vector>

#include "oracles.hpp"
#include "worklab/process.hpp"

namespace testing_support {

// Alternating process with `lts` level transformations on `n` levels. With
// `cyclic` the last LT returns to the initial levels.
inline worklab::Process random_process(std::mt19937_64& rng, std::size_t n,
                                       std::size_t lts, bool lead_therm,
                                       bool cyclic = false, double spread = 2.0) {
  const worklab::EnergyLevels h0(oracle::random_levels(rng, n, spread));
  std::vector<worklab::ProcessStep> steps;
  if (lead_therm) steps.emplace_back(worklab::Thermalization{});
  for (std::size_t k = 0; k < lts; ++k) {
    if (k > 0) steps.emplace_back(worklab::Thermalization{});
    const bool last = k + 1 == lts;
    steps.emplace_back(worklab::LevelTransformation{
        cyclic && last ? h0 : worklab::EnergyLevels(oracle::random_levels(rng, n, spread))});
  }
  return worklab::Process(h0, std::move(steps));
}

}  // namespace testing_support
