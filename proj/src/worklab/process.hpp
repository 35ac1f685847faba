#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "worklab/random_variable.hpp"
#include "worklab/thermo.hpp"

namespace worklab {

struct LevelTransformation {
  EnergyLevels target;
};
struct Thermalization {};
using ProcessStep = std::variant<LevelTransformation, Thermalization>;

inline bool is_lt(const ProcessStep& s) {
  return std::holds_alternative<LevelTransformation>(s);
}

class Process {
 public:
  Process(EnergyLevels initial, std::vector<ProcessStep> steps);

  const EnergyLevels& initial_levels() const { return initial_; }
  const std::vector<ProcessStep>& steps() const { return steps_; }
  std::size_t dimension() const { return initial_.size(); }
  bool is_normalized() const;
  std::size_t lt_count() const;

  // Levels before step 0, after step 0, ..., after the last step.
  std::vector<EnergyLevels> configurations() const;

  nlohmann::json to_json() const;
  static Process from_json(const nlohmann::json& j);

 private:
  EnergyLevels initial_;
  std::vector<ProcessStep> steps_;
};

// Concatenates b onto a; b must start where a ends.
Process concatenate(const Process& a, const Process& b);

Process normalize(const Process& p);
EnergyLevels final_levels(const Process& p);
Distribution final_state_distribution(const Process& p, const Distribution& q0,
                                      const Bath& bath);

// One LT of a normalized process: the state distribution it acts on and the
// per-state work increments.
struct WorkSegment {
  std::vector<double> state_probs;
  std::vector<double> increments;
};
std::vector<WorkSegment> work_segments(const Process& p, const Distribution& q0,
                                       const Bath& bath);

enum class Provenance { exact, monte_carlo };

struct WorkDistribution {
  DiscreteRandomVariable law;
  Provenance provenance = Provenance::exact;
  std::uint64_t seed = 0;
  std::size_t sample_count = 0;
  std::string generator;

  nlohmann::json metadata() const;
};

inline constexpr std::size_t kDefaultAtomCap = 1'000'000;

WorkDistribution exact_work_distribution(const Process& p, const Distribution& q0,
                                         const Bath& bath,
                                         std::size_t atom_cap = kDefaultAtomCap);

struct WorkMoments {
  double mean;
  double variance;
};
// Mean and variance from segment independence; no atom limit.
WorkMoments exact_work_moments(const Process& p, const Distribution& q0,
                               const Bath& bath);

struct SamplingOptions {
  std::uint64_t seed = 1;
  std::size_t n_samples = 100'000;
  std::size_t chunk_size = 1u << 14;
  std::size_t jobs = 1;
};
inline constexpr const char* kGeneratorName = "std::mt19937_64/seed_seq(seed_lo,seed_hi,chunk)";

WorkDistribution sample_work(const Process& p, const Distribution& q0,
                             const Bath& bath, const SamplingOptions& opts);

Process reverse(const Process& p);

// Depth-first walk over every state path of a normalized process. The
// callback receives the path probability and total work.
using PathVisitor = std::function<void(double prob, double work,
                                       const std::vector<std::size_t>& states)>;
std::size_t path_count(const Process& p, const Distribution& q0, const Bath& bath);
void enumerate_paths(const Process& p, const Distribution& q0, const Bath& bath,
                     const PathVisitor& visit,
                     std::size_t path_cap = kDefaultAtomCap);

}  // namespace worklab
