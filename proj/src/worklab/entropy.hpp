#pragma once

#include <cstddef>
#include <span>
#include <string>

#include <json.hpp>

#include "worklab/thermo.hpp"

namespace worklab {

// Relative entropies are in bits; rho is in bits^3.
double shannon_entropy(const Distribution& q);
double relative_entropy(const Distribution& q, const Distribution& p);
double relative_sigma(const Distribution& q, const Distribution& p);
double relative_rho(const Distribution& q, const Distribution& p);
// -log2 p(supp q).
double renyi0(const Distribution& q, const Distribution& p);

double expected_work_content(const Distribution& q, const EnergyLevels& h,
                             const Bath& bath);

enum class Certificate {
  exhaustive,
  type_class,
  branch_and_bound,
  sorted_exact,
  greedy_upper_bound,
};
std::string to_string(Certificate c);
inline bool is_optimal(Certificate c) { return c != Certificate::greedy_upper_bound; }

struct SubsetSolution {
  EventSet lambda;
  double objective;      // minimized weight (p-mass or Z_Lambda)
  double log_objective;  // natural log of objective
  double kept_mass;      // q(lambda)
  Certificate certificate;
  double eps;
  double eta;
  std::size_t nodes = 0;

  nlohmann::json to_json() const;
};

struct SmoothingOptions {
  double eta = 0.0;
  std::size_t exhaustive_limit = 20;
  std::size_t node_limit = 5'000'000;
};

// Minimizes sum_{n in Lambda} weights[n] over Lambda with q(Lambda) > 1-eps+eta.
SubsetSolution min_weight_event(const Distribution& q,
                                std::span<const double> weights, double eps,
                                const SmoothingOptions& opts = {});

struct EpsFreeEnergy {
  double value;
  SubsetSolution solution;
};
EpsFreeEnergy eps_free_energy(const Distribution& q, const EnergyLevels& h,
                              const Bath& bath, double eps,
                              const SmoothingOptions& opts = {});

struct SmoothedRenyi0 {
  double bits;
  SubsetSolution solution;
};
SmoothedRenyi0 smoothed_renyi0(const Distribution& q, const Distribution& p,
                               double eps, const SmoothingOptions& opts = {});

}  // namespace worklab
