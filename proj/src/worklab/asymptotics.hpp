#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "worklab/entropy.hpp"
#include "worklab/thermo.hpp"

namespace worklab {

double std_normal_cdf(double x);
// Solves cdf(x) = p to |cdf(x) - p| < 1e-12 (or to the last representable x).
double std_normal_quantile(double p);

inline constexpr double kBerryEsseenC = 0.4748;

struct IidInstance {
  Distribution q;
  Distribution r;
  std::size_t m;
  double eps;
};

// All outcomes with the same histogram share their per-outcome probabilities.
struct TypeClass {
  std::vector<std::size_t> counts;
  double log_multiplicity;
  double log_q;  // per outcome
  double log_r;  // per outcome
};

// Explicit m-fold product; letter of copy 0 is the most significant digit.
Distribution iid_power(const Distribution& q, std::size_t m);

inline constexpr std::size_t kTypeClassCap = 5'000'000;
std::vector<TypeClass> type_classes(const Distribution& q, const Distribution& r,
                                    std::size_t m,
                                    std::size_t cap = kTypeClassCap);

struct IidD0 {
  double bits;
  double kept_q_mass;
  Certificate certificate;
};
IidD0 d0_eps_iid_exact(const IidInstance& inst, double eta = 0.0);

struct ExpansionReport {
  std::size_t m;
  double exact;
  double first_order;
  double second_order;
  std::optional<double> lower;  // strict bound when sigma > 0
  std::optional<double> upper;
  double residual;  // (exact - first_order) / sqrt(m)
  double target;    // Phi^{-1}(eps) * sigma
  Certificate certificate;
};

struct ExpansionOptions {
  double berry_esseen_C = kBerryEsseenC;
  double eta = 0.0;
};

ExpansionReport d0_eps_expansion(const IidInstance& inst,
                                 const ExpansionOptions& opts = {});
std::string expansion_csv(const std::vector<ExpansionReport>& rows);

struct TypicalSetMasses {
  double over;   // q-mass of outcomes with ratio above 2^(x sigma sqrt(m) + m D)
  double under;  // q-mass of the complement
};
TypicalSetMasses typical_set_masses(const IidInstance& inst, double x);

struct IidWorkQuantities {
  double A_m;
  double sigma_m;
  double Aeps_second_order;
};
IidWorkQuantities iid_work_quantities(const Distribution& q, const EnergyLevels& h,
                                      const Bath& bath, std::size_t m, double eps);

}  // namespace worklab
