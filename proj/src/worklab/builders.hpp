#pragma once

#include <cstddef>
#include <vector>

#include "worklab/entropy.hpp"
#include "worklab/process.hpp"
#include "worklab/thermo.hpp"

namespace worklab {

// Step placement along the path: equal parameter steps, or equal steps of
// thermodynamic length (beta * std of dh/dx under the Gibbs state).
enum class ItrSchedule { uniform, equal_length };

struct ItrOptions {
  ItrSchedule schedule = ItrSchedule::uniform;
  // Interior configurations of a piecewise-linear path; empty means the
  // straight line from h_i to h_f.
  std::vector<EnergyLevels> via;
};

inline constexpr double kDefaultCutoffKT = 50.0;

// Parameters 0 = x_0 < ... < x_L = 1 at which the ITR thermalizes.
std::vector<double> itr_parameters(const EnergyLevels& h_i, const EnergyLevels& h_f,
                                   std::size_t L, const Bath& bath,
                                   const ItrOptions& opts = {});
EnergyLevels itr_path_point(const EnergyLevels& h_i, const EnergyLevels& h_f,
                            const std::vector<EnergyLevels>& via, double x);

// [Therm, LT(h(x_1)), Therm, LT(h(x_2)), ..., Therm, LT(h_f)] from h_i.
Process build_itr(const EnergyLevels& h_i, const EnergyLevels& h_f, std::size_t L,
                  const Bath& bath, const ItrOptions& opts = {});

// h'_n = -kT ln q_n; states with q_n = 0 sit m_cutoff above the highest
// finite h'_n.
EnergyLevels extraction_levels(const Distribution& q, const Bath& bath,
                               double m_cutoff);

// LT to h', Therm, ITR back to h.
Process build_expected_extraction(const Distribution& q, const EnergyLevels& h,
                                  const Bath& bath, std::size_t L, double m_cutoff,
                                  const ItrOptions& opts = {});

struct EpsExtraction {
  Process process;
  SubsetSolution witness;
  EnergyLevels lifted;
};

// Lift the complement of the eps-free-energy witness by E, Therm, ITR to
// h_target.
EpsExtraction build_eps_transfer(const Distribution& q, const EnergyLevels& h_i,
                                 const EnergyLevels& h_target, const Bath& bath,
                                 double eps, double E, std::size_t L,
                                 const ItrOptions& opts = {},
                                 const SmoothingOptions& smoothing = {});
EpsExtraction build_eps_extraction(const Distribution& q, const EnergyLevels& h,
                                   const Bath& bath, double eps, double E,
                                   std::size_t L, const ItrOptions& opts = {},
                                   const SmoothingOptions& smoothing = {});

// h'' = h_f - m_cutoff * e_s.
EnergyLevels erasure_deep_levels(const EnergyLevels& h_f, std::size_t s,
                                 double m_cutoff);

// LT to h', Therm, ITR to h'', Therm, LT to h_f.
Process build_erasure(const Distribution& q, const EnergyLevels& h_i,
                      const EnergyLevels& h_f, const Bath& bath, std::size_t s,
                      double m_cutoff, std::size_t L,
                      const ItrOptions& opts = {ItrSchedule::equal_length, {}});

struct EpsErasure {
  Process process;
  EnergyLevels target;  // h' with G_s(h') = 1 - tau
  double lift;          // E_tau = h_f[s] - h'[s]
  double eps_bar;       // (eps - tau) / (1 - tau)
  SubsetSolution witness;
};

// Eps-deterministic transfer to h' at eps_bar, Therm, LT to h_f.
EpsErasure build_eps_erasure(const Distribution& q, const EnergyLevels& h_i,
                             const EnergyLevels& h_f, const Bath& bath,
                             std::size_t s, double eps, double tau, double E,
                             std::size_t L, const ItrOptions& opts = {});

}  // namespace worklab
