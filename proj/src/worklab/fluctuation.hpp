#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "worklab/process.hpp"
#include "worklab/random_variable.hpp"
#include "worklab/thermo.hpp"

namespace worklab {

struct CrooksReport {
  double w;
  double delta;
  double p_forward;  // P(|W - w| <= delta), start G(h_i)
  double p_reverse;  // P(|W_rev + w| <= delta), start G(h_f)
  std::optional<double> ratio;
  double lower;
  double upper;
  bool ok;
};

// Distinct forward work values plus midpoints between neighbours.
std::vector<double> default_w_grid(const Process& p, const Bath& bath,
                                   std::size_t path_cap = kDefaultAtomCap);

std::vector<CrooksReport> crooks_check(const Process& p, const Bath& bath,
                                       std::span<const double> w_grid, double delta,
                                       std::size_t path_cap = kDefaultAtomCap);
std::string crooks_csv(const std::vector<CrooksReport>& rows);

struct ThermalStartReport {
  double inf_delta;  // inf of the delta set of W, +inf when empty
  double bound;      // kT ln(1-eps) + F(h_f) - F(h_i) - delta
  double delta_f;
  bool holds;
};
ThermalStartReport thermal_start_bound(const Process& p, const Bath& bath, double eps,
                                       double delta,
                                       std::size_t atom_cap = kDefaultAtomCap);

// kT ln2 * sigma(q || G(h)).
double yield_fluctuation_sigma(const Distribution& q, const EnergyLevels& h,
                               const Bath& bath);

struct NoiseProbeRow {
  std::size_t L;
  double cutoff;
  double mean_yield;
  double stddev;
  double mass_within_radius;
};

// Exact yield law of the expected-extraction family over an (L, cutoff)
// grid. Mass is counted within `radius` of the values kT ln(q_n / G_n(h)).
std::vector<NoiseProbeRow> optimal_sequence_noise_probe(
    const Distribution& q, const EnergyLevels& h, const Bath& bath,
    std::span<const std::size_t> L_list, std::span<const double> cutoff_list,
    double radius, std::size_t atom_cap = kDefaultAtomCap);

std::vector<double> predicted_yields(const Distribution& q, const EnergyLevels& h,
                                     const Bath& bath);

}  // namespace worklab
