#pragma once

#include <cstddef>
#include <optional>

#include "worklab/entropy.hpp"
#include "worklab/thermo.hpp"

namespace worklab {

struct MixedFamilyQuantities {
  double A_leading;
  double sigma_leading;
  double Aeps_leading;  // meaningful for nu = eps <= 1/2
  double gibbs_x;       // G_x(h^m), should be small
  // Exact values on the explicit d^m-outcome product, when it fits.
  std::optional<double> A_exact;
  std::optional<double> sigma_exact;
  std::optional<double> Aeps_exact;  // kT ln2 D0^eps(q^m || G(h^m))
  std::optional<Certificate> certificate;
};

inline constexpr std::size_t kMixedExactOutcomeCap = std::size_t{1} << 16;

// q^m = (1 - nu) delta_x + nu G(h^m) with x = (s, ..., s) and h^m additive.
MixedFamilyQuantities mixed_family_quantities(const EnergyLevels& h_base,
                                              const Bath& bath, double nu,
                                              std::size_t s, std::size_t m,
                                              double eps);

struct SpectrumQuantities {
  double A;
  double sigma;
  double Aeps;  // kT ln2 D0^eps(uniform || G(h))
  Certificate certificate;
};

// Uniform q over the given levels.
SpectrumQuantities uniform_spectrum_quantities(const EnergyLevels& h, const Bath& bath,
                                               double eps);

// Quantile midpoints of the flat density on [-a, a].
EnergyLevels flat_levels(double a, std::size_t n);

struct FlatQuantities {
  SpectrumQuantities values;
  double A_ratio;      // A / a
  double sigma_ratio;  // sigma / (a / sqrt 3)
  double Aeps_ratio;   // Aeps / (2 eps a)
};
FlatQuantities flat_spectrum_quantities(double a, const Bath& bath, double eps,
                                        std::size_t n_samples);

// Semicircle law on [-1, 1] with density (2/pi) sqrt(1 - y^2).
double semicircle_cdf(double y);
double semicircle_quantile(double p);
EnergyLevels semicircle_levels(double R, std::size_t n);

struct WignerQuantities {
  SpectrumQuantities values;
  double A_ratio;      // A / R
  double sigma_ratio;  // sigma / R
  double Aeps_ratio;   // Aeps / R
  double c_eps;        // 1 + F^{-1}(eps)
  double c_lower;      // (3 pi eps / (4 sqrt 2))^(2/3)
  double c_upper;      // (3 pi eps / 4)^(2/3)
};
WignerQuantities wigner_quantities(double R, const Bath& bath, double eps,
                                   std::size_t n_samples);

}  // namespace worklab
