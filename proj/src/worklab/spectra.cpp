#include "worklab/spectra.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "worklab/asymptotics.hpp"
#include "worklab/error.hpp"
#include "worklab/numeric.hpp"

namespace worklab {

MixedFamilyQuantities mixed_family_quantities(const EnergyLevels& h_base,
                                              const Bath& bath, double nu,
                                              std::size_t s, std::size_t m,
                                              double eps) {
  require(nu >= 0.0 && nu <= 1.0, "mixing weight nu must lie in [0,1]");
  require(s < h_base.size(), "mixed-family state index out of range");
  require(m >= 1, "copy count must be at least 1");
  const Distribution g = gibbs(h_base, bath);
  const double scale = bath.kT() * numeric::kLn2;
  const double log2_gx = static_cast<double>(m) * std::log2(g[s]);

  MixedFamilyQuantities out{};
  out.A_leading = -(1.0 - nu) * scale * log2_gx;
  out.sigma_leading = -scale * std::sqrt(nu * (1.0 - nu)) * log2_gx;
  out.Aeps_leading = -scale * log2_gx;
  out.gibbs_x = std::exp2(log2_gx);

  const double outcomes = std::pow(static_cast<double>(h_base.size()), static_cast<double>(m));
  if (outcomes > static_cast<double>(kMixedExactOutcomeCap)) return out;

  const Distribution gm = iid_power(g, m);
  std::size_t x = 0;
  for (std::size_t k = 0; k < m; ++k) x = x * h_base.size() + s;
  std::vector<double> qm(gm.size());
  for (std::size_t n = 0; n < gm.size(); ++n) qm[n] = nu * gm[n];
  qm[x] += 1.0 - nu;
  const Distribution q(std::move(qm));
  out.A_exact = scale * relative_entropy(q, gm);
  out.sigma_exact = scale * relative_sigma(q, gm);
  auto d0 = smoothed_renyi0(q, gm, eps);
  out.Aeps_exact = scale * d0.bits;
  out.certificate = d0.solution.certificate;
  return out;
}

SpectrumQuantities uniform_spectrum_quantities(const EnergyLevels& h, const Bath& bath,
                                               double eps) {
  const Distribution u = Distribution::uniform(h.size());
  const Distribution g = gibbs(h, bath);
  const double scale = bath.kT() * numeric::kLn2;
  auto d0 = smoothed_renyi0(u, g, eps);
  return {scale * relative_entropy(u, g), scale * relative_sigma(u, g), scale * d0.bits,
          d0.solution.certificate};
}

EnergyLevels flat_levels(double a, std::size_t n) {
  require(a > 0.0 && std::isfinite(a), "flat half-width a must be positive");
  require(n >= 2, "spectral sample count must be at least 2");
  std::vector<double> h(n);
  for (std::size_t k = 0; k < n; ++k)
    h[k] = -a + 2.0 * a * (static_cast<double>(k) + 0.5) / static_cast<double>(n);
  return EnergyLevels(std::move(h));
}

FlatQuantities flat_spectrum_quantities(double a, const Bath& bath, double eps,
                                        std::size_t n_samples) {
  const auto v = uniform_spectrum_quantities(flat_levels(a, n_samples), bath, eps);
  return {v, v.A / a, v.sigma / (a / std::sqrt(3.0)), v.Aeps / (2.0 * eps * a)};
}

double semicircle_cdf(double y) {
  if (y <= -1.0) return 0.0;
  if (y >= 1.0) return 1.0;
  return 0.5 + (y * std::sqrt(1.0 - y * y) + std::asin(y)) / std::numbers::pi;
}

double semicircle_quantile(double p) {
  require(p >= 0.0 && p <= 1.0, "semicircle quantile needs p in [0,1]");
  double lo = -1.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (semicircle_cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

EnergyLevels semicircle_levels(double R, std::size_t n) {
  require(R > 0.0 && std::isfinite(R), "semicircle radius R must be positive");
  require(n >= 2, "spectral sample count must be at least 2");
  std::vector<double> h(n);
  for (std::size_t k = 0; k < n; ++k)
    h[k] = R * semicircle_quantile((static_cast<double>(k) + 0.5) / static_cast<double>(n));
  return EnergyLevels(std::move(h));
}

WignerQuantities wigner_quantities(double R, const Bath& bath, double eps,
                                   std::size_t n_samples) {
  require(eps > 0.0 && eps < 0.5, "Wigner case study needs eps in (0, 1/2)");
  const auto v = uniform_spectrum_quantities(semicircle_levels(R, n_samples), bath, eps);
  const double pi = std::numbers::pi;
  return {v,
          v.A / R,
          v.sigma / R,
          v.Aeps / R,
          1.0 + semicircle_quantile(eps),
          std::pow(3.0 * pi * eps / (4.0 * std::sqrt(2.0)), 2.0 / 3.0),
          std::pow(3.0 * pi * eps / 4.0, 2.0 / 3.0)};
}

}  // namespace worklab
