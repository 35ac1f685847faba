#include "worklab/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "worklab/builders.hpp"
#include "worklab/entropy.hpp"
#include "worklab/error.hpp"
#include "worklab/numeric.hpp"

namespace worklab {

std::vector<double> default_w_grid(const Process& p, const Bath& bath,
                                   std::size_t path_cap) {
  const Distribution start = gibbs(p.initial_levels(), bath);
  std::vector<Atom> atoms;
  enumerate_paths(
      p, start, bath,
      [&](double prob, double work, const auto&) { atoms.push_back({work, prob}); },
      path_cap);
  const auto law = DiscreteRandomVariable::from_atoms(std::move(atoms));
  std::vector<double> grid;
  for (std::size_t i = 0; i < law.size(); ++i) {
    if (i > 0) grid.push_back(0.5 * (law.atoms()[i - 1].value + law.atoms()[i].value));
    grid.push_back(law.atoms()[i].value);
  }
  return grid;
}

namespace {

// Window masses P(|V - c| <= delta) at every grid point c, where V runs over
// the path values of an enumeration. Each window is summed directly so that
// an empty window is exactly zero.
std::vector<double> grid_masses(const Process& p, const Distribution& start,
                                const Bath& bath, std::span<const double> sorted_grid,
                                double delta, bool negate, std::size_t path_cap) {
  std::vector<Atom> atoms;
  enumerate_paths(
      p, start, bath,
      [&](double prob, double work, const auto&) {
        atoms.push_back({negate ? -work : work, prob});
      },
      path_cap);
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.value < y.value; });
  std::vector<double> out(sorted_grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double c = sorted_grid[i];
    auto lo = std::lower_bound(atoms.begin(), atoms.end(), c,
                               [&](const Atom& a, double v) { return a.value + delta < v; });
    numeric::KahanSum acc;
    for (auto it = lo; it != atoms.end() && it->value - delta <= c; ++it) acc.add(it->prob);
    out[i] = acc.value();
  }
  return out;
}

}  // namespace

std::vector<CrooksReport> crooks_check(const Process& p, const Bath& bath,
                                       std::span<const double> w_grid, double delta,
                                       std::size_t path_cap) {
  require(delta > 0.0 && std::isfinite(delta), "Crooks window delta must be positive");
  const Process fwd = normalize(p);
  const Process rev = reverse(fwd);
  const double delta_f =
      free_energy(final_levels(fwd), bath) - free_energy(fwd.initial_levels(), bath);

  std::vector<std::size_t> order(w_grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return w_grid[a] < w_grid[b]; });
  std::vector<double> sorted(w_grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = w_grid[order[i]];

  const auto pf = grid_masses(fwd, gibbs(fwd.initial_levels(), bath), bath, sorted,
                              delta, false, path_cap);
  const auto pr = grid_masses(rev, gibbs(rev.initial_levels(), bath), bath, sorted,
                              delta, true, path_cap);

  std::vector<CrooksReport> rows(w_grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double w = sorted[i];
    CrooksReport r{w, delta, pf[i], pr[i], std::nullopt,
                   std::exp(bath.beta() * (w - delta_f) - bath.beta() * delta),
                   std::exp(bath.beta() * (w - delta_f) + bath.beta() * delta), true};
    if (r.p_forward > 0.0 && r.p_reverse > 0.0) {
      r.ratio = r.p_forward / r.p_reverse;
      const double slack = 1e-12;
      r.ok = *r.ratio >= r.lower * (1.0 - slack) && *r.ratio <= r.upper * (1.0 + slack);
    } else if (r.p_forward > 0.0) {
      r.ok = false;
    }
    rows[order[i]] = r;
  }
  return rows;
}

std::string crooks_csv(const std::vector<CrooksReport>& rows) {
  std::string out = "w,delta,p_forward,p_reverse,ratio,lower,upper,ok\n";
  char buf[512];
  for (const auto& r : rows) {
    char ratio[64] = "";
    if (r.ratio) std::snprintf(ratio, sizeof ratio, "%.17g", *r.ratio);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%s,%.17g,%.17g,%s\n", r.w,
                  r.delta, r.p_forward, r.p_reverse, ratio, r.lower, r.upper,
                  r.ok ? "true" : "false");
    out += buf;
  }
  return out;
}

ThermalStartReport thermal_start_bound(const Process& p, const Bath& bath, double eps,
                                       double delta, std::size_t atom_cap) {
  const Distribution start = gibbs(p.initial_levels(), bath);
  const auto law = exact_work_distribution(p, start, bath, atom_cap).law;
  const double delta_f =
      free_energy(final_levels(p), bath) - free_energy(p.initial_levels(), bath);
  const double inf = delta_set(law, eps, delta).infimum;
  const double bound = bath.kT() * std::log1p(-eps) + delta_f - delta;
  return {inf, bound, delta_f, inf >= bound};
}

double yield_fluctuation_sigma(const Distribution& q, const EnergyLevels& h,
                               const Bath& bath) {
  return bath.kT() * numeric::kLn2 * relative_sigma(q, gibbs(h, bath));
}

std::vector<double> predicted_yields(const Distribution& q, const EnergyLevels& h,
                                     const Bath& bath) {
  const Distribution g = gibbs(h, bath);
  std::vector<double> out;
  for (std::size_t n = 0; n < q.size(); ++n)
    if (q[n] > 0.0) out.push_back(bath.kT() * std::log(q[n] / g[n]));
  return out;
}

std::vector<NoiseProbeRow> optimal_sequence_noise_probe(
    const Distribution& q, const EnergyLevels& h, const Bath& bath,
    std::span<const std::size_t> L_list, std::span<const double> cutoff_list,
    double radius, std::size_t atom_cap) {
  const auto targets = predicted_yields(q, h, bath);
  std::vector<NoiseProbeRow> rows;
  for (double cutoff : cutoff_list) {
    for (std::size_t L : L_list) {
      const Process p = build_expected_extraction(q, h, bath, L, cutoff);
      const auto yield = exact_work_distribution(p, q, bath, atom_cap).law.negated();
      numeric::KahanSum near;
      for (const Atom& a : yield.atoms()) {
        const bool hit = std::any_of(targets.begin(), targets.end(), [&](double t) {
          return std::abs(a.value - t) <= radius;
        });
        if (hit) near.add(a.prob);
      }
      rows.push_back({L, cutoff, yield.mean(), yield.stddev(), near.value()});
    }
  }
  return rows;
}

}  // namespace worklab
