#include "worklab/builders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "worklab/error.hpp"
#include "worklab/numeric.hpp"

namespace worklab {

namespace {

std::vector<EnergyLevels> path_nodes(const EnergyLevels& h_i, const EnergyLevels& h_f,
                                     const std::vector<EnergyLevels>& via) {
  require(h_i.size() == h_f.size(), "ITR endpoints differ in dimension");
  std::vector<EnergyLevels> nodes{h_i};
  for (const auto& v : via) {
    require(v.size() == h_i.size(), "ITR path node has the wrong dimension");
    nodes.push_back(v);
  }
  nodes.push_back(h_f);
  return nodes;
}

EnergyLevels lerp(const EnergyLevels& a, const EnergyLevels& b, double t) {
  std::vector<double> out(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) out[n] = a[n] + t * (b[n] - a[n]);
  return EnergyLevels(std::move(out));
}

EnergyLevels point_on(const std::vector<EnergyLevels>& nodes, double x) {
  const std::size_t k = nodes.size() - 1;
  if (x <= 0.0) return nodes.front();
  if (x >= 1.0) return nodes.back();
  const double pos = x * static_cast<double>(k);
  const std::size_t seg = std::min(static_cast<std::size_t>(pos), k - 1);
  return lerp(nodes[seg], nodes[seg + 1], pos - static_cast<double>(seg));
}

// beta * standard deviation of dh/dx under G(h(x)).
double length_density(const std::vector<EnergyLevels>& nodes, double x,
                      const Bath& bath) {
  const std::size_t k = nodes.size() - 1;
  const double pos = std::clamp(x, 0.0, 1.0) * static_cast<double>(k);
  const std::size_t seg = std::min(static_cast<std::size_t>(pos), k - 1);
  const Distribution g = gibbs(point_on(nodes, x), bath);
  numeric::KahanSum m1, m2;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double d = static_cast<double>(k) * (nodes[seg + 1][n] - nodes[seg][n]);
    m1.add(g[n] * d);
    m2.add(g[n] * d * d);
  }
  const double var = std::max(m2.value() - m1.value() * m1.value(), 0.0);
  return bath.beta() * std::sqrt(var);
}

}  // namespace

EnergyLevels itr_path_point(const EnergyLevels& h_i, const EnergyLevels& h_f,
                            const std::vector<EnergyLevels>& via, double x) {
  return point_on(path_nodes(h_i, h_f, via), x);
}

std::vector<double> itr_parameters(const EnergyLevels& h_i, const EnergyLevels& h_f,
                                   std::size_t L, const Bath& bath,
                                   const ItrOptions& opts) {
  require(L >= 1, "ITR needs at least one step");
  std::vector<double> xs(L + 1);
  for (std::size_t l = 0; l <= L; ++l)
    xs[l] = static_cast<double>(l) / static_cast<double>(L);
  if (opts.schedule == ItrSchedule::uniform) return xs;

  const auto nodes = path_nodes(h_i, h_f, opts.via);
  const std::size_t grid = std::max<std::size_t>(4096, 16 * L) * (nodes.size() - 1);
  std::vector<double> s(grid + 1, 0.0);
  double prev = length_density(nodes, 0.0, bath);
  for (std::size_t g = 1; g <= grid; ++g) {
    const double x = static_cast<double>(g) / static_cast<double>(grid);
    const double cur = length_density(nodes, x, bath);
    s[g] = s[g - 1] + 0.5 * (prev + cur) / static_cast<double>(grid);
    prev = cur;
  }
  const double total = s.back();
  if (!(total > 0.0)) return xs;
  for (std::size_t l = 1; l < L; ++l) {
    const double target = total * static_cast<double>(l) / static_cast<double>(L);
    auto it = std::lower_bound(s.begin(), s.end(), target);
    const auto g = static_cast<std::size_t>(it - s.begin());
    const double s0 = s[g - 1], s1 = s[g];
    const double frac = s1 > s0 ? (target - s0) / (s1 - s0) : 0.0;
    xs[l] = (static_cast<double>(g - 1) + frac) / static_cast<double>(grid);
  }
  return xs;
}

Process build_itr(const EnergyLevels& h_i, const EnergyLevels& h_f, std::size_t L,
                  const Bath& bath, const ItrOptions& opts) {
  const auto nodes = path_nodes(h_i, h_f, opts.via);
  const auto xs = itr_parameters(h_i, h_f, L, bath, opts);
  std::vector<ProcessStep> steps;
  steps.reserve(2 * L);
  for (std::size_t l = 1; l <= L; ++l) {
    steps.emplace_back(Thermalization{});
    steps.emplace_back(LevelTransformation{l == L ? h_f : point_on(nodes, xs[l])});
  }
  return Process(h_i, std::move(steps));
}

EnergyLevels extraction_levels(const Distribution& q, const Bath& bath,
                               double m_cutoff) {
  require(std::isfinite(m_cutoff) && m_cutoff > 0.0, "m_cutoff must be positive");
  std::vector<double> h(q.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < q.size(); ++n)
    if (q[n] > 0.0) {
      h[n] = -bath.kT() * std::log(q[n]);
      top = std::max(top, h[n]);
    }
  for (std::size_t n = 0; n < q.size(); ++n)
    if (q[n] == 0.0) h[n] = top + m_cutoff;
  return EnergyLevels(std::move(h));
}

Process build_expected_extraction(const Distribution& q, const EnergyLevels& h,
                                  const Bath& bath, std::size_t L, double m_cutoff,
                                  const ItrOptions& opts) {
  require(q.size() == h.size(), "distribution and levels differ in dimension");
  const EnergyLevels hp = extraction_levels(q, bath, m_cutoff);
  return concatenate(Process(h, {LevelTransformation{hp}}),
                     build_itr(hp, h, L, bath, opts));
}

EpsExtraction build_eps_transfer(const Distribution& q, const EnergyLevels& h_i,
                                 const EnergyLevels& h_target, const Bath& bath,
                                 double eps, double E, std::size_t L,
                                 const ItrOptions& opts,
                                 const SmoothingOptions& smoothing) {
  require(std::isfinite(E) && E > 0.0, "lift energy E must be positive");
  require(h_target.size() == h_i.size(), "target levels differ in dimension");
  auto witness = eps_free_energy(q, h_i, bath, eps, smoothing).solution;
  std::vector<double> lifted = h_i.values();
  for (std::size_t n = 0; n < lifted.size(); ++n)
    if (!witness.lambda.contains(n)) lifted[n] += E;
  EnergyLevels hl(std::move(lifted));
  Process p = concatenate(Process(h_i, {LevelTransformation{hl}}),
                          build_itr(hl, h_target, L, bath, opts));
  return {std::move(p), std::move(witness), std::move(hl)};
}

EpsExtraction build_eps_extraction(const Distribution& q, const EnergyLevels& h,
                                   const Bath& bath, double eps, double E,
                                   std::size_t L, const ItrOptions& opts,
                                   const SmoothingOptions& smoothing) {
  return build_eps_transfer(q, h, h, bath, eps, E, L, opts, smoothing);
}

EnergyLevels erasure_deep_levels(const EnergyLevels& h_f, std::size_t s,
                                 double m_cutoff) {
  require(s < h_f.size(), "erasure target state out of range");
  std::vector<double> deep = h_f.values();
  deep[s] -= m_cutoff;
  return EnergyLevels(std::move(deep));
}

Process build_erasure(const Distribution& q, const EnergyLevels& h_i,
                      const EnergyLevels& h_f, const Bath& bath, std::size_t s,
                      double m_cutoff, std::size_t L, const ItrOptions& opts) {
  require(q.size() == h_i.size() && h_f.size() == h_i.size(),
          "erasure inputs differ in dimension");
  const EnergyLevels hp = extraction_levels(q, bath, m_cutoff);
  const EnergyLevels deep = erasure_deep_levels(h_f, s, m_cutoff);
  Process p = concatenate(Process(h_i, {LevelTransformation{hp}}),
                          build_itr(hp, deep, L, bath, opts));
  return concatenate(p, Process(deep, {Thermalization{}, LevelTransformation{h_f}}));
}

EpsErasure build_eps_erasure(const Distribution& q, const EnergyLevels& h_i,
                             const EnergyLevels& h_f, const Bath& bath,
                             std::size_t s, double eps, double tau, double E,
                             std::size_t L, const ItrOptions& opts) {
  require(h_f.size() >= 2, "erasure needs at least two states");
  require(s < h_f.size(), "erasure target state out of range");
  require(tau > 0.0 && tau < eps && eps < 1.0, "need 0 < tau < eps < 1");
  std::vector<double> others;
  for (std::size_t n = 0; n < h_f.size(); ++n)
    if (n != s) others.push_back(-bath.beta() * h_f[n]);
  const double lift = bath.kT() * std::log(1.0 / tau - 1.0) +
                      bath.kT() * (bath.beta() * h_f[s] + numeric::log_sum_exp(others));
  std::vector<double> hp = h_f.values();
  hp[s] -= lift;
  EnergyLevels target(std::move(hp));
  const double eps_bar = (eps - tau) / (1.0 - tau);
  auto transfer = build_eps_transfer(q, h_i, target, bath, eps_bar, E, L, opts);
  Process p = concatenate(transfer.process,
                          Process(target, {Thermalization{}, LevelTransformation{h_f}}));
  return {std::move(p), std::move(target), lift, eps_bar, std::move(transfer.witness)};
}

}  // namespace worklab
