// Independent reference computations for the test suites. Nothing here calls
// into the solvers or process engine being checked.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <utility>
#include <variant>
#include <vector>

#include "worklab/process.hpp"

namespace oracle {

inline std::vector<long double> gibbs(const std::vector<double>& h, double kT) {
  const double lo = *std::min_element(h.begin(), h.end());
  std::vector<long double> w(h.size());
  long double z = 0;
  for (std::size_t n = 0; n < h.size(); ++n) {
    w[n] = std::exp(-static_cast<long double>(h[n] - lo) / kT);
    z += w[n];
  }
  for (auto& x : w) x /= z;
  return w;
}

inline long double log_z(const std::vector<double>& h, double kT) {
  const double lo = *std::min_element(h.begin(), h.end());
  long double z = 0;
  for (double x : h) z += std::exp(-static_cast<long double>(x - lo) / kT);
  return std::log(z) - lo / kT;
}

inline long double free_energy(const std::vector<double>& h, double kT) {
  return -kT * log_z(h, kT);
}

// min sum_{n in L} w_n over all L with sum_{n in L} q_n > threshold; returns
// +inf when no subset qualifies.
inline long double brute_force_min_weight(const std::vector<double>& q,
                                          const std::vector<long double>& w,
                                          long double threshold) {
  const std::size_t n = q.size();
  long double best = std::numeric_limits<long double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    long double mass = 0, weight = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1U) {
        mass += q[i];
        weight += w[i];
      }
    if (mass > threshold) best = std::min(best, weight);
  }
  return best;
}

// Every (probability, work) pair of a process, walking the raw step list.
inline std::vector<std::pair<double, double>> paths(const worklab::Process& p,
                                                    const std::vector<double>& q0,
                                                    double kT) {
  std::vector<std::pair<double, double>> out;
  const auto& steps = p.steps();
  std::function<void(std::size_t, std::vector<double>, std::size_t, long double,
                     long double)>
      walk = [&](std::size_t i, std::vector<double> h, std::size_t state,
                 long double prob, long double work) {
        if (i == steps.size()) {
          out.emplace_back(static_cast<double>(prob), static_cast<double>(work));
          return;
        }
        if (std::holds_alternative<worklab::Thermalization>(steps[i])) {
          const auto g = gibbs(h, kT);
          for (std::size_t n = 0; n < g.size(); ++n)
            if (g[n] > 0) walk(i + 1, h, n, prob * g[n], work);
          return;
        }
        const auto& target = std::get<worklab::LevelTransformation>(steps[i]).target.values();
        const long double inc = static_cast<long double>(target[state]) - h[state];
        walk(i + 1, target, state, prob, work + inc);
      };
  for (std::size_t n = 0; n < q0.size(); ++n)
    if (q0[n] > 0) walk(0, p.initial_levels().values(), n, q0[n], 0);
  return out;
}

// P(|X - c| <= delta) over a list of (prob, value) pairs.
inline long double window(const std::vector<std::pair<double, double>>& pv, double c,
                          double delta) {
  long double m = 0;
  for (const auto& [prob, v] : pv)
    if (std::abs(v - c) <= delta) m += prob;
  return m;
}

// D0^eps(q^m || uniform) in bits for q = (1 - p1, p1): the optimum keeps the
// fewest outcomes, taking type classes by decreasing q-probability.
inline double iid_uniform_d0_bits(double p1, std::size_t m, double eps) {
  const long double la = std::log(1.0L - p1), lb = std::log(static_cast<long double>(p1));
  std::vector<std::pair<long double, std::size_t>> classes;  // log prob, ones
  for (std::size_t k = 0; k <= m; ++k) classes.push_back({k * lb + (m - k) * la, k});
  std::sort(classes.begin(), classes.end(), std::greater<>());
  const long double need = 1.0L - eps;
  long double mass = 0, kept = 0;
  for (const auto& [lp, k] : classes) {
    const long double per = std::exp(lp);
    const long double count = std::round(std::exp(std::lgamma(m + 1.0L) - std::lgamma(k + 1.0L) -
                                                  std::lgamma(m - k + 1.0L)));
    if (mass + count * per > need) {
      long double c = std::floor((need - mass) / per) + 1;
      while (c > 1 && mass + (c - 1) * per > need) --c;
      return static_cast<double>(m - std::log2(kept + c));
    }
    mass += count * per;
    kept += count;
  }
  return static_cast<double>(m - std::log2(kept));
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Composite Simpson integral of the semicircle density on [-1, y].
inline double semicircle_cdf(double y, int panels = 20000) {
  if (y <= -1) return 0;
  if (y >= 1) return 1;
  // u = asin(t) removes the square-root endpoint singularity.
  const double a = -M_PI / 2, b = std::asin(y);
  const double hstep = (b - a) / panels;
  auto f = [](double u) { return (2.0 / M_PI) * std::cos(u) * std::cos(u); };
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4 : 2) * f(a + i * hstep);
  return s * hstep / 3;
}

inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n,
                                          double zero_prob = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  double sum = 0;
  for (auto& x : v) {
    x = u(rng) < zero_prob ? 0.0 : -std::log(1.0 - u(rng));
    sum += x;
  }
  if (sum == 0) {
    v[0] = 1;
    sum = 1;
  }
  for (auto& x : v) x /= sum;
  return v;
}

inline std::vector<double> random_levels(std::mt19937_64& rng, std::size_t n,
                                         double spread = 2.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace oracle
