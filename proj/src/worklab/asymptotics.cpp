#include "worklab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

#include "worklab/error.hpp"
#include "worklab/numeric.hpp"

namespace worklab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    fail(ErrorCode::domain, "normal quantile needs p in (0,1)");
  const double seed = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
  double step = 1e-6 * std::max(1.0, std::abs(seed));
  double lo = seed - step, hi = seed + step;
  while (std_normal_cdf(lo) > p) lo -= (step *= 2.0);
  step = 1e-6 * std::max(1.0, std::abs(seed));
  while (std_normal_cdf(hi) < p) hi += (step *= 2.0);
  double x = seed;
  for (int it = 0; it < 200; ++it) {
    if (std::abs(std_normal_cdf(x) - p) < 1e-12 && hi - lo < 1e-14 * std::max(1.0, std::abs(x)))
      break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (std_normal_cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
    x = 0.5 * (lo + hi);
  }
  return x;
}

std::vector<TypeClass> type_classes(const Distribution& q, const Distribution& r,
                                    std::size_t m, std::size_t cap) {
  require(q.size() == r.size(), "iid base distributions differ in dimension");
  require(m >= 1, "iid copy count must be at least 1");
  const std::size_t d = q.size();
  std::vector<double> lq(d), lr(d);
  for (std::size_t i = 0; i < d; ++i) {
    lq[i] = q[i] > 0.0 ? std::log(q[i]) : -kInf;
    lr[i] = r[i] > 0.0 ? std::log(r[i]) : -kInf;
  }
  const double lg_m = std::lgamma(static_cast<double>(m) + 1.0);
  std::vector<TypeClass> out;
  std::vector<std::size_t> counts(d, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
    if (i + 1 == d) {
      counts[i] = left;
      TypeClass c{counts, lg_m, 0.0, 0.0};
      for (std::size_t k = 0; k < d; ++k) {
        const double ck = static_cast<double>(counts[k]);
        c.log_multiplicity -= std::lgamma(ck + 1.0);
        if (counts[k] > 0) {
          c.log_q += ck * lq[k];
          c.log_r += ck * lr[k];
        }
      }
      if (out.size() >= cap)
        fail(ErrorCode::cap_exceeded, "type-class count exceeds the cap");
      out.push_back(std::move(c));
      return;
    }
    for (std::size_t k = 0; k <= left; ++k) {
      counts[i] = k;
      rec(i + 1, left - k);
    }
  };
  rec(0, m);
  return out;
}

Distribution iid_power(const Distribution& q, std::size_t m) {
  const std::size_t d = q.size();
  std::size_t total = 1;
  for (std::size_t k = 0; k < m; ++k) total *= d;
  // Each outcome's probability is built from its letter counts, so outcomes
  // of the same type get bit-identical values.
  std::vector<double> out(total);
  std::vector<std::size_t> counts(d);
  for (std::size_t x = 0; x < total; ++x) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t rest = x, k = 0; k < m; ++k, rest /= d) ++counts[rest % d];
    double p = 1.0;
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t c = 0; c < counts[a]; ++c) p *= q[a];
    out[x] = p;
  }
  return Distribution(std::move(out));
}

// Beyond 2^52 a double no longer separates consecutive integers.
constexpr double kLogExactInt = 52 * numeric::kLn2;

IidD0 d0_eps_iid_exact(const IidInstance& inst, double eta) {
  require(inst.eps > 0.0 && inst.eps < 1.0, "iid smoothing needs eps in (0,1)");
  const std::size_t d = inst.q.size();
  double outcomes = std::pow(static_cast<double>(d), static_cast<double>(inst.m));
  if (outcomes <= 20.0) {
    auto s = smoothed_renyi0(iid_power(inst.q, inst.m), iid_power(inst.r, inst.m),
                             inst.eps, {eta});
    return {s.bits, s.solution.kept_mass, s.solution.certificate};
  }

  auto classes = type_classes(inst.q, inst.r, inst.m);
  std::stable_sort(classes.begin(), classes.end(), [](const TypeClass& a, const TypeClass& b) {
    const double ra = a.log_q == -kInf ? kInf : a.log_r - a.log_q;
    const double rb = b.log_q == -kInf ? kInf : b.log_r - b.log_q;
    return ra > rb;
  });

  const double budget = inst.eps - eta;
  numeric::KahanSum removed;
  numeric::KahanSum kept_q;
  std::vector<double> kept_terms;
  std::optional<double> partial_log_r;
  bool equal_r = true;
  std::optional<double> common_r;
  for (const auto& c : classes) {
    if (c.log_q == -kInf) continue;  // free to remove
    if (!common_r) common_r = c.log_r;
    if (c.log_r != *common_r) equal_r = false;

    // Counts are tracked as logs; binomial multiplicities overflow double
    // long before m reaches a few thousand.
    const double room = budget - removed.value();
    double log_k = -kInf;
    bool all = false;
    if (room > 0.0) {
      const double log_room = std::log(room);
      if (c.log_multiplicity + c.log_q < log_room) {
        all = true;
      } else if (const double log_t = log_room - c.log_q; log_t < kLogExactInt) {
        const double t = std::exp(log_t);
        const double k = t == std::floor(t) ? t - 1.0 : std::floor(t);
        if (k > 0.0) log_k = std::log(k);
      } else {
        log_k = log_t;
      }
    }
    if (all) {
      removed.add(std::exp(c.log_multiplicity + c.log_q));
      continue;
    }
    if (!partial_log_r) partial_log_r = c.log_r;
    if (log_k > -kInf) removed.add(std::exp(log_k + c.log_q));
    const double log_kept_count =
        log_k == -kInf ? c.log_multiplicity
                       : c.log_multiplicity + std::log1p(-std::exp(log_k - c.log_multiplicity));
    kept_terms.push_back(log_kept_count + c.log_r);
    kept_q.add(std::exp(log_kept_count + c.log_q));
  }
  const double log_kept = numeric::log_sum_exp(kept_terms);
  Certificate cert = Certificate::greedy_upper_bound;
  if (equal_r || !partial_log_r || *partial_log_r - log_kept < std::log(1e-12))
    cert = Certificate::type_class;
  return {-log_kept / numeric::kLn2, kept_q.value(), cert};
}

ExpansionReport d0_eps_expansion(const IidInstance& inst, const ExpansionOptions& opts) {
  const double D = relative_entropy(inst.q, inst.r);
  const double sigma = relative_sigma(inst.q, inst.r);
  const double rho = relative_rho(inst.q, inst.r);
  const double m = static_cast<double>(inst.m);
  const double sm = std::sqrt(m);
  const auto exact = d0_eps_iid_exact(inst, opts.eta);

  ExpansionReport rep{};
  rep.m = inst.m;
  rep.exact = exact.bits;
  rep.first_order = m * D;
  rep.target = std_normal_quantile(inst.eps) * sigma;
  rep.second_order = m * D + sm * rep.target;
  rep.residual = (rep.exact - rep.first_order) / sm;
  rep.certificate = exact.certificate;

  if (sigma <= 1e-14) {
    rep.lower = m * D;
    rep.upper = m * D - std::log2(1.0 - inst.eps);
    return rep;
  }
  const double be = opts.berry_esseen_C * rho / (sigma * sigma * sigma * sm);
  const double py = inst.eps - be - 1.0 / m;
  if (py > 0.0 && py < 1.0) {
    const double y = std_normal_quantile(py);
    const double arg = 1.0 - std_normal_cdf(y) + be;
    rep.lower = m * D + y * sigma * sm - std::log2(arg);
  }
  const double px = inst.eps + be + 1.0 / m;
  if (px > 0.0 && px < 1.0) {
    const double x = std_normal_quantile(px);
    const double arg = std_normal_cdf(x) - inst.eps - be;
    if (arg > 0.0) rep.upper = m * D + x * sigma * sm - std::log2(arg);
  }
  return rep;
}

std::string expansion_csv(const std::vector<ExpansionReport>& rows) {
  std::string out = "m,exact,first,second,lower,upper,residual\n";
  char buf[512];
  for (const auto& r : rows) {
    char lo[64] = "", up[64] = "";
    if (r.lower) std::snprintf(lo, sizeof lo, "%.17g", *r.lower);
    if (r.upper) std::snprintf(up, sizeof up, "%.17g", *r.upper);
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%s,%s,%.17g\n", r.m, r.exact,
                  r.first_order, r.second_order, lo, up, r.residual);
    out += buf;
  }
  return out;
}

TypicalSetMasses typical_set_masses(const IidInstance& inst, double x) {
  const double D = relative_entropy(inst.q, inst.r);
  const double sigma = relative_sigma(inst.q, inst.r);
  require(sigma > 0.0, "typical sets need sigma(q||r) > 0");
  const double m = static_cast<double>(inst.m);
  const double threshold = x * sigma * std::sqrt(m) + m * D;  // bits
  numeric::KahanSum over, under;
  for (const auto& c : type_classes(inst.q, inst.r, inst.m)) {
    if (c.log_q == -kInf) continue;
    const double mass = std::exp(c.log_multiplicity + c.log_q);
    const double log2_ratio = (c.log_q - c.log_r) / numeric::kLn2;
    if (log2_ratio > threshold)
      over.add(mass);
    else
      under.add(mass);
  }
  return {over.value(), under.value()};
}

IidWorkQuantities iid_work_quantities(const Distribution& q, const EnergyLevels& h,
                                      const Bath& bath, std::size_t m, double eps) {
  require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
  const Distribution g = gibbs(h, bath);
  const double scale = bath.kT() * numeric::kLn2;
  const double D = relative_entropy(q, g);
  const double sigma = relative_sigma(q, g);
  const double md = static_cast<double>(m);
  return {md * scale * D, std::sqrt(md) * scale * sigma,
          scale * (md * D + std::sqrt(md) * std_normal_quantile(eps) * sigma)};
}

}  // namespace worklab
