#include "worklab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "worklab/error.hpp"
#include "worklab/numeric.hpp"

namespace worklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_support(const Distribution& q, const Distribution& p) {
  require(q.size() == p.size(), "distributions differ in dimension");
  for (std::size_t n = 0; n < q.size(); ++n)
    if (q[n] > 0.0 && p[n] == 0.0)
      fail(ErrorCode::domain, "support of q is not contained in support of p");
}

std::vector<double> log_ratios(const Distribution& q, const Distribution& p) {
  check_support(q, p);
  std::vector<double> out(q.size(), 0.0);
  for (std::size_t n = 0; n < q.size(); ++n)
    if (q[n] > 0.0) out[n] = std::log2(q[n] / p[n]);
  return out;
}

double central_moment(const Distribution& q, const std::vector<double>& x,
                      double power) {
  numeric::KahanSum mean;
  for (std::size_t n = 0; n < q.size(); ++n)
    if (q[n] > 0.0) mean.add(q[n] * x[n]);
  numeric::KahanSum acc;
  for (std::size_t n = 0; n < q.size(); ++n)
    if (q[n] > 0.0) acc.add(q[n] * std::pow(std::abs(x[n] - mean.value()), power));
  return acc.value();
}

}  // namespace

double shannon_entropy(const Distribution& q) {
  numeric::KahanSum acc;
  for (double x : q.probs())
    if (x > 0.0) acc.add(-x * std::log2(x));
  return acc.value();
}

double relative_entropy(const Distribution& q, const Distribution& p) {
  const auto lr = log_ratios(q, p);
  numeric::KahanSum acc;
  for (std::size_t n = 0; n < q.size(); ++n)
    if (q[n] > 0.0) acc.add(q[n] * lr[n]);
  return std::max(acc.value(), 0.0);
}

double relative_sigma(const Distribution& q, const Distribution& p) {
  return std::sqrt(central_moment(q, log_ratios(q, p), 2.0));
}

double relative_rho(const Distribution& q, const Distribution& p) {
  return central_moment(q, log_ratios(q, p), 3.0);
}

double renyi0(const Distribution& q, const Distribution& p) {
  require(q.size() == p.size(), "distributions differ in dimension");
  numeric::KahanSum acc;
  for (std::size_t n = 0; n < q.size(); ++n)
    if (q[n] > 0.0) acc.add(p[n]);
  return -std::log2(acc.value());
}

double expected_work_content(const Distribution& q, const EnergyLevels& h,
                             const Bath& bath) {
  require(q.size() == h.size(), "distribution and levels differ in dimension");
  return bath.kT() * numeric::kLn2 * relative_entropy(q, gibbs(h, bath));
}

std::string to_string(Certificate c) {
  switch (c) {
    case Certificate::exhaustive: return "exhaustive";
    case Certificate::type_class: return "type-class";
    case Certificate::branch_and_bound: return "branch-and-bound";
    case Certificate::sorted_exact: return "sorted-exact";
    case Certificate::greedy_upper_bound: return "greedy-upper-bound";
  }
  return "unknown";
}

nlohmann::json SubsetSolution::to_json() const {
  nlohmann::json j;
  j["lambda"] = lambda.members();
  j["objective"] = objective;
  j["log_objective"] = log_objective;
  j["kept_mass"] = kept_mass;
  j["certificate"] = to_string(certificate);
  j["eps"] = eps;
  j["eta"] = eta;
  if (nodes > 0) j["nodes"] = nodes;
  return j;
}

namespace {

struct Problem {
  const Distribution& q;
  std::span<const double> lw;  // natural-log weights
  double threshold;            // kept q-mass must exceed this
  std::vector<std::size_t> positive;
};

double kept_q(const Problem& pr, const std::vector<std::size_t>& kept) {
  numeric::KahanSum acc;
  for (std::size_t n : kept) acc.add(pr.q[n]);
  return acc.value();
}

double kept_log_weight(const Problem& pr, const std::vector<std::size_t>& kept) {
  std::vector<double> args;
  args.reserve(kept.size());
  for (std::size_t n : kept) args.push_back(pr.lw[n]);
  return numeric::log_sum_exp(args);
}

SubsetSolution finish(const Problem& pr, std::vector<std::size_t> kept,
                      Certificate cert, double eps, double eta,
                      std::size_t nodes = 0) {
  const double lo = kept_log_weight(pr, kept);
  const double mass = kept_q(pr, kept);
  return SubsetSolution{EventSet(std::move(kept), pr.q.size()),
                        std::exp(lo), lo, mass, cert, eps, eta, nodes};
}

std::vector<std::size_t> exhaustive(const Problem& pr) {
  const std::size_t k = pr.positive.size();
  std::vector<std::size_t> best;
  double best_lw = kInf;
  std::vector<double> args;
  args.reserve(k);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
    numeric::KahanSum mass;
    for (std::size_t b = 0; b < k; ++b)
      if (mask >> b & 1U) mass.add(pr.q[pr.positive[b]]);
    if (!(mass.value() > pr.threshold)) continue;
    args.clear();
    for (std::size_t b = 0; b < k; ++b)
      if (mask >> b & 1U) args.push_back(pr.lw[pr.positive[b]]);
    const double lw = numeric::log_sum_exp(args);
    if (lw < best_lw) {
      best_lw = lw;
      best.clear();
      for (std::size_t b = 0; b < k; ++b)
        if (mask >> b & 1U) best.push_back(pr.positive[b]);
    }
  }
  return best;
}

// Items in removal-priority order: largest weight per unit of q first.
std::vector<std::size_t> ratio_order(const Problem& pr) {
  std::vector<std::size_t> order = pr.positive;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ra = pr.lw[a] - std::log(pr.q[a]), rb = pr.lw[b] - std::log(pr.q[b]);
    return ra != rb ? ra > rb : pr.q[a] > pr.q[b];
  });
  return order;
}

std::vector<std::size_t> complement_of(const Problem& pr,
                                       const std::vector<char>& removed) {
  std::vector<std::size_t> kept;
  for (std::size_t n : pr.positive)
    if (!removed[n]) kept.push_back(n);
  return kept;
}

// Greedy removal in ratio order; with `fill` it keeps scanning after the
// first item that does not fit.
std::vector<char> greedy_removal(const Problem& pr,
                                 const std::vector<std::size_t>& order,
                                 bool fill) {
  std::vector<char> removed(pr.q.size(), 0);
  numeric::KahanSum total;
  for (std::size_t n : pr.positive) total.add(pr.q[n]);
  numeric::KahanSum gone;
  for (std::size_t n : order) {
    if (total.value() - (gone.value() + pr.q[n]) > pr.threshold) {
      gone.add(pr.q[n]);
      removed[n] = 1;
    } else if (!fill) {
      break;
    }
  }
  return removed;
}

struct BranchAndBound {
  const Problem& pr;
  std::vector<double> q, w;         // sorted by ratio
  std::vector<double> pq, pw;       // prefix sums
  std::vector<char> take, best_take;
  std::vector<char> twin;  // item i equals item i-1
  double best = -1.0;
  std::size_t nodes = 0;
  std::size_t node_limit;
  bool exhausted = false;

  double bound(std::size_t i, double cap, double value) const {
    if (cap <= 0.0) return value;
    // Largest j with pq[j] - pq[i] < cap.
    const double target = pq[i] + cap;
    auto it = std::lower_bound(pq.begin() + static_cast<std::ptrdiff_t>(i),
                               pq.end(), target);
    std::size_t j = static_cast<std::size_t>(it - pq.begin()) - 1;
    double b = value + (pw[j] - pw[i]);
    if (j < q.size()) b += w[j] * (cap - (pq[j] - pq[i])) / q[j];
    return b;
  }

  void search(std::size_t i, double cap, double value) {
    if (exhausted) return;
    if (++nodes > node_limit) {
      exhausted = true;
      return;
    }
    if (i == q.size()) {
      if (value > best) {
        best = value;
        best_take = take;
      }
      return;
    }
    if (bound(i, cap, value) <= best) return;
    // Identical items are taken in order, so a skipped twin blocks the rest.
    const bool blocked = twin[i] && !take[i - 1];
    if (q[i] < cap && !blocked) {
      take[i] = 1;
      search(i + 1, cap - q[i], value + w[i]);
      take[i] = 0;
    }
    search(i + 1, cap, value);
  }
};

}  // namespace

SubsetSolution min_weight_event(const Distribution& q,
                                std::span<const double> weights, double eps,
                                const SmoothingOptions& opts) {
  require(eps > 0.0 && eps <= 1.0, "smoothing parameter eps must lie in (0,1]");
  require(opts.eta >= 0.0, "slack eta must be non-negative");
  require(weights.size() == q.size(), "weights and distribution differ in dimension");
  Problem pr{q, weights, (1.0 - eps) + opts.eta, {}};
  for (std::size_t n = 0; n < q.size(); ++n)
    if (q[n] > 0.0) pr.positive.push_back(n);
  if (!(kept_q(pr, pr.positive) > pr.threshold))
    fail(ErrorCode::domain, "no event satisfies q(Lambda) > 1 - eps + eta");

  if (pr.positive.size() <= opts.exhaustive_limit)
    return finish(pr, exhaustive(pr), Certificate::exhaustive, eps, opts.eta);

  const auto order = ratio_order(pr);
  auto all_equal = [&](auto value) {
    const double first = value(pr.positive.front());
    return std::all_of(pr.positive.begin(), pr.positive.end(),
                       [&](std::size_t n) { return value(n) == first; });
  };
  if (all_equal([&](std::size_t n) { return q[n]; }) ||
      all_equal([&](std::size_t n) { return weights[n]; })) {
    auto removed = greedy_removal(pr, order, false);
    return finish(pr, complement_of(pr, removed), Certificate::sorted_exact, eps,
                  opts.eta);
  }

  // Knapsack over removed items, in weights shifted by the largest log-weight.
  const double shift = *std::max_element(weights.begin(), weights.end());
  BranchAndBound bb{pr, {}, {}, {0.0}, {0.0}, {}, {}, {}, -1.0, 0, opts.node_limit};
  for (std::size_t n : order) {
    const double wn = std::exp(weights[n] - shift);
    bb.twin.push_back(!bb.q.empty() && bb.q.back() == q[n] && bb.w.back() == wn);
    bb.q.push_back(q[n]);
    bb.w.push_back(wn);
    bb.pq.push_back(bb.pq.back() + bb.q.back());
    bb.pw.push_back(bb.pw.back() + bb.w.back());
  }
  numeric::KahanSum total;
  for (std::size_t n : pr.positive) total.add(q[n]);
  const double budget = total.value() - pr.threshold;

  auto greedy = greedy_removal(pr, order, true);
  bb.take.assign(order.size(), 0);
  bb.best_take.assign(order.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i)
    if (greedy[order[i]]) {
      bb.best_take[i] = 1;
      bb.best = std::max(bb.best, 0.0) + bb.w[i];
    }
  bb.search(0, budget, 0.0);

  std::vector<char> removed(q.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i)
    if (bb.best_take[i]) removed[order[i]] = 1;
  auto kept = complement_of(pr, removed);
  Certificate cert = bb.exhausted ? Certificate::greedy_upper_bound
                                  : Certificate::branch_and_bound;
  // Rounding in the running budget can leave the chosen set marginally
  // infeasible; restore the lowest-priority removals until it is not.
  for (auto it = order.rbegin(); !(kept_q(pr, kept) > pr.threshold); ++it) {
    if (!removed[*it]) continue;
    removed[*it] = 0;
    kept = complement_of(pr, removed);
    cert = Certificate::greedy_upper_bound;
  }
  return finish(pr, std::move(kept), cert, eps, opts.eta, bb.nodes);
}

EpsFreeEnergy eps_free_energy(const Distribution& q, const EnergyLevels& h,
                              const Bath& bath, double eps,
                              const SmoothingOptions& opts) {
  require(q.size() == h.size(), "distribution and levels differ in dimension");
  std::vector<double> lw(h.size());
  for (std::size_t n = 0; n < h.size(); ++n) lw[n] = -bath.beta() * h[n];
  SubsetSolution sol = min_weight_event(q, lw, eps, opts);
  return {-bath.kT() * sol.log_objective, std::move(sol)};
}

SmoothedRenyi0 smoothed_renyi0(const Distribution& q, const Distribution& p,
                               double eps, const SmoothingOptions& opts) {
  require(q.size() == p.size(), "distributions differ in dimension");
  std::vector<double> lw(p.size());
  for (std::size_t n = 0; n < p.size(); ++n)
    lw[n] = p[n] > 0.0 ? std::log(p[n]) : -kInf;
  SubsetSolution sol = min_weight_event(q, lw, eps, opts);
  return {0.0 - sol.log_objective / numeric::kLn2, std::move(sol)};
}

}  // namespace worklab
