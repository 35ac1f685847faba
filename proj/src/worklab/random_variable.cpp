#include "worklab/random_variable.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>

#include "worklab/error.hpp"
#include "worklab/numeric.hpp"

namespace worklab {

bool values_merge(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1.0});
  return std::abs(a - b) <= DiscreteRandomVariable::kMergeTolerance * scale;
}

namespace {

// Appends (v, p) to a value-sorted list, merging into the last group.
void push_merged(std::vector<Atom>& out, double v, double p) {
  if (!out.empty() && values_merge(out.back().value, v))
    out.back().prob += p;
  else
    out.push_back({v, p});
}

}  // namespace

DiscreteRandomVariable DiscreteRandomVariable::from_atoms(std::vector<Atom> atoms) {
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.value) || !std::isfinite(a.prob) || a.prob < 0.0)
      fail(ErrorCode::invalid_argument,
           "atoms need finite values and non-negative probabilities");
  }
  std::erase_if(atoms, [](const Atom& a) { return a.prob == 0.0; });
  if (atoms.empty())
    fail(ErrorCode::invalid_argument, "random variable has no mass");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  numeric::KahanSum total;
  for (const Atom& a : atoms) {
    push_merged(merged, a.value, a.prob);
    total.add(a.prob);
  }
  if (std::abs(total.value() - 1.0) > kMassTolerance)
    fail(ErrorCode::invalid_argument, "atom probabilities do not sum to 1");
  return DiscreteRandomVariable(std::move(merged));
}

DiscreteRandomVariable DiscreteRandomVariable::point_mass(double value) {
  return from_atoms({{value, 1.0}});
}

double DiscreteRandomVariable::total_probability() const {
  numeric::KahanSum acc;
  for (const Atom& a : atoms_) acc.add(a.prob);
  return acc.value();
}

double DiscreteRandomVariable::mean() const {
  numeric::KahanSum acc;
  for (const Atom& a : atoms_) acc.add(a.prob * a.value);
  return acc.value();
}

double DiscreteRandomVariable::variance() const {
  const double mu = mean();
  numeric::KahanSum acc;
  for (const Atom& a : atoms_) acc.add(a.prob * (a.value - mu) * (a.value - mu));
  return acc.value();
}

double DiscreteRandomVariable::stddev() const { return std::sqrt(variance()); }

DiscreteRandomVariable DiscreteRandomVariable::negated() const {
  std::vector<Atom> out(atoms_.rbegin(), atoms_.rend());
  for (Atom& a : out) a.value = -a.value;
  return DiscreteRandomVariable(std::move(out));
}

DiscreteRandomVariable DiscreteRandomVariable::shifted(double c) const {
  std::vector<Atom> out(atoms_);
  for (Atom& a : out) a.value += c;
  return from_atoms(std::move(out));
}

std::string DiscreteRandomVariable::to_csv() const {
  std::string out = "value,probability\n";
  char buf[64];
  for (const Atom& a : atoms_) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", a.value, a.prob);
    out += buf;
  }
  return out;
}

DiscreteRandomVariable convolve(const DiscreteRandomVariable& x,
                                const DiscreteRandomVariable& y,
                                std::size_t atom_cap) {
  const auto& outer = x.size() <= y.size() ? x.atoms() : y.atoms();
  const auto& inner = x.size() <= y.size() ? y.atoms() : x.atoms();

  // One sorted stream per outer atom: inner shifted by that atom's value.
  struct Head {
    double value;
    std::size_t stream;
    std::size_t pos;
  };
  auto later = [](const Head& a, const Head& b) {
    return a.value > b.value || (a.value == b.value && a.stream > b.stream);
  };
  std::priority_queue<Head, std::vector<Head>, decltype(later)> heap(later);
  for (std::size_t s = 0; s < outer.size(); ++s)
    heap.push({outer[s].value + inner[0].value, s, 0});

  std::vector<Atom> out;
  while (!heap.empty()) {
    Head h = heap.top();
    heap.pop();
    const double p = outer[h.stream].prob * inner[h.pos].prob;
    if (p > 0.0) {
      push_merged(out, h.value, p);
      if (out.size() > atom_cap)
        fail(ErrorCode::cap_exceeded,
             "exact work law exceeds the atom cap of " + std::to_string(atom_cap));
    }
    if (++h.pos < inner.size()) {
      h.value = outer[h.stream].value + inner[h.pos].value;
      heap.push(h);
    }
  }
  return DiscreteRandomVariable(std::move(out));
}

bool DeltaSetResult::contains(double x) const {
  return std::any_of(intervals.begin(), intervals.end(),
                     [x](const Interval& i) { return i.lo <= x && x <= i.hi; });
}

double window_mass(const DiscreteRandomVariable& x, double center, double delta) {
  numeric::KahanSum acc;
  for (const Atom& a : x.atoms())
    if (a.value - delta <= center && center <= a.value + delta) acc.add(a.prob);
  return acc.value();
}

DeltaSetResult delta_set(const DiscreteRandomVariable& x, double eps, double delta) {
  require(eps > 0.0 && eps < 1.0, "delta_set needs eps in (0,1)");
  require(std::isfinite(delta) && delta >= 0.0,
          "delta_set needs a finite non-negative delta");
  const auto& atoms = x.atoms();
  const std::size_t n = atoms.size();

  // Atom j is inside the window around c iff lo[j] <= c <= hi[j].
  std::vector<double> lo(n), hi(n), breaks;
  breaks.reserve(2 * n);
  std::vector<long double> prefix(n + 1, 0.0L);
  for (std::size_t j = 0; j < n; ++j) {
    lo[j] = atoms[j].value - delta;
    hi[j] = atoms[j].value + delta;
    breaks.push_back(lo[j]);
    breaks.push_back(hi[j]);
    prefix[j + 1] = prefix[j] + atoms[j].prob;
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto count_le = [](const std::vector<double>& v, double c) {
    return static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), c) - v.begin());
  };
  auto count_lt = [](const std::vector<double>& v, double c) {
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), c) - v.begin());
  };
  const long double threshold = 1.0L - static_cast<long double>(eps);
  auto point_ok = [&](double c) {
    return prefix[count_le(lo, c)] - prefix[count_lt(hi, c)] > threshold;
  };
  // Mass on the open gap just right of c.
  auto gap_ok = [&](double c) {
    return prefix[count_le(lo, c)] - prefix[count_le(hi, c)] > threshold;
  };

  DeltaSetResult result;
  bool open = false;
  double start = 0.0;
  for (std::size_t k = 0; k < breaks.size(); ++k) {
    const double b = breaks[k];
    if (point_ok(b) && !open) {
      open = true;
      start = b;
    }
    const bool continues = k + 1 < breaks.size() && gap_ok(b);
    if (open && !continues) {
      result.intervals.push_back({start, b});
      open = false;
    }
  }
  if (!result.intervals.empty()) result.infimum = result.intervals.front().lo;
  return result;
}

double max_eps(const DiscreteRandomVariable& x, double eps) {
  require(eps > 0.0 && eps < 1.0, "max_eps needs eps in (0,1)");
  numeric::KahanSum cdf;
  for (const Atom& a : x.atoms()) {
    cdf.add(a.prob);
    if (cdf.value() > 1.0 - eps) return a.value;
  }
  return x.max();
}

}  // namespace worklab
