#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace worklab {

struct Atom {
  double value;
  double prob;
};

// Finite discrete law: strictly increasing values, positive probabilities.
class DiscreteRandomVariable {
 public:
  static constexpr double kMergeTolerance = 1e-12;
  static constexpr double kMassTolerance = 1e-10;

  // Sorts, merges near-equal values and drops zero-probability atoms.
  static DiscreteRandomVariable from_atoms(std::vector<Atom> atoms);
  static DiscreteRandomVariable point_mass(double value);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double min() const { return atoms_.front().value; }
  double max() const { return atoms_.back().value; }
  double total_probability() const;
  double mean() const;
  double variance() const;
  double stddev() const;

  DiscreteRandomVariable negated() const;
  DiscreteRandomVariable shifted(double c) const;

  // Writes `value,probability` rows with 17 significant digits.
  std::string to_csv() const;

 private:
  explicit DiscreteRandomVariable(std::vector<Atom> atoms)
      : atoms_(std::move(atoms)) {}
  friend DiscreteRandomVariable convolve(const DiscreteRandomVariable&,
                                         const DiscreteRandomVariable&,
                                         std::size_t);
  std::vector<Atom> atoms_;
};

bool values_merge(double a, double b);

// Exact law of X + Y for independent X, Y. Throws cap_exceeded once the
// merged atom count passes `atom_cap`.
DiscreteRandomVariable convolve(
    const DiscreteRandomVariable& x, const DiscreteRandomVariable& y,
    std::size_t atom_cap = std::numeric_limits<std::size_t>::max());

struct Interval {
  double lo;
  double hi;
};

struct DeltaSetResult {
  std::vector<Interval> intervals;
  double infimum = std::numeric_limits<double>::infinity();

  bool empty() const { return intervals.empty(); }
  double supremum() const {
    return empty() ? -std::numeric_limits<double>::infinity()
                   : intervals.back().hi;
  }
  bool contains(double x) const;
};

// P(|X - x| <= delta).
double window_mass(const DiscreteRandomVariable& x, double center, double delta);

// {x : P(|X - x| <= delta) > 1 - eps}.
DeltaSetResult delta_set(const DiscreteRandomVariable& x, double eps,
                         double delta);

// inf{x : P(X <= x) > 1 - eps}.
double max_eps(const DiscreteRandomVariable& x, double eps);

}  // namespace worklab
