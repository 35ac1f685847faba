#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

namespace worklab {

// Heat bath at fixed temperature; energies share the units of kT.
class Bath {
 public:
  static Bath with_kT(double kT);
  static Bath with_beta(double beta);

  double kT() const { return kT_; }
  double beta() const { return beta_; }

 private:
  Bath(double kT, double beta) : kT_(kT), beta_(beta) {}
  double kT_;
  double beta_;
};

// Probability vector over N states. Inputs within 1e-9 of unit mass are
// renormalized; anything further off is rejected.
class Distribution {
 public:
  static constexpr double kSumTolerance = 1e-12;
  static constexpr double kRenormalizeTolerance = 1e-9;

  explicit Distribution(std::vector<double> probs);
  static Distribution uniform(std::size_t n);
  static Distribution point_mass(std::size_t n, std::size_t s);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probs() const { return p_; }
  bool has_full_support() const;

 private:
  std::vector<double> p_;
};

class EnergyLevels {
 public:
  explicit EnergyLevels(std::vector<double> levels);

  std::size_t size() const { return h_.size(); }
  double operator[](std::size_t i) const { return h_[i]; }
  const std::vector<double>& values() const { return h_; }
  double min() const;
  double max() const;
  EnergyLevels shifted(double c) const;

  friend bool operator==(const EnergyLevels&, const EnergyLevels&) = default;

 private:
  std::vector<double> h_;
};

// Subset of state indices (0-based), kept sorted and unique.
class EventSet {
 public:
  EventSet(std::vector<std::size_t> members, std::size_t n);
  static EventSet full(std::size_t n);

  const std::vector<std::size_t>& members() const { return m_; }
  std::size_t size() const { return m_.size(); }
  bool empty() const { return m_.empty(); }
  std::size_t universe() const { return n_; }
  bool contains(std::size_t i) const;
  EventSet complement() const;

 private:
  std::vector<std::size_t> m_;
  std::size_t n_;
};

double log_partition_function(const EnergyLevels& h, const Bath& bath);
double partition_function(const EnergyLevels& h, const Bath& bath);
Distribution gibbs(const EnergyLevels& h, const Bath& bath);
double free_energy(const EnergyLevels& h, const Bath& bath);
double log_truncated_partition(const EnergyLevels& h, const EventSet& lambda,
                               const Bath& bath);
double truncated_partition(const EnergyLevels& h, const EventSet& lambda,
                           const Bath& bath);
double event_probability(const Distribution& q, const EventSet& lambda);

nlohmann::json to_json(const Distribution& q);
nlohmann::json to_json(const EnergyLevels& h);
Distribution distribution_from_json(const nlohmann::json& j);
EnergyLevels levels_from_json(const nlohmann::json& j);

}  // namespace worklab
