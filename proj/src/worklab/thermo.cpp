#include "worklab/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <string>


#include "worklab/error.hpp"
#include "worklab/numeric.hpp"

namespace worklab {

Bath Bath::with_kT(double kT) {
  require(std::isfinite(kT) && kT > 0.0, "bath kT must be positive and finite");
  return Bath(kT, 1.0 / kT);
}

Bath Bath::with_beta(double beta) {
  require(std::isfinite(beta) && beta > 0.0,
          "bath beta must be positive and finite");
  return Bath(1.0 / beta, beta);
}

Distribution::Distribution(std::vector<double> probs) : p_(std::move(probs)) {
  require(!p_.empty(), "distribution needs at least one state");
  for (double x : p_) {
    if (!std::isfinite(x) || x < 0.0)
      fail(ErrorCode::invalid_argument,
           "distribution entries must be finite and non-negative");
  }
  const double total = numeric::compensated_sum(p_);
  if (std::abs(total - 1.0) > kRenormalizeTolerance)
    fail(ErrorCode::invalid_argument,
         "distribution sums to " + std::to_string(total) + ", not 1");
  if (std::abs(total - 1.0) > 0.0)
    for (double& x : p_) x /= total;
}

Distribution Distribution::uniform(std::size_t n) {
  require(n >= 1, "uniform distribution needs n >= 1");
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point_mass(std::size_t n, std::size_t s) {
  require(s < n, "point mass index out of range");
  std::vector<double> p(n, 0.0);
  p[s] = 1.0;
  return Distribution(std::move(p));
}

bool Distribution::has_full_support() const {
  return std::all_of(p_.begin(), p_.end(), [](double x) { return x > 0.0; });
}

EnergyLevels::EnergyLevels(std::vector<double> levels) : h_(std::move(levels)) {
  require(!h_.empty(), "energy levels need at least one state");
  for (double x : h_)
    if (!std::isfinite(x))
      fail(ErrorCode::invalid_argument, "energy levels must be finite");
}

double EnergyLevels::min() const { return *std::min_element(h_.begin(), h_.end()); }
double EnergyLevels::max() const { return *std::max_element(h_.begin(), h_.end()); }

EnergyLevels EnergyLevels::shifted(double c) const {
  std::vector<double> out(h_);
  for (double& x : out) x += c;
  return EnergyLevels(std::move(out));
}

EventSet::EventSet(std::vector<std::size_t> members, std::size_t n)
    : m_(std::move(members)), n_(n) {
  std::sort(m_.begin(), m_.end());
  require(std::adjacent_find(m_.begin(), m_.end()) == m_.end(),
          "event set indices must be unique");
  require(m_.empty() || m_.back() < n_, "event set index out of range");
}

EventSet EventSet::full(std::size_t n) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  return EventSet(std::move(all), n);
}

bool EventSet::contains(std::size_t i) const {
  return std::binary_search(m_.begin(), m_.end(), i);
}

EventSet EventSet::complement() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n_; ++i)
    if (!contains(i)) out.push_back(i);
  return EventSet(std::move(out), n_);
}

double log_partition_function(const EnergyLevels& h, const Bath& bath) {
  std::vector<double> args(h.size());
  for (std::size_t n = 0; n < h.size(); ++n) args[n] = -bath.beta() * h[n];
  return numeric::log_sum_exp(args);
}

double partition_function(const EnergyLevels& h, const Bath& bath) {
  return std::exp(log_partition_function(h, bath));
}

Distribution gibbs(const EnergyLevels& h, const Bath& bath) {
  const double log_z = log_partition_function(h, bath);
  std::vector<double> p(h.size());
  for (std::size_t n = 0; n < h.size(); ++n)
    p[n] = std::exp(-bath.beta() * h[n] - log_z);
  return Distribution(std::move(p));
}

double free_energy(const EnergyLevels& h, const Bath& bath) {
  return -bath.kT() * log_partition_function(h, bath);
}

double log_truncated_partition(const EnergyLevels& h, const EventSet& lambda,
                               const Bath& bath) {
  require(lambda.universe() == h.size(), "event set dimension mismatch");
  if (lambda.empty())
    fail(ErrorCode::domain, "truncated partition over an empty event set");
  std::vector<double> args;
  args.reserve(lambda.size());
  for (std::size_t n : lambda.members()) args.push_back(-bath.beta() * h[n]);
  return numeric::log_sum_exp(args);
}

double truncated_partition(const EnergyLevels& h, const EventSet& lambda,
                           const Bath& bath) {
  return std::exp(log_truncated_partition(h, lambda, bath));
}

double event_probability(const Distribution& q, const EventSet& lambda) {
  require(lambda.universe() == q.size(), "event set dimension mismatch");
  numeric::KahanSum acc;
  for (std::size_t n : lambda.members()) acc.add(q[n]);
  return acc.value();
}

nlohmann::json to_json(const Distribution& q) { return q.probs(); }
nlohmann::json to_json(const EnergyLevels& h) { return h.values(); }

namespace {
std::vector<double> number_array(const nlohmann::json& j, const char* what) {
  if (!j.is_array())
    fail(ErrorCode::parse, std::string(what) + " must be a JSON array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number())
      fail(ErrorCode::parse, std::string(what) + " entries must be numbers");
    out.push_back(x.get<double>());
  }
  return out;
}
}  // namespace

Distribution distribution_from_json(const nlohmann::json& j) {
  return Distribution(number_array(j, "distribution"));
}

EnergyLevels levels_from_json(const nlohmann::json& j) {
  return EnergyLevels(number_array(j, "energy levels"));
}

}  // namespace worklab
