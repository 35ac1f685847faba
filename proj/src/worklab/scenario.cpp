#include "worklab/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "worklab/asymptotics.hpp"
#include "worklab/builders.hpp"
#include "worklab/entropy.hpp"
#include "worklab/error.hpp"
#include "worklab/fluctuation.hpp"
#include "worklab/numeric.hpp"
#include "worklab/process.hpp"
#include "worklab/spectra.hpp"

namespace worklab {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
  fail(ErrorCode::validation, path + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string at_index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) invalid(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) invalid(path, "must be finite");
  return v;
}

std::size_t as_index(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
    invalid(path, "expected a non-negative integer");
  return j.get<std::size_t>();
}

std::vector<double> as_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) invalid(path, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], at_index(path, i)));
  return out;
}

std::vector<std::size_t> as_index_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) invalid(path, "expected a non-empty array of integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_index(j[i], at_index(path, i)));
  return out;
}

double number_or(const json& obj, const std::string& path, const char* key, double dflt) {
  const json* v = find(obj, key);
  return v ? as_number(*v, join(path, key)) : dflt;
}

std::optional<double> number_opt(const json& obj, const std::string& path, const char* key) {
  const json* v = find(obj, key);
  if (!v) return std::nullopt;
  return as_number(*v, join(path, key));
}

std::size_t index_or(const json& obj, const std::string& path, const char* key,
                     std::size_t dflt) {
  const json* v = find(obj, key);
  return v ? as_index(*v, join(path, key)) : dflt;
}

const json& object_at(const json& obj, const std::string& path, const char* key) {
  const json* v = find(obj, key);
  if (!v) invalid(join(path, key), "missing required field");
  if (!v->is_object()) invalid(join(path, key), "expected an object");
  return *v;
}

template <class F>
auto wrap(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::invalid_argument || e.code() == ErrorCode::domain)
      invalid(path, e.what());
    throw;
  }
}

double in_open_unit(const json& obj, const std::string& path, const char* key) {
  const json* v = find(obj, key);
  if (!v) invalid(join(path, key), "missing required field");
  const double x = as_number(*v, join(path, key));
  if (!(x > 0.0 && x < 1.0)) invalid(join(path, key), "must lie in (0,1)");
  return x;
}

struct ProcessSpec {
  std::string type;
  std::size_t L = 400;
  double m_cutoff = kDefaultCutoffKT;
  double eps = 0.0;
  double E = 50.0;
  std::size_t s = 0;
  std::optional<EnergyLevels> final_levels;
  ItrSchedule schedule = ItrSchedule::uniform;
  json steps;
};

struct Plan {
  std::string kind;
  Bath bath = Bath::with_kT(1.0);
  std::optional<EnergyLevels> levels;
  std::string system_type;
  double spectral_scale = 0.0;  // a or R
  std::size_t n_samples = 0;
  std::optional<Distribution> initial;
  std::optional<ProcessSpec> process;
  std::set<std::string> quantities;
  std::optional<double> eps;
  std::optional<double> delta;
  std::vector<double> deltas;
  std::string mode = "exact";
  std::uint64_t seed = 1;
  std::size_t mc_samples = 100'000;
  std::vector<std::size_t> ladder_L, ladder_m, ladder_n;
  std::size_t atom_cap = kDefaultAtomCap;
  std::size_t jobs = 1;
  std::optional<Distribution> iid_q, iid_r;
  double berry_esseen_C = kBerryEsseenC;
  double nu = 0.0;
  std::size_t mixed_s = 0;
  std::optional<double> tolerance;
  std::optional<double> residual_gap;
  double tau = 1e-3;
  double lift_E = 50.0;
  std::size_t erase_s = 0;
  std::optional<EnergyLevels> erase_final;
  std::size_t erase_L = 400;
  double erase_cutoff = kDefaultCutoffKT;
};

const std::set<std::string> kKinds = {"analyze",     "simulate",     "crooks",
                                      "asymptotics", "erase",        "mixed_family",
                                      "flat_spectrum", "wigner"};

void parse_system(const json& cfg, Plan& plan) {
  const json* sys = find(cfg, "system");
  if (!sys) return;
  const std::string path = "system";
  if (!sys->is_object() || sys->size() != 1)
    invalid(path, "expected an object with exactly one of levels, degenerate, flat, semicircle");
  const auto& [key, body] = *sys->items().begin();
  plan.system_type = key;
  if (key == "levels") {
    plan.levels = EnergyLevels(as_vector(body, "system.levels"));
  } else if (key == "degenerate") {
    const std::string p = "system.degenerate";
    if (!body.is_object()) invalid(p, "expected an object {N, r}");
    const std::size_t N = index_or(body, p, "N", 0);
    if (N < 1) invalid(join(p, "N"), "must be at least 1");
    plan.levels = EnergyLevels(std::vector<double>(N, number_or(body, p, "r", 0.0)));
  } else if (key == "flat" || key == "semicircle") {
    const std::string p = "system." + key;
    if (!body.is_object()) invalid(p, "expected an object");
    const char* scale_key = key == "flat" ? "a" : "R";
    const double scale = number_or(body, p, scale_key, 0.0);
    if (!(scale > 0.0)) invalid(join(p, scale_key), "must be positive");
    const std::size_t n = index_or(body, p, "n_samples", 0);
    if (n < 2) invalid(join(p, "n_samples"), "spectral sample count must be at least 2");
    plan.spectral_scale = scale;
    plan.n_samples = n;
    plan.levels = key == "flat" ? flat_levels(scale, n) : semicircle_levels(scale, n);
  } else {
    invalid(path + "." + key, "unknown system type");
  }
}

Distribution parse_initial(const json& spec, const EnergyLevels& h, const Bath& bath) {
  const std::string path = "initial";
  if (spec.is_string()) {
    const auto s = spec.get<std::string>();
    if (s == "gibbs") return gibbs(h, bath);
    if (s == "uniform") return Distribution::uniform(h.size());
    invalid(path, "unknown initial distribution \"" + s + "\"");
  }
  if (!spec.is_object() || spec.size() != 1)
    invalid(path, "expected \"gibbs\", \"uniform\" or an object with one of explicit, point_mass, mixed");
  const auto& [key, body] = *spec.items().begin();
  const std::string p = path + "." + key;
  if (key == "explicit") {
    auto v = as_vector(body, p);
    if (v.size() != h.size()) invalid(p, "length differs from the number of levels");
    return wrap(p, [&] { return Distribution(std::move(v)); });
  }
  if (key == "point_mass") {
    const std::size_t s = as_index(body, p);
    if (s >= h.size()) invalid(p, "state index out of range");
    return Distribution::point_mass(h.size(), s);
  }
  if (key == "mixed") {
    if (!body.is_object()) invalid(p, "expected an object {nu, x_index}");
    const double nu = number_or(body, p, "nu", -1.0);
    if (!(nu >= 0.0 && nu <= 1.0)) invalid(join(p, "nu"), "must lie in [0,1]");
    const std::size_t x = index_or(body, p, "x_index", h.size());
    if (x >= h.size()) invalid(join(p, "x_index"), "state index out of range");
    const Distribution g = gibbs(h, bath);
    std::vector<double> v(h.size());
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = nu * g[n];
    v[x] += 1.0 - nu;
    return Distribution(std::move(v));
  }
  invalid(p, "unknown initial distribution type");
}

ItrSchedule parse_schedule(const json& obj, const std::string& path, ItrSchedule dflt) {
  const json* v = find(obj, "schedule");
  if (!v) return dflt;
  const std::string p = join(path, "schedule");
  if (!v->is_string()) invalid(p, "expected \"uniform\" or \"equal_length\"");
  const auto s = v->get<std::string>();
  if (s == "uniform") return ItrSchedule::uniform;
  if (s == "equal_length") return ItrSchedule::equal_length;
  invalid(p, "expected \"uniform\" or \"equal_length\"");
}

ProcessSpec parse_process(const json& body, const Plan& plan) {
  const std::string path = "process";
  if (!body.is_object()) invalid(path, "expected an object");
  if (!plan.levels) invalid("system", "a process needs a system");
  const EnergyLevels& h = *plan.levels;
  ProcessSpec spec;
  const json* type = find(body, "type");
  if (!type || !type->is_string()) invalid(join(path, "type"), "expected one of itr, fig2, fig3, erasure, custom");
  spec.type = type->get<std::string>();
  spec.L = index_or(body, path, "L", 400);
  if (spec.L < 1) invalid(join(path, "L"), "must be at least 1");
  spec.m_cutoff = number_or(body, path, "m_cutoff", kDefaultCutoffKT);
  if (!(spec.m_cutoff > 0.0)) invalid(join(path, "m_cutoff"), "must be positive");
  if (const json* f = find(body, "final_levels")) {
    spec.final_levels = EnergyLevels(as_vector(*f, join(path, "final_levels")));
    if (spec.final_levels->size() != h.size())
      invalid(join(path, "final_levels"), "length differs from the number of levels");
  }
  if (spec.type == "itr") {
    if (!spec.final_levels) invalid(join(path, "final_levels"), "missing required field");
    spec.schedule = parse_schedule(body, path, ItrSchedule::uniform);
  } else if (spec.type == "fig2") {
    spec.schedule = parse_schedule(body, path, ItrSchedule::uniform);
  } else if (spec.type == "fig3") {
    spec.eps = in_open_unit(body, path, "eps");
    spec.E = number_or(body, path, "E", 50.0);
    if (!(spec.E > 0.0)) invalid(join(path, "E"), "must be positive");
    spec.schedule = parse_schedule(body, path, ItrSchedule::uniform);
  } else if (spec.type == "erasure") {
    spec.s = index_or(body, path, "s", h.size());
    if (spec.s >= h.size()) invalid(join(path, "s"), "state index out of range");
    spec.schedule = parse_schedule(body, path, ItrSchedule::equal_length);
  } else if (spec.type == "custom") {
    const json* steps = find(body, "steps");
    if (!steps || !steps->is_array()) invalid(join(path, "steps"), "expected an array of steps");
    spec.steps = *steps;
    wrap(join(path, "steps"), [&] {
      return Process::from_json(json{{"initial_levels", h.values()}, {"steps", spec.steps}});
    });
  } else {
    invalid(join(path, "type"), "unknown process type \"" + spec.type + "\"");
  }
  return spec;
}

Process make_process(const Plan& plan, const ProcessSpec& spec, std::size_t L) {
  const EnergyLevels& h = *plan.levels;
  const Distribution& q = *plan.initial;
  const ItrOptions opts{spec.schedule, {}};
  if (spec.type == "itr") return build_itr(h, *spec.final_levels, L, plan.bath, opts);
  if (spec.type == "fig2")
    return build_expected_extraction(q, h, plan.bath, L, spec.m_cutoff, opts);
  if (spec.type == "fig3")
    return build_eps_extraction(q, h, plan.bath, spec.eps, spec.E, L, opts).process;
  if (spec.type == "erasure")
    return build_erasure(q, h, spec.final_levels.value_or(h), plan.bath, spec.s,
                         spec.m_cutoff, L, opts);
  return Process::from_json(json{{"initial_levels", h.values()}, {"steps", spec.steps}});
}

Plan parse(const json& cfg, const RunOverrides& ov) {
  if (!cfg.is_object()) invalid("$", "scenario config must be a JSON object");
  const json* schema = find(cfg, "schema");
  if (!schema) invalid("schema", "missing required field");
  if (!schema->is_number_integer() || schema->get<int>() != kScenarioSchema)
    invalid("schema", "unsupported schema version (expected 1)");
  Plan plan;
  const json* kind = find(cfg, "kind");
  if (!kind || !kind->is_string() || !kKinds.contains(kind->get<std::string>()))
    invalid("kind",
            "expected one of analyze, simulate, crooks, asymptotics, erase, "
            "mixed_family, flat_spectrum, wigner");
  plan.kind = kind->get<std::string>();

  if (const json* b = find(cfg, "bath")) {
    if (!b->is_object()) invalid("bath", "expected an object with kT or beta");
    if (find(*b, "kT") && find(*b, "beta")) invalid("bath", "give kT or beta, not both");
    if (auto kT = number_opt(*b, "bath", "kT")) {
      if (!(*kT > 0.0)) invalid("bath.kT", "must be positive");
      plan.bath = Bath::with_kT(*kT);
    } else if (auto beta = number_opt(*b, "bath", "beta")) {
      if (!(*beta > 0.0)) invalid("bath.beta", "must be positive");
      plan.bath = Bath::with_beta(*beta);
    }
  }
  if (ov.kT) {
    if (!(*ov.kT > 0.0) || !std::isfinite(*ov.kT)) invalid("--bath-kT", "must be positive");
    plan.bath = Bath::with_kT(*ov.kT);
  }

  parse_system(cfg, plan);

  if (const json* e = find(cfg, "eps")) {
    plan.eps = as_number(*e, "eps");
    if (!(*plan.eps > 0.0 && *plan.eps < 1.0)) invalid("eps", "must lie in (0,1)");
  }
  if (const json* d = find(cfg, "delta")) {
    if (d->is_array()) {
      plan.deltas = as_vector(*d, "delta");
    } else {
      plan.delta = as_number(*d, "delta");
      plan.deltas = {*plan.delta};
    }
    for (std::size_t i = 0; i < plan.deltas.size(); ++i)
      if (!(plan.deltas[i] > 0.0)) invalid(d->is_array() ? at_index("delta", i) : "delta", "must be positive");
    if (!plan.delta) plan.delta = plan.deltas.front();
  }
  if (const json* q = find(cfg, "quantities")) {
    if (!q->is_array()) invalid("quantities", "expected an array of names");
    for (std::size_t i = 0; i < q->size(); ++i) {
      if (!(*q)[i].is_string()) invalid(at_index("quantities", i), "expected a string");
      plan.quantities.insert((*q)[i].get<std::string>());
    }
  }
  if (const json* s = find(cfg, "seeds")) {
    if (!s->is_object()) invalid("seeds", "expected an object {seed, n_samples}");
    if (const json* v = find(*s, "seed")) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
        invalid("seeds.seed", "expected an unsigned 64-bit integer");
      plan.seed = v->get<std::uint64_t>();
    }
    plan.mc_samples = index_or(*s, "seeds", "n_samples", plan.mc_samples);
    if (plan.mc_samples < 1) invalid("seeds.n_samples", "must be at least 1");
  }
  if (ov.seed) plan.seed = *ov.seed;
  if (const json* m = find(cfg, "mode")) {
    if (!m->is_string()) invalid("mode", "expected exact, monte-carlo or both");
    plan.mode = m->get<std::string>();
    if (plan.mode != "exact" && plan.mode != "monte-carlo" && plan.mode != "both")
      invalid("mode", "expected exact, monte-carlo or both");
  }
  if (const json* l = find(cfg, "ladder")) {
    if (!l->is_object()) invalid("ladder", "expected an object with L, m or n lists");
    if (const json* v = find(*l, "L")) plan.ladder_L = as_index_vector(*v, "ladder.L");
    if (const json* v = find(*l, "m")) plan.ladder_m = as_index_vector(*v, "ladder.m");
    if (const json* v = find(*l, "n")) plan.ladder_n = as_index_vector(*v, "ladder.n");
    for (std::size_t i = 0; i < plan.ladder_L.size(); ++i)
      if (plan.ladder_L[i] < 1) invalid(at_index("ladder.L", i), "must be at least 1");
    for (std::size_t i = 0; i < plan.ladder_m.size(); ++i)
      if (plan.ladder_m[i] < 1) invalid(at_index("ladder.m", i), "must be at least 1");
    for (std::size_t i = 0; i < plan.ladder_n.size(); ++i)
      if (plan.ladder_n[i] < 2)
        invalid(at_index("ladder.n", i), "spectral sample count must be at least 2");
  }
  plan.atom_cap = index_or(cfg, "", "atom_cap", plan.atom_cap);
  if (ov.atom_cap) plan.atom_cap = *ov.atom_cap;
  if (plan.atom_cap < 1) invalid("atom_cap", "must be at least 1");
  plan.jobs = index_or(cfg, "", "jobs", plan.jobs);
  if (ov.jobs) plan.jobs = *ov.jobs;
  plan.jobs = std::max<std::size_t>(plan.jobs, 1);
  plan.tolerance = number_opt(cfg, "", "tolerance");
  if (plan.tolerance && !(*plan.tolerance >= 0.0)) invalid("tolerance", "must be non-negative");

  auto need_levels = [&] {
    if (!plan.levels) invalid("system", "missing required field");
  };
  auto load_initial = [&](const char* dflt) {
    need_levels();
    const json* init = find(cfg, "initial");
    plan.initial = parse_initial(init ? *init : json(dflt), *plan.levels, plan.bath);
  };

  if (plan.kind == "analyze") {
    load_initial("gibbs");
  } else if (plan.kind == "simulate" || plan.kind == "crooks") {
    load_initial("gibbs");
    const json* p = find(cfg, "process");
    if (!p) invalid("process", "missing required field");
    plan.process = parse_process(*p, plan);
    if (plan.kind == "crooks" && plan.deltas.empty()) plan.deltas = {0.01, 0.1, 0.5};
    if (plan.delta && !plan.eps && plan.kind == "simulate")
      invalid("eps", "delta sets need eps as well as delta");
  } else if (plan.kind == "asymptotics") {
    const json& iid = object_at(cfg, "", "iid");
    const json* q = find(iid, "q");
    const json* r = find(iid, "r");
    if (!q) invalid("iid.q", "missing required field");
    if (!r) invalid("iid.r", "missing required field");
    plan.iid_q = wrap("iid.q", [&] { return Distribution(as_vector(*q, "iid.q")); });
    plan.iid_r = wrap("iid.r", [&] { return Distribution(as_vector(*r, "iid.r")); });
    if (plan.iid_q->size() != plan.iid_r->size()) invalid("iid.r", "length differs from iid.q");
    for (std::size_t n = 0; n < plan.iid_q->size(); ++n)
      if ((*plan.iid_q)[n] > 0.0 && !((*plan.iid_r)[n] > 0.0))
        invalid(at_index("iid.r", n), "support of q must lie inside support of r");
    plan.berry_esseen_C = number_or(iid, "iid", "berry_esseen_C", kBerryEsseenC);
    if (!(plan.berry_esseen_C > 0.0)) invalid("iid.berry_esseen_C", "must be positive");
    if (!plan.eps) invalid("eps", "missing required field");
    if (plan.ladder_m.empty()) plan.ladder_m = {64, 256, 1024};
    plan.residual_gap = number_opt(cfg, "", "residual_gap");
  } else if (plan.kind == "erase") {
    load_initial("uniform");
    const json& e = object_at(cfg, "", "erase");
    plan.erase_s = index_or(e, "erase", "s", plan.levels->size());
    if (plan.erase_s >= plan.levels->size()) invalid("erase.s", "state index out of range");
    if (const json* f = find(e, "final_levels")) {
      plan.erase_final = EnergyLevels(as_vector(*f, "erase.final_levels"));
      if (plan.erase_final->size() != plan.levels->size())
        invalid("erase.final_levels", "length differs from the number of levels");
    }
    plan.erase_L = index_or(e, "erase", "L", 400);
    if (plan.erase_L < 1) invalid("erase.L", "must be at least 1");
    plan.erase_cutoff = number_or(e, "erase", "m_cutoff", kDefaultCutoffKT);
    if (!(plan.erase_cutoff > 0.0)) invalid("erase.m_cutoff", "must be positive");
    plan.tau = number_or(e, "erase", "tau", 1e-3);
    if (!(plan.tau > 0.0 && plan.tau < 1.0)) invalid("erase.tau", "must lie in (0,1)");
    plan.lift_E = number_or(e, "erase", "E", 50.0);
    if (!(plan.lift_E > 0.0)) invalid("erase.E", "must be positive");
    if (plan.eps) {
      if (!(*plan.eps > plan.tau)) invalid("eps", "must exceed erase.tau");
      if (!plan.delta) plan.delta = 0.2;
    }
    if (!plan.tolerance) plan.tolerance = 1e-2;
  } else if (plan.kind == "mixed_family") {
    need_levels();
    const json& m = object_at(cfg, "", "mixed");
    plan.nu = number_or(m, "mixed", "nu", -1.0);
    if (!(plan.nu >= 0.0 && plan.nu <= 1.0)) invalid("mixed.nu", "must lie in [0,1]");
    plan.mixed_s = index_or(m, "mixed", "x_index", plan.levels->size());
    if (plan.mixed_s >= plan.levels->size()) invalid("mixed.x_index", "state index out of range");
    if (!plan.eps) plan.eps = plan.nu;
    if (!(*plan.eps > 0.0 && *plan.eps < 1.0)) invalid("eps", "must lie in (0,1)");
    if (plan.ladder_m.empty()) plan.ladder_m = {6, 9, 12};
    if (!plan.tolerance) plan.tolerance = 0.1;
  } else {
    const bool flat = plan.kind == "flat_spectrum";
    if (plan.system_type != (flat ? "flat" : "semicircle"))
      invalid("system", flat ? "flat_spectrum needs a flat system" : "wigner needs a semicircle system");
    if (!plan.eps) invalid("eps", "missing required field");
    if (!flat && !(*plan.eps < 0.5)) invalid("eps", "must be below 1/2 for the semicircle case");
    if (plan.ladder_n.empty()) plan.ladder_n = {plan.n_samples};
    if (!plan.tolerance) plan.tolerance = flat ? 0.05 : 1e-3;
  }
  return plan;
}

// Runs f(0..count-1) on up to `jobs` threads; results stay in index order.
template <class T>
std::vector<T> parallel_map(std::size_t count, std::size_t jobs,
                            const std::function<T(std::size_t)>& f) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(jobs, count);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

class Report {
 public:
  explicit Report(const json& config, const Plan& plan) {
    r_["schema"] = kScenarioSchema;
    r_["scenario"] = config;
    r_["kind"] = plan.kind;
    r_["results"] = json::object();
    r_["checks"] = json::array();
    r_["tables"] = json::object();
    r_["bath"] = {{"kT", plan.bath.kT()}, {"beta", plan.bath.beta()}};
  }

  void scalar(const std::string& name, double value, const char* provenance,
              json metadata = json::object()) {
    r_["results"][name] = {{"value", value}, {"provenance", provenance},
                           {"metadata", std::move(metadata)}};
  }
  void check(const std::string& name, bool passed, json detail = json::object()) {
    r_["checks"].push_back({{"name", name}, {"passed", passed}, {"detail", std::move(detail)}});
  }
  void table(const std::string& name, std::string csv) { r_["tables"][name] = std::move(csv); }
  void ladder(json rows) { r_["ladder"] = std::move(rows); }
  void set(const std::string& key, json value) { r_[key] = std::move(value); }

  json finish() {
    bool all = true;
    for (const auto& c : r_["checks"]) all = all && c["passed"].get<bool>();
    r_["checks_passed"] = all;
    return std::move(r_);
  }

 private:
  json r_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool wants(const Plan& plan, const char* name) {
  return plan.quantities.empty() || plan.quantities.contains(name);
}

json solution_meta(const SubsetSolution& s) { return s.to_json(); }

void run_analyze(const Plan& plan, Report& rep) {
  const EnergyLevels& h = *plan.levels;
  const Distribution& q = *plan.initial;
  const Bath& b = plan.bath;
  const Distribution g = gibbs(h, b);
  const double scale = b.kT() * numeric::kLn2;
  if (wants(plan, "Z")) rep.scalar("Z", partition_function(h, b), "exact");
  if (wants(plan, "F")) rep.scalar("F", free_energy(h, b), "exact");
  if (wants(plan, "entropy")) rep.scalar("entropy_bits", shannon_entropy(q), "exact");
  if (wants(plan, "A")) rep.scalar("A", expected_work_content(q, h, b), "exact");
  if (wants(plan, "sigma"))
    rep.scalar("sigma", yield_fluctuation_sigma(q, h, b), "exact");
  if (wants(plan, "D0")) rep.scalar("D0_bits", renyi0(q, g), "exact");
  if (plan.eps) {
    const auto fe = eps_free_energy(q, h, b, *plan.eps);
    const auto d0 = smoothed_renyi0(q, g, *plan.eps);
    rep.scalar("F_eps", fe.value, "exact", solution_meta(fe.solution));
    rep.scalar("D0_eps_bits", d0.bits, "exact", solution_meta(d0.solution));
    const double lhs = fe.value - free_energy(h, b);
    const double rhs = scale * d0.bits;
    rep.check("F_eps_identity", std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)),
              {{"F_eps_minus_F", lhs}, {"kT_ln2_D0_eps", rhs}});
  }
  std::string csv = "state,level,q,gibbs\n";
  for (std::size_t n = 0; n < h.size(); ++n)
    csv += std::to_string(n) + "," + fmt(h[n]) + "," + fmt(q[n]) + "," + fmt(g[n]) + "\n";
  rep.table("levels", std::move(csv));
}

// Work predicted by the idealized (L, cutoff -> infinity) version of a process.
std::optional<double> ideal_work(const Plan& plan, const ProcessSpec& spec) {
  const EnergyLevels& h = *plan.levels;
  const Distribution& q = *plan.initial;
  const Bath& b = plan.bath;
  if (spec.type == "itr") return free_energy(*spec.final_levels, b) - free_energy(h, b);
  if (spec.type == "fig2") return -expected_work_content(q, h, b);
  if (spec.type == "erasure") {
    const EnergyLevels hf = spec.final_levels.value_or(h);
    return hf[spec.s] - free_energy(h, b) - expected_work_content(q, h, b);
  }
  return std::nullopt;
}

void run_simulate(const Plan& plan, Report& rep) {
  const ProcessSpec& spec = *plan.process;
  const std::vector<std::size_t> Ls =
      plan.ladder_L.empty() ? std::vector<std::size_t>{spec.L} : plan.ladder_L;
  const bool exact = plan.mode != "monte-carlo";
  const bool mc = plan.mode != "exact";
  const bool want_law = exact && (plan.quantities.contains("law") || plan.delta.has_value());
  const auto target = ideal_work(plan, spec);

  struct Point {
    std::size_t L;
    std::optional<WorkMoments> moments;
    std::optional<WorkDistribution> law;
    std::optional<WorkDistribution> sampled;
  };
  const auto points = parallel_map<Point>(Ls.size(), plan.jobs, [&](std::size_t i) {
    const Process p = make_process(plan, spec, Ls[i]);
    Point pt{Ls[i], {}, {}, {}};
    if (exact) pt.moments = exact_work_moments(p, *plan.initial, plan.bath);
    if (want_law) pt.law = exact_work_distribution(p, *plan.initial, plan.bath, plan.atom_cap);
    if (mc)
      pt.sampled = sample_work(p, *plan.initial, plan.bath,
                               {plan.seed, plan.mc_samples, 1u << 14, 1});
    return pt;
  });

  json rows = json::array();
  std::string csv = "L,work_mean,work_variance,mc_mean,mc_stderr\n";
  bool mc_ok = true;
  for (const auto& pt : points) {
    json row{{"L", pt.L}};
    std::string line = std::to_string(pt.L) + ",";
    if (pt.moments) {
      row["work_mean"] = pt.moments->mean;
      row["work_variance"] = pt.moments->variance;
      line += fmt(pt.moments->mean) + "," + fmt(pt.moments->variance) + ",";
    } else {
      line += ",,";
    }
    if (pt.sampled) {
      const double se = pt.sampled->law.stddev() / std::sqrt(double(plan.mc_samples));
      row["mc_mean"] = pt.sampled->law.mean();
      row["mc_stderr"] = se;
      line += fmt(pt.sampled->law.mean()) + "," + fmt(se);
      if (pt.moments) {
        const bool ok = std::abs(pt.sampled->law.mean() - pt.moments->mean) <= 5.0 * se;
        row["mc_within_5se"] = ok;
        mc_ok = mc_ok && ok;
      }
    } else {
      line += ",";
    }
    if (pt.law) {
      row["atoms"] = pt.law->law.size();
      if (plan.eps) {
        const auto ds = delta_set(pt.law->law, *plan.eps, *plan.delta);
        row["delta_inf"] = ds.infimum;
        row["delta_sup"] = ds.supremum();
      }
    }
    rows.push_back(std::move(row));
    csv += line + "\n";
  }
  rep.ladder(rows);
  rep.table("ladder", std::move(csv));

  const Point& last = points.back();
  json meta{{"L", last.L}, {"process", spec.type}};
  if (last.moments) {
    rep.scalar("work_mean", last.moments->mean, "exact", meta);
    rep.scalar("work_variance", last.moments->variance, "exact", meta);
    rep.scalar("yield_mean", -last.moments->mean, "exact", meta);
  }
  if (last.law) {
    json m = meta;
    m["atoms"] = last.law->law.size();
    m["atom_cap"] = plan.atom_cap;
    rep.scalar("work_stddev", last.law->law.stddev(), "exact", m);
    if (plan.eps) {
      const auto ds = delta_set(last.law->law, *plan.eps, *plan.delta);
      m["eps"] = *plan.eps;
      m["delta"] = *plan.delta;
      m["empty"] = ds.empty();
      rep.scalar("work_delta_inf", ds.infimum, "exact", m);
      rep.scalar("yield_delta_sup", -ds.infimum, "exact", m);
      rep.scalar("work_max_eps", max_eps(last.law->law, *plan.eps), "exact", m);
    }
    rep.table("work_law", last.law->law.to_csv());
  }
  if (last.sampled) {
    json m = last.sampled->metadata();
    m["L"] = last.L;
    rep.scalar("mc_mean", last.sampled->law.mean(), "monte-carlo", m);
    rep.scalar("mc_stderr",
               last.sampled->law.stddev() / std::sqrt(double(plan.mc_samples)),
               "monte-carlo", m);
    if (!last.law) rep.table("work_law", last.sampled->law.to_csv());
  }
  if (exact && mc) rep.check("mc_within_5se", mc_ok);
  if (target) {
    rep.scalar("ideal_work", *target, "closed-form", {{"process", spec.type}});
    if (plan.tolerance && last.moments) {
      const double gap = std::abs(last.moments->mean - *target);
      rep.check("mean_matches_ideal", gap <= *plan.tolerance,
                {{"gap", gap}, {"tolerance", *plan.tolerance}});
    }
  }
  if (spec.type == "fig3") {
    const auto fe = eps_free_energy(*plan.initial, *plan.levels, plan.bath, spec.eps);
    rep.scalar("F_eps_minus_F", fe.value - free_energy(*plan.levels, plan.bath), "exact",
               solution_meta(fe.solution));
  }
}

void run_crooks(const Plan& plan, Report& rep) {
  const ProcessSpec& spec = *plan.process;
  const Process p = normalize(make_process(plan, spec, spec.L));
  const auto grid = default_w_grid(p, plan.bath, plan.atom_cap);
  const auto per_delta = parallel_map<std::vector<CrooksReport>>(
      plan.deltas.size(), plan.jobs, [&](std::size_t i) {
        return crooks_check(p, plan.bath, grid, plan.deltas[i], plan.atom_cap);
      });
  std::vector<CrooksReport> all;
  std::size_t compared = 0, failed = 0;
  for (const auto& rows : per_delta)
    for (const auto& r : rows) {
      if (r.ratio) ++compared;
      if (!r.ok) ++failed;
      all.push_back(r);
    }
  const double delta_f =
      free_energy(final_levels(p), plan.bath) - free_energy(p.initial_levels(), plan.bath);
  rep.scalar("delta_F", delta_f, "exact");
  rep.scalar("grid_points", double(grid.size()), "exact");
  rep.scalar("ratios_compared", double(compared), "exact",
             {{"paths", path_count(p, gibbs(p.initial_levels(), plan.bath), plan.bath)}});
  rep.check("crooks_sandwich", failed == 0, {{"violations", failed}, {"deltas", plan.deltas}});
  rep.table("crooks", crooks_csv(all));
  if (plan.eps && plan.delta) {
    const auto ts = thermal_start_bound(p, plan.bath, *plan.eps, *plan.delta, plan.atom_cap);
    rep.scalar("thermal_start_inf_delta", ts.inf_delta, "exact",
               {{"eps", *plan.eps}, {"delta", *plan.delta}});
    rep.scalar("thermal_start_bound", ts.bound, "closed-form");
    rep.check("thermal_start_bound", ts.holds);
  }
}

void run_asymptotics(const Plan& plan, Report& rep) {
  const ExpansionOptions opts{plan.berry_esseen_C, 0.0};
  const auto rows = parallel_map<ExpansionReport>(
      plan.ladder_m.size(), plan.jobs, [&](std::size_t i) {
        return d0_eps_expansion({*plan.iid_q, *plan.iid_r, plan.ladder_m[i], *plan.eps}, opts);
      });
  json ladder = json::array();
  bool contained = true, monotone = true;
  double prev_gap = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    json row{{"m", r.m},
             {"exact", r.exact},
             {"first_order", r.first_order},
             {"second_order", r.second_order},
             {"residual", r.residual},
             {"target", r.target},
             {"certificate", to_string(r.certificate)}};
    if (r.lower) row["lower"] = *r.lower;
    if (r.upper) row["upper"] = *r.upper;
    if (r.lower && !(*r.lower < r.exact)) contained = false;
    if (r.upper && !(r.exact <= *r.upper)) contained = false;
    const double gap = std::abs(r.residual - r.target);
    row["residual_gap"] = gap;
    if (!(gap < prev_gap)) monotone = false;
    prev_gap = gap;
    ladder.push_back(std::move(row));
  }
  rep.ladder(ladder);
  const auto& last = rows.back();
  json meta{{"m", last.m}, {"certificate", to_string(last.certificate)},
            {"berry_esseen_C", plan.berry_esseen_C}};
  rep.scalar("D0_eps_bits", last.exact, "exact", meta);
  rep.scalar("first_order_bits", last.first_order, "closed-form", meta);
  rep.scalar("second_order_bits", last.second_order, "closed-form", meta);
  rep.scalar("residual_bits", last.residual, "exact", meta);
  rep.scalar("residual_target_bits", last.target, "closed-form", meta);
  rep.check("sandwich_contains_exact", contained);
  if (rows.size() > 1) rep.check("residual_gap_decreasing", monotone);
  if (plan.residual_gap)
    rep.check("final_residual_gap", prev_gap < *plan.residual_gap,
              {{"gap", prev_gap}, {"limit", *plan.residual_gap}});
  rep.table("expansion", expansion_csv(rows));
}

void run_erase(const Plan& plan, Report& rep) {
  const EnergyLevels& h = *plan.levels;
  const EnergyLevels hf = plan.erase_final.value_or(h);
  const Distribution& q = *plan.initial;
  const Bath& b = plan.bath;
  const std::size_t s = plan.erase_s;
  const Process p = build_erasure(q, h, hf, b, s, plan.erase_cutoff, plan.erase_L);
  const auto mom = exact_work_moments(p, q, b);
  const double p_s = final_state_distribution(p, q, b)[s];
  const double ideal = hf[s] - free_energy(h, b) - expected_work_content(q, h, b);
  json meta{{"L", plan.erase_L}, {"m_cutoff", plan.erase_cutoff}, {"s", s}};
  rep.scalar("cost_mean", mom.mean, "exact", meta);
  rep.scalar("cost_variance", mom.variance, "exact", meta);
  rep.scalar("p_final_s", p_s, "exact", meta);
  rep.scalar("ideal_cost", ideal, "closed-form");
  rep.check("expected_cost", std::abs(mom.mean - ideal) <= *plan.tolerance,
            {{"gap", std::abs(mom.mean - ideal)}, {"tolerance", *plan.tolerance}});
  rep.check("final_state", p_s >= 1.0 - plan.tau, {{"tau", plan.tau}});
  std::string csv = "quantity,value\n";
  csv += "cost_mean," + fmt(mom.mean) + "\ncost_variance," + fmt(mom.variance) +
         "\np_final_s," + fmt(p_s) + "\nideal_cost," + fmt(ideal) + "\n";

  if (plan.eps) {
    const double eps = *plan.eps, delta = *plan.delta;
    const auto er = build_eps_erasure(q, h, hf, b, s, eps, plan.tau, plan.lift_E, plan.erase_L);
    const auto law = exact_work_distribution(er.process, q, b, plan.atom_cap);
    const auto ds = delta_set(law.law, eps, delta);
    const double fe = eps_free_energy(q, h, b, eps).value;
    const double upper = hf[s] - fe;
    const double lower =
        hf[s] - fe - 8.0 * delta + b.kT() * std::log((1.0 - eps) * (1.0 - plan.tau));
    json m{{"eps", eps},         {"delta", delta},         {"tau", plan.tau},
           {"E", plan.lift_E},   {"eps_bar", er.eps_bar},  {"lift", er.lift},
           {"atoms", law.law.size()}, {"empty", ds.empty()}};
    rep.scalar("eps_cost_inf_delta", ds.infimum, "exact", m);
    rep.scalar("eps_cost_upper", upper, "exact");
    rep.scalar("eps_cost_lower", lower, "exact");
    rep.check("eps_cost_lower", ds.infimum >= lower);
    rep.check("eps_cost_upper", !ds.empty() && ds.infimum <= upper);
    csv += "eps_cost_inf_delta," + fmt(ds.infimum) + "\neps_cost_lower," + fmt(lower) +
           "\neps_cost_upper," + fmt(upper) + "\n";
  }
  rep.table("erasure", std::move(csv));
}

void run_mixed(const Plan& plan, Report& rep) {
  const auto rows = parallel_map<MixedFamilyQuantities>(
      plan.ladder_m.size(), plan.jobs, [&](std::size_t i) {
        return mixed_family_quantities(*plan.levels, plan.bath, plan.nu, plan.mixed_s,
                                       plan.ladder_m[i], *plan.eps);
      });
  json ladder = json::array();
  std::string csv =
      "m,gibbs_x,A_leading,A_exact,sigma_leading,sigma_exact,Aeps_leading,Aeps_exact\n";
  bool gibbs_decreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  auto ratio = [](const std::optional<double>& num, double den) -> json {
    if (!num || den == 0.0) return nullptr;
    return *num / den;
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    json row{{"m", plan.ladder_m[i]},
             {"gibbs_x", r.gibbs_x},
             {"A_leading", r.A_leading},
             {"sigma_leading", r.sigma_leading},
             {"Aeps_leading", r.Aeps_leading},
             {"A_ratio", ratio(r.A_exact, r.A_leading)},
             {"sigma_ratio", ratio(r.sigma_exact, r.sigma_leading)},
             {"Aeps_ratio", ratio(r.Aeps_exact, r.Aeps_leading)}};
    if (r.certificate) row["certificate"] = to_string(*r.certificate);
    ladder.push_back(std::move(row));
    if (!(r.gibbs_x < prev)) gibbs_decreasing = false;
    prev = r.gibbs_x;
    csv += std::to_string(plan.ladder_m[i]) + "," + fmt(r.gibbs_x) + "," + fmt(r.A_leading) +
           "," + opt(r.A_exact) + "," + fmt(r.sigma_leading) + "," + opt(r.sigma_exact) + "," +
           fmt(r.Aeps_leading) + "," + opt(r.Aeps_exact) + "\n";
  }
  rep.ladder(ladder);
  rep.table("mixed_family", std::move(csv));
  const auto& last = rows.back();
  json meta{{"m", plan.ladder_m.back()}, {"nu", plan.nu}, {"eps", *plan.eps}};
  rep.scalar("gibbs_x", last.gibbs_x, "exact", meta);
  rep.scalar("A_leading", last.A_leading, "closed-form", meta);
  rep.scalar("sigma_leading", last.sigma_leading, "closed-form", meta);
  rep.scalar("Aeps_leading", last.Aeps_leading, "closed-form", meta);
  if (last.A_exact) {
    rep.scalar("A_exact", *last.A_exact, "exact", meta);
    rep.scalar("sigma_exact", *last.sigma_exact, "exact", meta);
    json m = meta;
    m["certificate"] = to_string(*last.certificate);
    rep.scalar("Aeps_exact", *last.Aeps_exact, "exact", m);
  }
  rep.set("gibbs_condition", {{"decreasing", gibbs_decreasing}, {"final", last.gibbs_x}});
  rep.check("gibbs_condition", gibbs_decreasing && last.gibbs_x < 1.0);
  const double tol = *plan.tolerance;
  auto ratio_check = [&](const char* name, const std::optional<double>& ex, double lead,
                         bool applicable) {
    if (!ex || !applicable || lead == 0.0) return;
    const double r = *ex / lead;
    rep.check(name, std::abs(r - 1.0) <= tol, {{"ratio", r}, {"tolerance", tol}});
  };
  ratio_check("A_ratio", last.A_exact, last.A_leading, true);
  ratio_check("sigma_ratio", last.sigma_exact, last.sigma_leading, true);
  ratio_check("Aeps_ratio", last.Aeps_exact, last.Aeps_leading,
              plan.nu == *plan.eps && plan.nu <= 0.5);
}

void run_spectrum(const Plan& plan, Report& rep) {
  const bool flat = plan.kind == "flat_spectrum";
  struct Point {
    double A, sigma, Aeps;
    std::string cert;
    double c = 0.0, c_lo = 0.0, c_hi = 0.0;
  };
  const auto pts = parallel_map<Point>(plan.ladder_n.size(), plan.jobs, [&](std::size_t i) {
    const std::size_t n = plan.ladder_n[i];
    if (flat) {
      const auto f = flat_spectrum_quantities(plan.spectral_scale, plan.bath, *plan.eps, n);
      return Point{f.A_ratio, f.sigma_ratio, f.Aeps_ratio, to_string(f.values.certificate)};
    }
    const auto w = wigner_quantities(plan.spectral_scale, plan.bath, *plan.eps, n);
    return Point{w.A_ratio,  w.sigma_ratio, w.Aeps_ratio, to_string(w.values.certificate),
                 w.c_eps, w.c_lower, w.c_upper};
  });
  json ladder = json::array();
  std::string csv = "n,A_ratio,sigma_ratio,Aeps_ratio\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ladder.push_back({{"n", plan.ladder_n[i]},
                      {"A_ratio", pts[i].A},
                      {"sigma_ratio", pts[i].sigma},
                      {"Aeps_ratio", pts[i].Aeps},
                      {"certificate", pts[i].cert}});
    csv += std::to_string(plan.ladder_n[i]) + "," + fmt(pts[i].A) + "," + fmt(pts[i].sigma) +
           "," + fmt(pts[i].Aeps) + "\n";
  }
  rep.ladder(ladder);
  rep.table("spectrum", std::move(csv));

  const Point& last = pts.back();
  const double tol = *plan.tolerance;
  json meta{{"n_samples", plan.ladder_n.back()},
            {"eps", *plan.eps},
            {"beta_scale", plan.bath.beta() * plan.spectral_scale},
            {"tolerance", tol},
            {"tolerance_note", "calibration choice for the finite-n, finite-beta ladder"},
            {"discretization", "quantile midpoints (k - 1/2)/n"}};
  if (flat) {
    rep.scalar("A_over_a", last.A, "exact", meta);
    rep.scalar("sigma_over_a_over_inv_sqrt3", last.sigma, "exact", meta);
    rep.scalar("Aeps_over_2eps_a", last.Aeps, "exact", meta);
    rep.check("A_ratio", std::abs(last.A - 1.0) <= tol, {{"ratio", last.A}});
    rep.check("sigma_ratio", std::abs(last.sigma - 1.0) <= tol, {{"ratio", last.sigma}});
    rep.check("Aeps_ratio", std::abs(last.Aeps - 1.0) <= tol, {{"ratio", last.Aeps}});
  } else {
    rep.scalar("A_over_R", last.A, "exact", meta);
    rep.scalar("sigma_over_R", last.sigma, "exact", meta);
    rep.scalar("Aeps_over_R", last.Aeps, "exact", meta);
    rep.scalar("c_eps", last.c, "exact", {{"eps", *plan.eps}});
    rep.scalar("c_lower", last.c_lo, "closed-form");
    rep.scalar("c_upper", last.c_hi, "closed-form");
    rep.check("sigma_ratio", std::abs(last.sigma - 0.5) <= tol, {{"sigma_over_R", last.sigma}});
    rep.check("c_eps_bounds", last.c_lo <= last.c && last.c <= last.c_hi);
  }
  if (pts.size() >= 3) {
    bool cauchy = true;
    for (std::size_t i = 2; i < pts.size(); ++i) {
      auto change = [&](std::size_t k, double Point::*f) {
        return std::abs(pts[k].*f - pts[k - 1].*f);
      };
      for (double Point::*f : {&Point::A, &Point::sigma, &Point::Aeps})
        if (change(i, f) > change(i - 1, f)) cauchy = false;
    }
    rep.check("ladder_converging", cauchy);
  }
}

}  // namespace

void validate_scenario(const json& config) { parse(config, {}); }

json run_scenario(const json& config, const RunOverrides& overrides) {
  const Plan plan = parse(config, overrides);
  Report rep(config, plan);
  json meta{{"seed", plan.seed}, {"jobs", plan.jobs}, {"atom_cap", plan.atom_cap}};
  if (plan.mode != "exact") {
    meta["generator"] = kGeneratorName;
    meta["n_samples"] = plan.mc_samples;
  }
  rep.set("metadata", meta);
  if (plan.kind == "analyze") run_analyze(plan, rep);
  else if (plan.kind == "simulate") run_simulate(plan, rep);
  else if (plan.kind == "crooks") run_crooks(plan, rep);
  else if (plan.kind == "asymptotics") run_asymptotics(plan, rep);
  else if (plan.kind == "erase") run_erase(plan, rep);
  else if (plan.kind == "mixed_family") run_mixed(plan, rep);
  else run_spectrum(plan, rep);
  return rep.finish();
}

}  // namespace worklab
