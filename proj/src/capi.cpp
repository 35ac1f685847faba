#include "worklab/worklab.h"

#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "worklab/builders.hpp"
#include "worklab/entropy.hpp"
#include "worklab/error.hpp"
#include "worklab/fluctuation.hpp"
#include "worklab/process.hpp"
#include "worklab/scenario.hpp"

struct wl_levels {
  worklab::EnergyLevels value;
};
struct wl_distribution {
  worklab::Distribution value;
};
struct wl_process {
  worklab::Process value;
};
struct wl_work_dist {
  worklab::WorkDistribution value;
};

namespace {

thread_local std::string last_error;

wl_status to_status(worklab::ErrorCode c) {
  switch (c) {
    case worklab::ErrorCode::invalid_argument: return WL_ERR_INVALID_ARGUMENT;
    case worklab::ErrorCode::domain: return WL_ERR_DOMAIN;
    case worklab::ErrorCode::cap_exceeded: return WL_ERR_CAP_EXCEEDED;
    case worklab::ErrorCode::parse: return WL_ERR_PARSE;
    case worklab::ErrorCode::validation: return WL_ERR_VALIDATION;
  }
  return WL_ERR_INTERNAL;
}

template <class F>
wl_status guarded(F&& f) {
  last_error.clear();
  try {
    f();
    return WL_OK;
  } catch (const worklab::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return WL_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return WL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return WL_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return WL_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) worklab::fail(worklab::ErrorCode::invalid_argument, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<double> copy_in(const double* v, std::size_t n, const char* what) {
  need(v, what);
  return std::vector<double>(v, v + n);
}

void copy_out(const std::vector<double>& v, double* out, std::size_t n) {
  need(out, "output buffer");
  if (n < v.size())
    worklab::fail(worklab::ErrorCode::invalid_argument, "output buffer too small");
  std::copy(v.begin(), v.end(), out);
}

worklab::Bath bath(double kT) {
  worklab::require(kT > 0.0 && std::isfinite(kT), "kT must be positive");
  return worklab::Bath::with_kT(kT);
}

}  // namespace

extern "C" {

const char* wl_version(void) { return "1.0.0"; }
const char* wl_last_error(void) { return last_error.c_str(); }
void wl_string_free(char* s) { std::free(s); }

wl_status wl_levels_create(const double* h, size_t n, wl_levels** out) {
  return guarded([&] {
    need(out, "out");
    *out = new wl_levels{worklab::EnergyLevels(copy_in(h, n, "levels"))};
  });
}
void wl_levels_destroy(wl_levels* h) { delete h; }
size_t wl_levels_size(const wl_levels* h) { return h ? h->value.size() : 0; }
wl_status wl_levels_get(const wl_levels* h, double* out, size_t n) {
  return guarded([&] {
    need(h, "levels");
    copy_out(h->value.values(), out, n);
  });
}

wl_status wl_distribution_create(const double* p, size_t n, wl_distribution** out) {
  return guarded([&] {
    need(out, "out");
    *out = new wl_distribution{worklab::Distribution(copy_in(p, n, "probabilities"))};
  });
}
void wl_distribution_destroy(wl_distribution* q) { delete q; }
size_t wl_distribution_size(const wl_distribution* q) { return q ? q->value.size() : 0; }
wl_status wl_distribution_get(const wl_distribution* q, double* out, size_t n) {
  return guarded([&] {
    need(q, "distribution");
    copy_out(q->value.probs(), out, n);
  });
}

wl_status wl_gibbs(const wl_levels* h, double kT, wl_distribution** out) {
  return guarded([&] {
    need(h, "levels");
    need(out, "out");
    *out = new wl_distribution{worklab::gibbs(h->value, bath(kT))};
  });
}

wl_status wl_log_partition(const wl_levels* h, double kT, double* out) {
  return guarded([&] {
    need(h, "levels");
    need(out, "out");
    *out = worklab::log_partition_function(h->value, bath(kT));
  });
}

wl_status wl_free_energy(const wl_levels* h, double kT, double* out) {
  return guarded([&] {
    need(h, "levels");
    need(out, "out");
    *out = worklab::free_energy(h->value, bath(kT));
  });
}

wl_status wl_relative_entropy(const wl_distribution* q, const wl_distribution* p,
                              double* bits) {
  return guarded([&] {
    need(q, "q");
    need(p, "p");
    need(bits, "out");
    *bits = worklab::relative_entropy(q->value, p->value);
  });
}

wl_status wl_work_content(const wl_distribution* q, const wl_levels* h, double kT,
                          double* out) {
  return guarded([&] {
    need(q, "q");
    need(h, "levels");
    need(out, "out");
    *out = worklab::expected_work_content(q->value, h->value, bath(kT));
  });
}

wl_status wl_eps_free_energy(const wl_distribution* q, const wl_levels* h, double kT,
                             double eps, double* value, char** witness_json) {
  return guarded([&] {
    need(q, "q");
    need(h, "levels");
    need(value, "out");
    const auto r = worklab::eps_free_energy(q->value, h->value, bath(kT), eps);
    if (witness_json) *witness_json = dup(r.solution.to_json().dump());
    *value = r.value;
  });
}

wl_status wl_smoothed_renyi0(const wl_distribution* q, const wl_distribution* p, double eps,
                             double* bits, char** witness_json) {
  return guarded([&] {
    need(q, "q");
    need(p, "p");
    need(bits, "out");
    const auto r = worklab::smoothed_renyi0(q->value, p->value, eps);
    if (witness_json) *witness_json = dup(r.solution.to_json().dump());
    *bits = r.bits;
  });
}

wl_status wl_build_itr(const wl_levels* h_i, const wl_levels* h_f, size_t L, double kT,
                       wl_process** out) {
  return guarded([&] {
    need(h_i, "h_i");
    need(h_f, "h_f");
    need(out, "out");
    *out = new wl_process{worklab::build_itr(h_i->value, h_f->value, L, bath(kT))};
  });
}

wl_status wl_build_expected_extraction(const wl_distribution* q, const wl_levels* h,
                                       double kT, size_t L, double m_cutoff,
                                       wl_process** out) {
  return guarded([&] {
    need(q, "q");
    need(h, "levels");
    need(out, "out");
    *out = new wl_process{
        worklab::build_expected_extraction(q->value, h->value, bath(kT), L, m_cutoff)};
  });
}

wl_status wl_build_eps_extraction(const wl_distribution* q, const wl_levels* h, double kT,
                                  double eps, double E, size_t L, wl_process** out) {
  return guarded([&] {
    need(q, "q");
    need(h, "levels");
    need(out, "out");
    *out = new wl_process{
        worklab::build_eps_extraction(q->value, h->value, bath(kT), eps, E, L).process};
  });
}

wl_status wl_build_erasure(const wl_distribution* q, const wl_levels* h_i,
                           const wl_levels* h_f, double kT, size_t s, double m_cutoff,
                           size_t L, wl_process** out) {
  return guarded([&] {
    need(q, "q");
    need(h_i, "h_i");
    need(h_f, "h_f");
    need(out, "out");
    *out = new wl_process{worklab::build_erasure(q->value, h_i->value, h_f->value, bath(kT),
                                                 s, m_cutoff, L)};
  });
}

wl_status wl_process_from_json(const char* json, wl_process** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
      worklab::fail(worklab::ErrorCode::parse, e.what());
    }
    *out = new wl_process{worklab::Process::from_json(j)};
  });
}

wl_status wl_process_to_json(const wl_process* p, char** json) {
  return guarded([&] {
    need(p, "process");
    need(json, "out");
    *json = dup(p->value.to_json().dump());
  });
}

wl_status wl_process_reverse(const wl_process* p, wl_process** out) {
  return guarded([&] {
    need(p, "process");
    need(out, "out");
    *out = new wl_process{worklab::reverse(p->value)};
  });
}

void wl_process_destroy(wl_process* p) { delete p; }

wl_status wl_exact_work(const wl_process* p, const wl_distribution* q0, double kT,
                        size_t atom_cap, wl_work_dist** out) {
  return guarded([&] {
    need(p, "process");
    need(q0, "q0");
    need(out, "out");
    *out = new wl_work_dist{worklab::exact_work_distribution(
        p->value, q0->value, bath(kT), atom_cap ? atom_cap : worklab::kDefaultAtomCap)};
  });
}

wl_status wl_sample_work(const wl_process* p, const wl_distribution* q0, double kT,
                         uint64_t seed, size_t n_samples, size_t jobs, wl_work_dist** out) {
  return guarded([&] {
    need(p, "process");
    need(q0, "q0");
    need(out, "out");
    worklab::SamplingOptions opts;
    opts.seed = seed;
    opts.n_samples = n_samples;
    opts.jobs = jobs ? jobs : 1;
    *out = new wl_work_dist{worklab::sample_work(p->value, q0->value, bath(kT), opts)};
  });
}

size_t wl_work_atom_count(const wl_work_dist* w) { return w ? w->value.law.size() : 0; }

wl_status wl_work_atoms(const wl_work_dist* w, double* values, double* probs, size_t n) {
  return guarded([&] {
    need(w, "work distribution");
    need(values, "values");
    need(probs, "probs");
    const auto& atoms = w->value.law.atoms();
    if (n < atoms.size())
      worklab::fail(worklab::ErrorCode::invalid_argument, "output buffer too small");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      values[i] = atoms[i].value;
      probs[i] = atoms[i].prob;
    }
  });
}

wl_status wl_work_moments(const wl_work_dist* w, double* mean, double* variance) {
  return guarded([&] {
    need(w, "work distribution");
    if (mean) *mean = w->value.law.mean();
    if (variance) *variance = w->value.law.variance();
  });
}

wl_status wl_work_delta_set(const wl_work_dist* w, double eps, double delta, double* inf,
                            double* sup) {
  return guarded([&] {
    need(w, "work distribution");
    const auto ds = worklab::delta_set(w->value.law, eps, delta);
    if (inf) *inf = ds.infimum;
    if (sup) *sup = ds.supremum();
  });
}

wl_status wl_work_to_csv(const wl_work_dist* w, char** csv) {
  return guarded([&] {
    need(w, "work distribution");
    need(csv, "out");
    *csv = dup(w->value.law.to_csv());
  });
}

void wl_work_destroy(wl_work_dist* w) { delete w; }

wl_status wl_crooks_csv(const wl_process* p, double kT, double delta, char** csv,
                        int* all_ok) {
  return guarded([&] {
    need(p, "process");
    need(csv, "out");
    const auto b = bath(kT);
    const auto normalized = worklab::normalize(p->value);
    const auto grid = worklab::default_w_grid(normalized, b);
    const auto rows = worklab::crooks_check(normalized, b, grid, delta);
    bool ok = true;
    for (const auto& r : rows) ok = ok && r.ok;
    *csv = dup(worklab::crooks_csv(rows));
    if (all_ok) *all_ok = ok ? 1 : 0;
  });
}

namespace {

nlohmann::json parse_config(const char* text) {
  need(text, "config");
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    worklab::fail(worklab::ErrorCode::parse, e.what());
  }
}

}  // namespace

wl_status wl_validate_scenario(const char* config_json) {
  return guarded([&] { worklab::validate_scenario(parse_config(config_json)); });
}

wl_status wl_run_scenario(const char* config_json, const wl_run_options* options,
                          char** report_json, int* checks_passed) {
  return guarded([&] {
    need(report_json, "out");
    worklab::RunOverrides ov;
    if (options) {
      if (options->has_seed) ov.seed = options->seed;
      if (options->jobs) ov.jobs = options->jobs;
      if (options->atom_cap) ov.atom_cap = options->atom_cap;
      if (options->kT != 0.0) ov.kT = options->kT;
    }
    const auto report = worklab::run_scenario(parse_config(config_json), ov);
    *report_json = dup(report.dump(2));
    if (checks_passed) *checks_passed = report["checks_passed"].get<bool>() ? 1 : 0;
  });
}

}  // extern "C"
