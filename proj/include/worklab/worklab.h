#ifndef WORKLAB_WORKLAB_H
#define WORKLAB_WORKLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define WL_API __declspec(dllexport)
#else
#define WL_API __attribute__((visibility("default")))
#endif

typedef enum wl_status {
  WL_OK = 0,
  WL_ERR_INVALID_ARGUMENT = 1,
  WL_ERR_DOMAIN = 2,
  WL_ERR_CAP_EXCEEDED = 3,
  WL_ERR_PARSE = 4,
  WL_ERR_VALIDATION = 5,
  WL_ERR_INTERNAL = 6
} wl_status;

typedef struct wl_levels wl_levels;
typedef struct wl_distribution wl_distribution;
typedef struct wl_process wl_process;
typedef struct wl_work_dist wl_work_dist;

/* Zero fields mean "use the config value". */
typedef struct wl_run_options {
  int has_seed;
  uint64_t seed;
  size_t jobs;
  size_t atom_cap;
  double kT;
} wl_run_options;

WL_API const char* wl_version(void);
/* Message of the last failed call on this thread; empty after success. */
WL_API const char* wl_last_error(void);
WL_API void wl_string_free(char* s);

/* Energy levels and distributions. State indices are 0-based. */
WL_API wl_status wl_levels_create(const double* h, size_t n, wl_levels** out);
WL_API void wl_levels_destroy(wl_levels* h);
WL_API size_t wl_levels_size(const wl_levels* h);
WL_API wl_status wl_levels_get(const wl_levels* h, double* out, size_t n);

WL_API wl_status wl_distribution_create(const double* p, size_t n, wl_distribution** out);
WL_API void wl_distribution_destroy(wl_distribution* q);
WL_API size_t wl_distribution_size(const wl_distribution* q);
WL_API wl_status wl_distribution_get(const wl_distribution* q, double* out, size_t n);

/* Thermodynamic quantities; kT > 0. Entropies are in bits. */
WL_API wl_status wl_gibbs(const wl_levels* h, double kT, wl_distribution** out);
WL_API wl_status wl_log_partition(const wl_levels* h, double kT, double* out);
WL_API wl_status wl_free_energy(const wl_levels* h, double kT, double* out);
WL_API wl_status wl_relative_entropy(const wl_distribution* q, const wl_distribution* p,
                                     double* bits);
WL_API wl_status wl_work_content(const wl_distribution* q, const wl_levels* h, double kT,
                                 double* out);
/* witness_json may be NULL; otherwise receives a string to release with
   wl_string_free. */
WL_API wl_status wl_eps_free_energy(const wl_distribution* q, const wl_levels* h, double kT,
                                    double eps, double* value, char** witness_json);
WL_API wl_status wl_smoothed_renyi0(const wl_distribution* q, const wl_distribution* p,
                                    double eps, double* bits, char** witness_json);

/* Process construction. */
WL_API wl_status wl_build_itr(const wl_levels* h_i, const wl_levels* h_f, size_t L, double kT,
                              wl_process** out);
WL_API wl_status wl_build_expected_extraction(const wl_distribution* q, const wl_levels* h,
                                              double kT, size_t L, double m_cutoff,
                                              wl_process** out);
WL_API wl_status wl_build_eps_extraction(const wl_distribution* q, const wl_levels* h,
                                         double kT, double eps, double E, size_t L,
                                         wl_process** out);
WL_API wl_status wl_build_erasure(const wl_distribution* q, const wl_levels* h_i,
                                  const wl_levels* h_f, double kT, size_t s, double m_cutoff,
                                  size_t L, wl_process** out);
WL_API wl_status wl_process_from_json(const char* json, wl_process** out);
WL_API wl_status wl_process_to_json(const wl_process* p, char** json);
WL_API wl_status wl_process_reverse(const wl_process* p, wl_process** out);
WL_API void wl_process_destroy(wl_process* p);

/* Work laws. atom_cap = 0 selects the default cap. */
WL_API wl_status wl_exact_work(const wl_process* p, const wl_distribution* q0, double kT,
                               size_t atom_cap, wl_work_dist** out);
WL_API wl_status wl_sample_work(const wl_process* p, const wl_distribution* q0, double kT,
                                uint64_t seed, size_t n_samples, size_t jobs,
                                wl_work_dist** out);
WL_API size_t wl_work_atom_count(const wl_work_dist* w);
WL_API wl_status wl_work_atoms(const wl_work_dist* w, double* values, double* probs, size_t n);
WL_API wl_status wl_work_moments(const wl_work_dist* w, double* mean, double* variance);
/* inf and sup of {x : P(|W - x| <= delta) > 1 - eps}; inf = +inf, sup = -inf
   when the set is empty. */
WL_API wl_status wl_work_delta_set(const wl_work_dist* w, double eps, double delta,
                                   double* inf, double* sup);
WL_API wl_status wl_work_to_csv(const wl_work_dist* w, char** csv);
WL_API void wl_work_destroy(wl_work_dist* w);

/* Crooks sandwich on the default grid; *all_ok is 1 when every row holds. */
WL_API wl_status wl_crooks_csv(const wl_process* p, double kT, double delta, char** csv,
                               int* all_ok);

/* Scenario configs and reports are JSON text. options may be NULL. */
WL_API wl_status wl_validate_scenario(const char* config_json);
WL_API wl_status wl_run_scenario(const char* config_json, const wl_run_options* options,
                                 char** report_json, int* checks_passed);

#ifdef __cplusplus
}
#endif

#endif
