/* rrglab: random regular graph spectral laboratory.
 *
 * C API over the core library: opaque handles, integer status codes, plain
 * double output parameters. All handles are immutable after creation and safe
 * to share across threads; every create has a matching free. Strings returned
 * through char** are heap-allocated and released with rrg_free_string().
 */
#ifndef RRGLAB_H
#define RRGLAB_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define RRG_API __declspec(dllexport)
#else
#define RRG_API __attribute__((visibility("default")))
#endif

typedef enum rrg_status {
  RRG_OK = 0,
  RRG_ERR_INVALID_ARGUMENT = 1, /* bad parameter or precondition */
  RRG_ERR_PARITY = 2,           /* n*d odd */
  RRG_ERR_REJECTION_BUDGET = 3, /* sampler attempt cap exhausted */
  RRG_ERR_NO_OUTSIDE_EDGES = 4, /* ball swallowed the graph */
  RRG_ERR_SINGULAR = 5,         /* linear algebra breakdown */
  RRG_ERR_PARSE = 6,            /* malformed regraph v1 / config text */
  RRG_ERR_IO = 7,               /* file system failure */
  RRG_ERR_INTERNAL = 8
} rrg_status;

/* Static description of a status code. */
RRG_API const char* rrg_status_message(rrg_status status);

/* Thread-local detail message for the most recent failing call. */
RRG_API const char* rrg_last_error(void);

RRG_API void rrg_free_string(char* text);

/* ------------------------------------------------------------------ */
/* Graphs                                                              */

typedef struct rrg_graph rrg_graph;

/* Uniform simple d-regular graph via the pairing model with whole-graph
 * rejection. max_attempts <= 0 selects the default cap. */
RRG_API rrg_status rrg_graph_sample_uniform(int n, int d, uint64_t seed,
                                            int64_t max_attempts,
                                            rrg_graph** out);

/* "regraph v1" text format: header line "n d", one "u v" line per edge,
 * 0-based, u < v, lexicographically sorted, every line newline-terminated. */
RRG_API rrg_status rrg_graph_from_string(const char* text, rrg_graph** out);
RRG_API rrg_status rrg_graph_to_string(const rrg_graph* g, char** out_text);
RRG_API rrg_status rrg_graph_load(const char* path, rrg_graph** out);
RRG_API rrg_status rrg_graph_save(const rrg_graph* g, const char* path);

RRG_API int rrg_graph_vertex_count(const rrg_graph* g);
RRG_API int rrg_graph_degree(const rrg_graph* g);
RRG_API int rrg_graph_has_edge(const rrg_graph* g, int u, int v);
/* BFS distance, -1 when disconnected. */
RRG_API int rrg_graph_distance(const rrg_graph* g, int u, int v);
RRG_API void rrg_graph_free(rrg_graph* g);

typedef struct rrg_omega_bar_report {
  int radius;
  int excess_cap;
  int64_t bad_vertex_count;
  int max_excess;
  double bad_vertex_threshold;
  int holds;
} rrg_omega_bar_report;

/* Radius-R tree-neighborhood census; radius_override <= 0 selects
 * R = max(1, floor((c/4) log_{d-1} n)). */
RRG_API rrg_status rrg_graph_omega_bar_census(const rrg_graph* g, double c,
                                              int omega_d, int radius_override,
                                              rrg_omega_bar_report* out);

/* ------------------------------------------------------------------ */
/* Spectra                                                             */

typedef struct rrg_spectrum rrg_spectrum;

RRG_API rrg_status rrg_spectrum_compute(const rrg_graph* g,
                                        rrg_spectrum** out);
RRG_API int rrg_spectrum_size(const rrg_spectrum* s);
/* Borrowed pointer to the descending eigenvalues of H = A/sqrt(d-1). */
RRG_API const double* rrg_spectrum_values(const rrg_spectrum* s);
/* Stieltjes transform m(z) of the record at z = E + i eta. */
RRG_API rrg_status rrg_spectrum_stieltjes(const rrg_spectrum* s, double e,
                                          double eta, double* m_re,
                                          double* m_im);
/* KS distance between the empirical CDF of lambda_2..lambda_N and the
 * Kesten-McKay CDF. Needs the spectrum's degree, stored at creation. */
RRG_API rrg_status rrg_spectrum_esd_vs_km(const rrg_spectrum* s,
                                          double* distance);
RRG_API void rrg_spectrum_free(rrg_spectrum* s);

/* ------------------------------------------------------------------ */
/* Closed-form spectral laws                                           */

/* Kesten-McKay density at x (zero outside [-2,2]). */
RRG_API double rrg_rho_d(int d, double x);
/* Integral of rho_d over [x, 2]. */
RRG_API double rrg_km_cdf_from_right(int d, double x);
/* Semicircle Stieltjes transform, branch with positive imaginary part. */
RRG_API rrg_status rrg_m_sc(double e, double eta, double* re, double* im);
RRG_API rrg_status rrg_m_d(int d, double e, double eta, double* re,
                           double* im);
/* 1 iff |E| <= 2+a, 0 < eta <= 1/a and N eta sqrt(kappa+eta) >= N^a. */
RRG_API int rrg_in_spectral_domain(int n, double e, double eta, double a,
                                   double c);
RRG_API rrg_status rrg_error_params(int d, int n, double e, double eta,
                                    double r_frac, double log_power,
                                    double* eps_prime, double* eps);

typedef struct rrg_gamma_table rrg_gamma_table;

/* Classical locations gamma_2 >= ... >= gamma_N for (n, d). */
RRG_API rrg_status rrg_classical_locations(int n, int d,
                                           rrg_gamma_table** out);
RRG_API int rrg_gamma_count(const rrg_gamma_table* t); /* n - 1 entries */
/* Borrowed pointer; entry j holds gamma_{j+2}. */
RRG_API const double* rrg_gamma_values(const rrg_gamma_table* t);
RRG_API void rrg_gamma_free(rrg_gamma_table* t);

/* ------------------------------------------------------------------ */
/* Green's function diagnostics                                        */

typedef struct rrg_greens_report {
  double e, eta;
  double m_re, m_im;       /* normalized trace of G */
  double m_sc_re, m_sc_im; /* reference transforms at z */
  double m_d_re, m_d_im;
  double q_re, q_im; /* Q(z; G) */
  double y_of_q_re, y_of_q_im;
  double x_of_q_re, x_of_q_im;
  double q_minus_y_abs;
  double m_minus_x_abs;
  double ward_row_max; /* Ward identity deviations */
  double ward_aggregate;
  double phi; /* N^c Im m / (N eta) */
} rrg_greens_report;

RRG_API rrg_status rrg_greens_eval(const rrg_graph* g, double e, double eta,
                                   int ell, double c, rrg_greens_report* out);

/* ------------------------------------------------------------------ */
/* Rigidity                                                            */

/* r_out must hold n-1 entries (r_i at index i-2). */
RRG_API rrg_status rrg_rigidity_profile(const rrg_spectrum* s,
                                        const rrg_gamma_table* gamma,
                                        double* r_out, double* max_r,
                                        int* argmax_i);

/* Parameters of the edge exclusion window at size n. */
RRG_API void rrg_edge_window_params(int n, double* kappa, double* eta);

/* Envelope of the Stieltjes concentration bound at z for size n. */
RRG_API double rrg_stieltjes_envelope(int n, double e, double eta);

/* Least-squares slope of y against x with standard error (>= 3 points). */
RRG_API rrg_status rrg_fit_slope(const double* x, const double* y, int count,
                                 double* slope, double* stderr_out);

/* Deterministic per-sample stream derivation, the same rule the library's
 * own Monte-Carlo runners use. */
RRG_API uint64_t rrg_derive_stream(uint64_t seed, uint64_t index);

/* ------------------------------------------------------------------ */
/* Experiment runners (JSON in, JSON out)                              */

/* Local resampling report. Config keys (all optional unless noted):
 *   n, d (required), ell, trials, seed, threads, big_r,
 *   statistic: "lambda2" | "triangles" | "im_m_i" | "constant",
 *   bias: "uniform" | "spectral",
 *   woodbury_k, woodbury_trials, woodbury_e, woodbury_eta.
 * Report: admissibility rates, collision counts, reversibility rate,
 * exchangeability p-values, Woodbury decay table. */
RRG_API rrg_status rrg_resample_run(const char* config_json, char** out_json);

/* Woodbury truncation study. Config: n, d (required), ell, trials, seed,
 * threads, e, eta, k_max, big_r. */
RRG_API rrg_status rrg_woodbury_run(const char* config_json, char** out_json);

/* Self-consistent moment comparison. Config: n (or sizes array), d, ell,
 * e, eta, p, samples, seed, threads. */
RRG_API rrg_status rrg_moments_run(const char* config_json, char** out_json);

/* Edge window exclusion counts. Config: n, d, samples, seed, threads. */
RRG_API rrg_status rrg_edge_window_run(const char* config_json,
                                       char** out_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RRGLAB_H */
