/* polarqkd: rotation-based quantum key distribution simulator.
 *
 * C API over the C++ core. All functions return a pqkd status code; output
 * strings are heap-allocated and must be released with pqkd_free(). Handles
 * are opaque and must be released with their matching *_free function.
 * Error details for the calling thread are available via pqkd_last_error().
 */
#ifndef POLARQKD_H
#define POLARQKD_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes (the CLI maps these directly onto exit codes). */
#define PQKD_OK 0
#define PQKD_ERR_USAGE 2      /* bad arguments, bad config, I/O failure */
#define PQKD_ERR_STATCHECK 3  /* a statistical self-check failed (strict mode) */

typedef struct pqkd_config pqkd_config;

const char* pqkd_version(void);

/* Last error message for the calling thread; empty string if none. */
const char* pqkd_last_error(void);

void pqkd_free(char* text);

/* ---- noise formulas -------------------------------------------------- */

/* Closed-form flip probability for `links` noisy traversals of half-width x. */
int pqkd_error_prob_exact(double x, int links, double* out);

/* Small-x series approximation. */
int pqkd_error_prob_series(double x, int links, double* out);

/* Simpson-rule integration of the link-sum density times sin^2; independent
 * numerical route for the closed form. steps must be even and >= 100. */
int pqkd_error_prob_quadrature(double x, int links, int steps, double* out);

/* Density of the sum of `links` independent uniform errors at angle phi. */
int pqkd_pdf_sum_links(int links, double x, double phi, double* out);

/* Text report comparing exact, series and quadrature values. */
int pqkd_analyze(double x, int links, char** out_text);

/* ---- figure reproduction --------------------------------------------- */

/* Emits the error-probability curve as CSV (columns: x, analytic_exact,
 * analytic_series, monte_carlo, trials, std_error). figure_id 4 uses one
 * link, 6 uses two. Writes to out_csv_path when non-NULL and/or returns the
 * CSV text through out_csv_text when non-NULL. With strict != 0, returns
 * PQKD_ERR_STATCHECK if any row fails its 3-sigma self-check (the CSV is
 * still produced). */
int pqkd_figure(int figure_id, double x_min, double x_max, int grid_steps,
                long long trials, unsigned long long seed, int strict,
                const char* out_csv_path, char** out_csv_text);

/* ---- simulation ------------------------------------------------------ */

pqkd_config* pqkd_config_new(void);
pqkd_config* pqkd_config_load(const char* path); /* NULL on error */
int pqkd_config_set(pqkd_config* config, const char* key, const char* value);
int pqkd_config_text(const pqkd_config* config, char** out_text);
void pqkd_config_free(pqkd_config* config);

/* Runs the configured protocol; the summary report is returned through
 * out_report and a transcript file is written when the config sets
 * transcript_out. */
int pqkd_simulate(const pqkd_config* config, char** out_report);

/* ---- reconciliation -------------------------------------------------- */

/* Synthesizes a key pair with bit-flip rate `qber`, reconciles it, and
 * reports parity/deletion accounting and the hash verification verdict. */
int pqkd_reconcile_demo(double qber, long long key_bits, unsigned long long seed,
                        char** out_report);

/* ---- self test ------------------------------------------------------- */

/* Fast internal consistency checks; PQKD_ERR_STATCHECK if any fails. */
int pqkd_self_test(unsigned long long seed, char** out_report);

#ifdef __cplusplus
}
#endif

#endif /* POLARQKD_H */
