/* posdefkit C API: positive definite functions on countable abelian groups
 * realized as correlation functions of explicit unimodular sequences and
 * simulated stationary Gaussian ensembles, with Hoeffding certificates.
 *
 * All objects are opaque handles freed with their pdk_*_free function.
 * Functions return PDK_OK (0) on success; on failure they return a status
 * code and leave a thread-local message readable via pdk_last_error().
 * Elements of a rank-r group are arrays of r int64 coordinates; complex
 * results are written as separate real/imaginary doubles.
 */

#ifndef POSDEFKIT_H
#define POSDEFKIT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pdk_status {
  PDK_OK = 0,
  PDK_ERROR_INVALID = 2, /* validation failure (matches the CLI exit code) */
  PDK_ERROR_NUMERIC = 3, /* numerical rejection (indefinite phi, sampler failure) */
  PDK_ERROR_INTERNAL = 4
} pdk_status;

typedef struct pdk_group pdk_group;
typedef struct pdk_measure pdk_measure;
typedef struct pdk_phi pdk_phi;
typedef struct pdk_sequence pdk_sequence;
typedef struct pdk_report pdk_report;

const char *pdk_version(void);
/* Message of the most recent failure on this thread; empty if none. */
const char *pdk_last_error(void);

/* -- groups --------------------------------------------------------------- */

/* Descriptor text: "Z", "Z^d", "C(m)", "C(m)^L". */
pdk_status pdk_group_parse(const char *text, pdk_group **out);
void pdk_group_free(pdk_group *g);
int64_t pdk_group_rank(const pdk_group *g);

pdk_status pdk_group_add(const pdk_group *g, const int64_t *a, const int64_t *b, int64_t *sum);
pdk_status pdk_group_neg(const pdk_group *g, const int64_t *a, int64_t *out);

/* Character evaluation: pass theta (length rank) for lattices and NULL for
 * residues, or the reverse for cyclic sums. */
pdk_status pdk_group_char_eval(const pdk_group *g, const double *theta, const int64_t *residues,
                               const int64_t *elem, double *re, double *im);

/* |KF symdiff F| / |F| over flat coordinate buffers (count x rank). */
pdk_status pdk_group_invariance_defect(const pdk_group *g, const int64_t *k_flat,
                                       int64_t k_count, const int64_t *f_flat, int64_t f_count,
                                       double *defect);

/* S(G): full_circle=1 for lattices, else root_order = m. */
pdk_status pdk_group_s_of_g(const pdk_group *g, int *full_circle, int64_t *root_order);

/* -- spectral measures ---------------------------------------------------- */

/* components_json: {"components": [{"type": "atom"|"uniform"|"uniform_box"|
 * "trig_poly", ..., "weight": w}, ...]}; weights must sum to 1. */
pdk_status pdk_measure_parse(const pdk_group *g, const char *components_json,
                             pdk_measure **out);
void pdk_measure_free(pdk_measure *m);
pdk_status pdk_measure_fourier(const pdk_measure *m, const int64_t *g, double *re, double *im);
pdk_status pdk_measure_atom_weight(const pdk_measure *m, const double *theta,
                                   const int64_t *residues, double *weight);

/* -- positive definite functions ------------------------------------------ */

/* Catalog names: eigenvalue_sqrt2, fejer1, delta, two_atom_half. */
pdk_status pdk_phi_catalog(const char *name, pdk_phi **out);
pdk_status pdk_phi_from_measure(const pdk_measure *m, pdk_phi **out);
void pdk_phi_free(pdk_phi *phi);
pdk_status pdk_phi_eval(const pdk_phi *phi, const int64_t *g, double *re, double *im);

/* Pivoted-Cholesky PSD verdict over explicit windows (flat element buffers;
 * window_sizes lists the element count of each window). passed is 1/0;
 * min_pivot reports the smallest accepted pivot or the violating value. */
pdk_status pdk_phi_check_positive_definite(const pdk_phi *phi, const int64_t *windows_flat,
                                           const int64_t *window_sizes, int64_t n_windows,
                                           double tol_scale, int *passed,
                                           int64_t *worst_window, double *min_pivot);

/* -- sequence builders ----------------------------------------------------- */

/* mode: "strict" | "practical". k_radii may be NULL (defaults to 1..depth).
 * min_window raises the final Folner level to at least that many points. */
pdk_status pdk_sequence_build_tiled(const pdk_measure *m, int64_t depth, const char *mode,
                                    double practical_constant, const int64_t *k_radii,
                                    int64_t n_radii, int64_t min_window, uint64_t seed,
                                    pdk_sequence **out);
/* Z only; block lengths must be strictly increasing. */
pdk_status pdk_sequence_build_blocks(const pdk_measure *m, const int64_t *block_lengths,
                                     int64_t n_blocks, uint64_t seed, pdk_sequence **out);
void pdk_sequence_free(pdk_sequence *s);

int64_t pdk_sequence_total(const pdk_sequence *s);
pdk_status pdk_sequence_value(const pdk_sequence *s, int64_t flat_index, double *re, double *im);
/* Independent-draw count backing certificates (top-level centers / blocks). */
int64_t pdk_sequence_effective_draws(const pdk_sequence *s);

/* Folner-averaged correlation at lag h over F = window shrunk by h, with a
 * Hoeffding certificate at confidence delta. */
pdk_status pdk_sequence_correlation(const pdk_sequence *s, const int64_t *h, double delta,
                                    double *re, double *im, int64_t *n, double *radius);
/* (1/|F|) sum seq(g) conj(chi(g)); estimates the atom mass nu({chi}). */
pdk_status pdk_sequence_atom_estimate(const pdk_sequence *s, const double *theta,
                                      const int64_t *residues, double *re, double *im);

/* -- concentration certificates -------------------------------------------- */

pdk_status pdk_hoeffding_bound(int64_t n, double x, double *bound);
pdk_status pdk_complex_hoeffding_bound(int64_t n, double x, double *bound);
/* Smallest x with 4 exp(-n x^2 / 2) <= delta. */
pdk_status pdk_certify_radius(int64_t n, double delta, double *radius);

/* -- full runs -------------------------------------------------------------- */

/* Executes a JSON run config (the CLI format) and returns the report.
 * Configured out-paths are written as a side effect. The structured
 * rendering is byte-stable for identical configs. */
pdk_status pdk_run_config(const char *config_json, pdk_report **out);
void pdk_report_free(pdk_report *r);
const char *pdk_report_structured(const pdk_report *r);
const char *pdk_report_rows(const pdk_report *r);
const char *pdk_report_plotdata(const pdk_report *r);
/* 0 success, 2 validation failure, 3 numerical rejection / failed verdict. */
int pdk_report_exit_code(const pdk_report *r);

#ifdef __cplusplus
}
#endif

#endif /* POSDEFKIT_H */
