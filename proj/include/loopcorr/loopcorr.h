#ifndef LOOPCORR_H
#define LOOPCORR_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lc_status {
  LC_OK = 0,
  LC_PARSE_ERROR,
  LC_REALIZATION_MISMATCH,
  LC_SINGULAR_PRODUCT,
  LC_DIVERGENT_KERNEL,
  LC_MISSING_MU,
  LC_STRUCTURAL_VIOLATION,
  LC_INVALID_ARGUMENT,
  LC_INTERNAL
} lc_status;

typedef struct lc_context lc_context;
typedef struct lc_expr lc_expr;

/* Diagnostics of the last failing call on this thread. */
const char* lc_status_name(lc_status s);
const char* lc_last_error(void);
/* 1-based byte offset of the last parse error, -1 when not applicable */
long lc_last_error_offset(void);

/* Strings returned through char** outputs are owned by the caller. */
void lc_free_string(char* s);

/*
 * Configuration JSON, every field optional:
 *   realization  "A" | "K"              (inferred from the word when absent)
 *   sector       "nonunitary" | "unitary"
 *   kappa, p     exact rationals as strings; substituted into results when given
 *   lambda       exact rational string
 *   xi           {"kind":"geometric","q":"1/2","xi0":"1"} and the other sequence forms
 *   scheme       {"policy":"drop-loops"|"mu"|"unitary-dotted","mu":{"2":"1"},"mu_default":"0",
 *                 "symbolic_mu":false,"dotted_rule":"both"|"either"}
 *   rho          "auto" | "proof" | "modes"
 *   trunc        mode truncation N for numerics (default 8)
 *   radius       insertion radius, 1 places every current on the circle (default 1)
 *   grid         quadrature points per dimension for smearing, 0 for the default
 */
lc_status lc_context_create(const char* config_json, lc_context** out);
void lc_context_destroy(lc_context* ctx);
/* Normalized configuration as JSON. */
lc_status lc_context_config(const lc_context* ctx, char** out_json);

/* Renormalized correlator of a current word such as "Jp(1) Jm(2)". */
lc_status lc_evaluate(const lc_context* ctx, const char* word, lc_expr** out);
void lc_expr_destroy(lc_expr* e);
lc_status lc_expr_json(const lc_expr* e, char** out_json);
lc_status lc_expr_text(const lc_expr* e, char** out_text);
size_t lc_expr_term_count(const lc_expr* e);
/* Number of singular factor patterns left in the expression. */
size_t lc_expr_singularity_count(const lc_expr* e);
/* [{"term":i,"kind":"cycle","cycle_length":k,"labels":[...]},...] */
lc_status lc_expr_singularities(const lc_expr* e, char** out_json);
/* Pairing with Fourier test polynomials: {"1":[[n,re,im],...],...} keyed by label. */
lc_status lc_expr_smear(const lc_context* ctx, const lc_expr* e, const char* tests_json, double* re, double* im);

/* Commutator relations with spectator contexts up to the given length. */
lc_status lc_commcheck(const lc_context* ctx, int max_context, char** out_json, int* all_pass);

/* Contraction diagrams of a word; format "dot" or "json". */
lc_status lc_diagrams(const lc_context* ctx, const char* word, const char* format, char** out);

/* Gram matrix of [{"word":"Jp(1)","tests":{"1":[[1,1,0]]}},...]. */
lc_status lc_gram(const lc_context* ctx, const char* basis_json, char** out_json);

/* Brute-force operator oracle for a word at angles {"1":0.3,...}; radii from the context. */
lc_status lc_oracle(const lc_context* ctx, const char* word, const char* angles_json, double* re, double* im);

/* Fast invariant suite. */
lc_status lc_selfcheck(const lc_context* ctx, char** out_json, int* all_pass);

#ifdef __cplusplus
}
#endif

#endif
