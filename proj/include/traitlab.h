/* traitlab — corpus linguistics and machine-psychometrics toolkit.
 *
 * C interface to the traitlab shared library. All functionality is exposed
 * through opaque handles and integer status codes; strings returned as
 * `char*` are heap-allocated and must be released with tl_string_free().
 * Handles must be released with their matching *_free() function.
 *
 * Every function that can fail returns a tl_status (TL_OK == 0 on success).
 * On failure a human-readable message is available from tl_last_error()
 * until the next failing call on the same thread.
 */

#ifndef TRAITLAB_H
#define TRAITLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TRAITLAB_API __declspec(dllexport)
#else
#define TRAITLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* ---------------------------------------------------------------- status */

/* Status codes are grouped by hundreds: 1xx bad data (exit class 1),
 * 2xx usage (exit class 2), 3xx transport (exit class 3). */
typedef enum tl_status {
  TL_OK = 0,

  TL_ERR_EMPTY_CORPUS = 100,
  TL_ERR_TOO_FEW_SENTENCES = 101,
  TL_ERR_TOO_FEW_POINTS = 102,
  TL_ERR_ZERO_VARIANCE = 103,
  TL_ERR_LENGTH_MISMATCH = 104,
  TL_ERR_SAME_TRAIT = 105,
  TL_ERR_SINGULAR = 106,
  TL_ERR_UNKNOWN_DOMAIN = 107,
  TL_ERR_JOIN_EMPTY = 108,
  TL_ERR_ZERO_VARIANCE_COLUMN = 109,
  TL_ERR_UNKNOWN_ITEM = 110,
  TL_ERR_DUPLICATE_RESPONSE = 111,
  TL_ERR_BUDGET_TOO_SMALL = 112,
  TL_ERR_INSUFFICIENT_CHUNKS = 113,
  TL_ERR_UNREPRESENTABLE_TARGET = 114,
  TL_ERR_BAD_TEMPLATE = 115,
  TL_ERR_BAD_DATA = 116,
  TL_ERR_INTERNAL = 199,

  TL_ERR_USAGE = 200,
  TL_ERR_IO = 201,
  TL_ERR_INVALID_ARGUMENT = 202,
  TL_ERR_CONFIG = 203,

  TL_ERR_TRANSPORT = 300,
  TL_ERR_ALL_REQUESTS_FAILED = 301
} tl_status;

/* Maps a status to a process exit class: 0 ok, 1 bad data, 2 usage,
 * 3 transport. */
TRAITLAB_API int tl_status_exit_class(int status);

/* Message for the most recent failure on the calling thread. Never NULL. */
TRAITLAB_API const char* tl_last_error(void);

TRAITLAB_API void tl_string_free(char* s);
TRAITLAB_API const char* tl_version(void);

/* ------------------------------------------------------------- resources */

/* Lexicon bundle: verb lexicon, polarity lexicon, negation words, personal
 * and impersonal pronoun sets, sentence abbreviations, leading adverbs. */
typedef struct tl_resources tl_resources;

/* Loads the bundle from a directory containing verbs.txt, polarity.tsv,
 * negations.txt, pronouns_personal.txt, pronouns_impersonal.txt,
 * abbreviations.txt, adverbs.txt. */
TRAITLAB_API int tl_resources_open_dir(const char* dir, tl_resources** out);
TRAITLAB_API void tl_resources_free(tl_resources* r);
/* Sets the token window after a negation word in which polarity flips. */
TRAITLAB_API int tl_resources_set_negation_window(tl_resources* r, int window);
/* JSON object mapping resource file names to SHA-256 digests. */
TRAITLAB_API char* tl_resources_digests_json(const tl_resources* r);

/* ---------------------------------------------------------------- corpus */

typedef struct tl_corpus tl_corpus;

/* Loads a corpus from a UTF-8 text file, a JSON-lines file with a "text"
 * field per record, or a directory of such files. */
TRAITLAB_API int tl_corpus_open(const char* path, tl_corpus** out);
TRAITLAB_API int tl_corpus_from_string(const char* text, tl_corpus** out);
TRAITLAB_API size_t tl_corpus_doc_count(const tl_corpus* c);
TRAITLAB_API void tl_corpus_free(tl_corpus* c);

/* --------------------------------------------------------------- profile */

typedef struct tl_profile tl_profile;

typedef struct tl_profile_values {
  double imperative_ratio;
  double ttr;
  double avg_sentence_len;
  double sentiment_variance;
  double detachment;
  uint64_t n_tokens;    /* word + number tokens in the profiled sample */
  uint64_t n_sentences;
} tl_profile_values;

/* Computes the five linguistic signals over the corpus. When token_cap is
 * nonzero, whole documents are taken in seeded-shuffle order until the
 * cumulative word+number token count reaches the cap. */
TRAITLAB_API int tl_profile_corpus(const tl_corpus* c, const tl_resources* r,
                                   uint64_t token_cap, uint64_t seed,
                                   tl_profile** out);
TRAITLAB_API int tl_profile_get(const tl_profile* p, tl_profile_values* out);
TRAITLAB_API char* tl_profile_json(const tl_profile* p);
/* Single tab-separated row: imperative, TTR, complexity, sentiment,
 * detachment. */
TRAITLAB_API char* tl_profile_tsv(const tl_profile* p);
TRAITLAB_API void tl_profile_free(tl_profile* p);

/* --------------------------------------------------------- psychometrics */

/* Trait dimension indices, fixed order. */
typedef enum tl_trait {
  TL_TRAIT_OPENNESS = 0,
  TL_TRAIT_CONSCIENTIOUSNESS = 1,
  TL_TRAIT_EXTRAVERSION = 2,
  TL_TRAIT_AGREEABLENESS = 3,
  TL_TRAIT_NEUROTICISM = 4
} tl_trait;

typedef struct tl_inventory tl_inventory;

/* JSON array of {id, statement, trait: "O|C|E|A|N", key: "+|-"}. */
TRAITLAB_API int tl_inventory_open(const char* path, tl_inventory** out);
TRAITLAB_API size_t tl_inventory_item_count(const tl_inventory* inv);
TRAITLAB_API void tl_inventory_free(tl_inventory* inv);

typedef struct tl_responses tl_responses;

/* JSON-lines, one {item_id, raw} or {item_id, choice} object per line. */
TRAITLAB_API int tl_responses_open(const char* path, tl_responses** out);
TRAITLAB_API void tl_responses_free(tl_responses* r);

typedef struct tl_trait_report tl_trait_report;

TRAITLAB_API int tl_score_traits(const tl_inventory* inv,
                                 const tl_responses* resp,
                                 tl_trait_report** out);
/* mean is NaN when n_answered is 0. */
TRAITLAB_API int tl_trait_report_get(const tl_trait_report* rep, int trait,
                                     double* mean, double* sigma,
                                     uint64_t* n_answered,
                                     uint64_t* n_skipped);
TRAITLAB_API char* tl_trait_report_json(const tl_trait_report* rep);
/* One tab-separated row: mean then sigma for each of O,C,E,A,N. */
TRAITLAB_API char* tl_trait_report_tsv(const tl_trait_report* rep);
TRAITLAB_API void tl_trait_report_free(tl_trait_report* rep);

/* Returns 'A'..'E' if a choice can be extracted from the raw completion
 * text, 0 otherwise. */
TRAITLAB_API int tl_parse_choice(const char* raw);
/* Likert value 1..5 for a choice 'A'..'E'; positive_key nonzero maps A->5,
 * zero reverses. Returns 0 on a bad choice. */
TRAITLAB_API int tl_score_choice(int positive_key, char choice);

/* ------------------------------------------------------------- analytics */

typedef struct tl_trait_matrix tl_trait_matrix;

/* CSV with header "model,O,C,E,A,N". */
TRAITLAB_API int tl_trait_matrix_open_csv(const char* path,
                                          tl_trait_matrix** out);
/* Copy of the matrix without the named row. */
TRAITLAB_API int tl_trait_matrix_drop_row(const tl_trait_matrix* m,
                                          const char* model_id,
                                          tl_trait_matrix** out);
TRAITLAB_API size_t tl_trait_matrix_rows(const tl_trait_matrix* m);
TRAITLAB_API void tl_trait_matrix_free(tl_trait_matrix* m);

typedef struct tl_perf_table tl_perf_table;

/* CSV with header "model,<domain>,...". */
TRAITLAB_API int tl_perf_table_open_csv(const char* path, tl_perf_table** out);
TRAITLAB_API int tl_perf_table_drop_row(const tl_perf_table* t,
                                        const char* model_id,
                                        tl_perf_table** out);
TRAITLAB_API size_t tl_perf_table_domain_count(const tl_perf_table* t);
TRAITLAB_API const char* tl_perf_table_domain_name(const tl_perf_table* t,
                                                   size_t index);
TRAITLAB_API void tl_perf_table_free(tl_perf_table* t);

typedef struct tl_corr_matrix tl_corr_matrix;

/* Pearson correlation of every trait column against every domain column,
 * joined by model id. */
TRAITLAB_API int tl_correlate(const tl_trait_matrix* m, const tl_perf_table* t,
                              tl_corr_matrix** out);
TRAITLAB_API int tl_corr_matrix_get(const tl_corr_matrix* c, int trait,
                                    const char* domain, double* r, int* n);
TRAITLAB_API char* tl_corr_matrix_csv(const tl_corr_matrix* c);
TRAITLAB_API void tl_corr_matrix_free(tl_corr_matrix* c);

typedef struct tl_ols_fit {
  double beta0;
  double beta_j;
  double beta_k;
  double rss;
  double combo_rho;
  int n;
} tl_ols_fit;

/* Bivariate least squares of domain performance on two trait columns. */
TRAITLAB_API int tl_paired_ols(const tl_trait_matrix* m, const tl_perf_table* t,
                               const char* domain, int trait_j, int trait_k,
                               tl_ols_fit* out);
/* All unordered trait pairs for one domain as JSON-lines. */
TRAITLAB_API int tl_paired_ols_sweep(const tl_trait_matrix* m,
                                     const tl_perf_table* t,
                                     const char* domain, char** out_jsonl);

typedef struct tl_pca tl_pca;

/* Two-component PCA of the trait matrix; standardized nonzero uses the
 * correlation matrix, zero the covariance matrix. */
TRAITLAB_API int tl_pca_run(const tl_trait_matrix* m, int standardized,
                            tl_pca** out);
TRAITLAB_API int tl_pca_variance(const tl_pca* p, double out[2]);
TRAITLAB_API int tl_pca_loadings(const tl_pca* p, double out[10]);
TRAITLAB_API size_t tl_pca_score_count(const tl_pca* p);
TRAITLAB_API int tl_pca_scores(const tl_pca* p, double* out, size_t capacity);
TRAITLAB_API char* tl_pca_loadings_csv(const tl_pca* p);
TRAITLAB_API char* tl_pca_scores_csv(const tl_pca* p);
/* Standalone SVG scatter of the model scores in the PC1/PC2 plane. */
TRAITLAB_API char* tl_pca_svg(const tl_pca* p);
TRAITLAB_API void tl_pca_free(tl_pca* p);

/* --------------------------------------------------------------- sampler */

typedef struct tl_sample_result tl_sample_result;

/* Chunks every document under input_path into seq_len-token sequences and
 * draws a seeded uniform sample totaling at least budget_tokens. */
TRAITLAB_API int tl_sample_corpus(const char* input_path,
                                  uint64_t budget_tokens, uint32_t seq_len,
                                  uint64_t seed, tl_sample_result** out);
TRAITLAB_API uint64_t tl_sample_count(const tl_sample_result* s);
TRAITLAB_API char* tl_sample_chunks_jsonl(const tl_sample_result* s);
TRAITLAB_API char* tl_sample_manifest_json(const tl_sample_result* s);
TRAITLAB_API void tl_sample_result_free(tl_sample_result* s);

/* ----------------------------------------------------------------- synth */

typedef struct tl_synth_result tl_synth_result;

/* target_json: {"imperative_ratio":f, "detachment":f, "polarities":[f,...],
 * "ttr_band":[lo,hi], "n_sentences":n, "seed":n}. Returns both the corpus
 * text and the profile it realizes by construction. */
TRAITLAB_API int tl_synth_generate(const char* target_json,
                                   const tl_resources* r,
                                   tl_synth_result** out);
TRAITLAB_API const char* tl_synth_text(const tl_synth_result* s);
TRAITLAB_API char* tl_synth_expected_json(const tl_synth_result* s);
TRAITLAB_API void tl_synth_result_free(tl_synth_result* s);

/* ---------------------------------------------------------------- client */

typedef struct tl_client_options {
  const char* base_url;    /* e.g. "https://api.example.com/v1" */
  const char* model;
  const char* api_key_env; /* name of the env var holding the key; may be "" */
  double temperature;
  int max_tokens;
  int max_retries; /* attempts per item */
  int concurrency; /* max in-flight requests */
  double timeout_seconds;
  int retry_base_ms; /* first backoff step; 0 = default */
} tl_client_options;

typedef struct tl_admin_run tl_admin_run;

/* Administers every inventory item against an OpenAI-compatible
 * chat-completions endpoint. template_text NULL selects the built-in
 * prompt; otherwise it must contain the {statement} placeholder. */
TRAITLAB_API int tl_administer(const tl_inventory* inv,
                               const tl_client_options* opts,
                               const char* template_text, tl_admin_run** out);
TRAITLAB_API char* tl_admin_run_json(const tl_admin_run* run);
TRAITLAB_API char* tl_admin_run_responses_jsonl(const tl_admin_run* run);
TRAITLAB_API void tl_admin_run_free(tl_admin_run* run);

/* Renders a prompt template against one item statement. NULL and
 * TL_ERR_BAD_TEMPLATE via tl_last_error() if the placeholder is missing. */
TRAITLAB_API char* tl_render_prompt(const char* template_text,
                                    const char* statement);

#ifdef __cplusplus
}
#endif

#endif /* TRAITLAB_H */
