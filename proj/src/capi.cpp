#include "traitlab.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "analytics.hpp"
#include "corpus_io.hpp"
#include "error.hpp"
#include "lexicons.hpp"
#include "mpi_client.hpp"
#include "profiler.hpp"
#include "psychometrics.hpp"
#include "sampler.hpp"
#include "svg_plot.hpp"
#include "synthgen.hpp"
#include "tokenizer.hpp"

using traitlab::errc;

static_assert(static_cast<int>(errc::empty_corpus) == TL_ERR_EMPTY_CORPUS);
static_assert(static_cast<int>(errc::bad_data) == TL_ERR_BAD_DATA);
static_assert(static_cast<int>(errc::invalid_argument) ==
              TL_ERR_INVALID_ARGUMENT);
static_assert(static_cast<int>(errc::all_requests_failed) ==
              TL_ERR_ALL_REQUESTS_FAILED);
static_assert(static_cast<int>(errc::unrepresentable_target) ==
              TL_ERR_UNREPRESENTABLE_TARGET);

struct tl_resources {
  traitlab::Resources res;
};
struct tl_corpus {
  std::vector<traitlab::CorpusDoc> docs;
};
struct tl_profile {
  traitlab::CorpusProfile p;
};
struct tl_inventory {
  std::vector<traitlab::MpiItem> items;
};
struct tl_responses {
  std::vector<traitlab::MpiResponse> responses;
};
struct tl_trait_report {
  traitlab::TraitReport rep;
};
struct tl_trait_matrix {
  traitlab::TraitMatrix m;
};
struct tl_perf_table {
  traitlab::PerformanceTable t;
};
struct tl_corr_matrix {
  traitlab::CorrelationMatrix m;
};
struct tl_pca {
  traitlab::PcaResult p;
  std::vector<std::string> models;
};
struct tl_sample_result {
  traitlab::SampleRun run;
};
struct tl_synth_result {
  traitlab::SynthResult r;
};
struct tl_admin_run {
  traitlab::AdministrationRun run;
};

namespace {

thread_local std::string g_last_error = "no error";

template <typename Fn>
int guarded(Fn&& fn) noexcept {
  try {
    fn();
    return TL_OK;
  } catch (const traitlab::error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return TL_ERR_BAD_DATA;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TL_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return TL_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Returns NULL and records the error when fn throws.
template <typename Fn>
char* guarded_string(Fn&& fn) noexcept {
  std::string value;
  int rc = guarded([&] { value = fn(); });
  return rc == TL_OK ? dup_string(value) : nullptr;
}

int usage_error(const char* message) {
  g_last_error = message;
  return TL_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

int tl_status_exit_class(int status) {
  if (status == TL_OK) return 0;
  if (status >= 300) return 3;
  if (status >= 200) return 2;
  return 1;
}

const char* tl_last_error(void) { return g_last_error.c_str(); }

void tl_string_free(char* s) { std::free(s); }

const char* tl_version(void) { return "0.1.0"; }

/* ---------------------------------------------------------- resources */

int tl_resources_open_dir(const char* dir, tl_resources** out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  *out = nullptr;
  if (dir == nullptr) return usage_error("dir must not be NULL");
  return guarded([&] {
    auto handle = new tl_resources{traitlab::Resources::load_dir(dir)};
    *out = handle;
  });
}

void tl_resources_free(tl_resources* r) { delete r; }

int tl_resources_set_negation_window(tl_resources* r, int window) {
  if (r == nullptr) return usage_error("resources must not be NULL");
  if (window < 0) return usage_error("window must be >= 0");
  r->res.polarity.window = window;
  return TL_OK;
}

char* tl_resources_digests_json(const tl_resources* r) {
  if (r == nullptr) {
    usage_error("resources must not be NULL");
    return nullptr;
  }
  return guarded_string([&] { return r->res.digests_json(); });
}

/* ------------------------------------------------------------- corpus */

int tl_corpus_open(const char* path, tl_corpus** out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  *out = nullptr;
  if (path == nullptr) return usage_error("path must not be NULL");
  return guarded([&] {
    *out = new tl_corpus{traitlab::load_corpus_path(path)};
  });
}

int tl_corpus_from_string(const char* text, tl_corpus** out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  *out = nullptr;
  if (text == nullptr) return usage_error("text must not be NULL");
  return guarded([&] {
    *out = new tl_corpus{{{"<memory>", text}}};
  });
}

size_t tl_corpus_doc_count(const tl_corpus* c) {
  return c == nullptr ? 0 : c->docs.size();
}

void tl_corpus_free(tl_corpus* c) { delete c; }

/* ------------------------------------------------------------ profile */

int tl_profile_corpus(const tl_corpus* c, const tl_resources* r,
                      uint64_t token_cap, uint64_t seed, tl_profile** out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  *out = nullptr;
  if (c == nullptr || r == nullptr) {
    return usage_error("corpus and resources must not be NULL");
  }
  return guarded([&] {
    std::vector<traitlab::text::Document> docs;
    docs.reserve(c->docs.size());
    for (const auto& d : c->docs) {
      docs.push_back(traitlab::text::parse_document(d.text, r->res.abbrev));
    }
    traitlab::ProfileOptions opts;
    opts.token_cap = token_cap;
    opts.seed = seed;
    *out = new tl_profile{traitlab::profile(docs, r->res, opts)};
  });
}

int tl_profile_get(const tl_profile* p, tl_profile_values* out) {
  if (p == nullptr || out == nullptr) {
    return usage_error("profile and out must not be NULL");
  }
  out->imperative_ratio = p->p.imperative_ratio;
  out->ttr = p->p.ttr;
  out->avg_sentence_len = p->p.avg_sentence_len;
  out->sentiment_variance = p->p.sentiment_variance;
  out->detachment = p->p.detachment;
  out->n_tokens = p->p.n_tokens;
  out->n_sentences = p->p.n_sentences;
  return TL_OK;
}

char* tl_profile_json(const tl_profile* p) {
  if (p == nullptr) {
    usage_error("profile must not be NULL");
    return nullptr;
  }
  return guarded_string([&] { return traitlab::profile_json(p->p); });
}

char* tl_profile_tsv(const tl_profile* p) {
  if (p == nullptr) {
    usage_error("profile must not be NULL");
    return nullptr;
  }
  return guarded_string([&] { return traitlab::profile_tsv(p->p); });
}

void tl_profile_free(tl_profile* p) { delete p; }

/* ------------------------------------------------------ psychometrics */

int tl_inventory_open(const char* path, tl_inventory** out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  *out = nullptr;
  if (path == nullptr) return usage_error("path must not be NULL");
  return guarded([&] {
    *out = new tl_inventory{traitlab::load_inventory(path)};
  });
}

size_t tl_inventory_item_count(const tl_inventory* inv) {
  return inv == nullptr ? 0 : inv->items.size();
}

void tl_inventory_free(tl_inventory* inv) { delete inv; }

int tl_responses_open(const char* path, tl_responses** out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  *out = nullptr;
  if (path == nullptr) return usage_error("path must not be NULL");
  return guarded([&] {
    *out = new tl_responses{traitlab::load_responses(path)};
  });
}

void tl_responses_free(tl_responses* r) { delete r; }

int tl_score_traits(const tl_inventory* inv, const tl_responses* resp,
                    tl_trait_report** out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  *out = nullptr;
  if (inv == nullptr || resp == nullptr) {
    return usage_error("inventory and responses must not be NULL");
  }
  return guarded([&] {
    *out = new tl_trait_report{
        traitlab::score_traits(inv->items, resp->responses)};
  });
}

int tl_trait_report_get(const tl_trait_report* rep, int trait, double* mean,
                        double* sigma, uint64_t* n_answered,
                        uint64_t* n_skipped) {
  if (rep == nullptr) return usage_error("report must not be NULL");
  if (trait < 0 || trait >= traitlab::kTraitCount) {
    return usage_error("trait index must be 0..4");
  }
  const auto& t = rep->rep.traits[trait];
  bool answered = t.n_answered > 0;
  double nan = std::numeric_limits<double>::quiet_NaN();
  if (mean != nullptr) *mean = answered ? t.mean : nan;
  if (sigma != nullptr) *sigma = answered ? t.sigma : nan;
  if (n_answered != nullptr) *n_answered = t.n_answered;
  if (n_skipped != nullptr) *n_skipped = t.n_skipped;
  return TL_OK;
}

char* tl_trait_report_json(const tl_trait_report* rep) {
  if (rep == nullptr) {
    usage_error("report must not be NULL");
    return nullptr;
  }
  return guarded_string([&] { return traitlab::report_json(rep->rep); });
}

char* tl_trait_report_tsv(const tl_trait_report* rep) {
  if (rep == nullptr) {
    usage_error("report must not be NULL");
    return nullptr;
  }
  return guarded_string([&] { return traitlab::report_tsv(rep->rep); });
}

void tl_trait_report_free(tl_trait_report* rep) { delete rep; }

int tl_parse_choice(const char* raw) {
  if (raw == nullptr) return 0;
  return traitlab::parse_choice(raw);
}

int tl_score_choice(int positive_key, char choice) {
  if (choice >= 'a' && choice <= 'e') {
    choice = static_cast<char>(choice - 'a' + 'A');
  }
  if (choice < 'A' || choice > 'E') return 0;
  traitlab::MpiItem item;
  item.trait = traitlab::TraitDim::Openness;
  item.key = positive_key != 0 ? traitlab::ItemKey::Positive
                               : traitlab::ItemKey::Negative;
  return traitlab::score_choice(item, choice);
}

/* ---------------------------------------------------------- analytics */

int tl_trait_matrix_open_csv(const char* path, tl_trait_matrix** out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  *out = nullptr;
  if (path == nullptr) return usage_error("path must not be NULL");
  return guarded([&] {
    *out = new tl_trait_matrix{traitlab::TraitMatrix::load_csv(path)};
  });
}

int tl_trait_matrix_drop_row(const tl_trait_matrix* m, const char* model_id,
                             tl_trait_matrix** out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  *out = nullptr;
  if (m == nullptr || model_id == nullptr) {
    return usage_error("matrix and model_id must not be NULL");
  }
  return guarded([&] {
    auto copy = m->m;
    copy.drop_row(model_id);
    *out = new tl_trait_matrix{std::move(copy)};
  });
}

size_t tl_trait_matrix_rows(const tl_trait_matrix* m) {
  return m == nullptr ? 0 : m->m.rows();
}

void tl_trait_matrix_free(tl_trait_matrix* m) { delete m; }

int tl_perf_table_open_csv(const char* path, tl_perf_table** out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  *out = nullptr;
  if (path == nullptr) return usage_error("path must not be NULL");
  return guarded([&] {
    *out = new tl_perf_table{traitlab::PerformanceTable::load_csv(path)};
  });
}

int tl_perf_table_drop_row(const tl_perf_table* t, const char* model_id,
                           tl_perf_table** out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  *out = nullptr;
  if (t == nullptr || model_id == nullptr) {
    return usage_error("table and model_id must not be NULL");
  }
  return guarded([&] {
    auto copy = t->t;
    copy.drop_row(model_id);
    *out = new tl_perf_table{std::move(copy)};
  });
}

size_t tl_perf_table_domain_count(const tl_perf_table* t) {
  return t == nullptr ? 0 : t->t.domains.size();
}

const char* tl_perf_table_domain_name(const tl_perf_table* t, size_t index) {
  if (t == nullptr || index >= t->t.domains.size()) return nullptr;
  return t->t.domains[index].c_str();
}

void tl_perf_table_free(tl_perf_table* t) { delete t; }

int tl_correlate(const tl_trait_matrix* m, const tl_perf_table* t,
                 tl_corr_matrix** out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  *out = nullptr;
  if (m == nullptr || t == nullptr) {
    return usage_error("matrix and table must not be NULL");
  }
  return guarded([&] {
    *out = new tl_corr_matrix{traitlab::correlation_matrix(m->m, t->t)};
  });
}

int tl_corr_matrix_get(const tl_corr_matrix* c, int trait, const char* domain,
                       double* r, int* n) {
  if (c == nullptr || domain == nullptr) {
    return usage_error("matrix and domain must not be NULL");
  }
  if (trait < 0 || trait >= traitlab::kTraitCount) {
    return usage_error("trait index must be 0..4");
  }
  for (std::size_t d = 0; d < c->m.domains.size(); ++d) {
    if (c->m.domains[d] == domain) {
      if (r != nullptr) *r = c->m.r[trait][d];
      if (n != nullptr) *n = static_cast<int>(c->m.n);
      return TL_OK;
    }
  }
  g_last_error = std::string("unknown domain: ") + domain;
  return TL_ERR_UNKNOWN_DOMAIN;
}

char* tl_corr_matrix_csv(const tl_corr_matrix* c) {
  if (c == nullptr) {
    usage_error("matrix must not be NULL");
    return nullptr;
  }
  return guarded_string(
      [&] { return traitlab::correlation_matrix_csv(c->m); });
}

void tl_corr_matrix_free(tl_corr_matrix* c) { delete c; }

int tl_paired_ols(const tl_trait_matrix* m, const tl_perf_table* t,
                  const char* domain, int trait_j, int trait_k,
                  tl_ols_fit* out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  if (m == nullptr || t == nullptr || domain == nullptr) {
    return usage_error("matrix, table, and domain must not be NULL");
  }
  if (trait_j < 0 || trait_j >= traitlab::kTraitCount || trait_k < 0 ||
      trait_k >= traitlab::kTraitCount) {
    return usage_error("trait indices must be 0..4");
  }
  return guarded([&] {
    auto fit = traitlab::paired_trait_ols(
        m->m, t->t, domain, static_cast<traitlab::TraitDim>(trait_j),
        static_cast<traitlab::TraitDim>(trait_k));
    out->beta0 = fit.beta0;
    out->beta_j = fit.beta_j;
    out->beta_k = fit.beta_k;
    out->rss = fit.rss;
    out->combo_rho = fit.combo_rho;
    out->n = static_cast<int>(fit.n);
  });
}

int tl_paired_ols_sweep(const tl_trait_matrix* m, const tl_perf_table* t,
                        const char* domain, char** out_jsonl) {
  if (out_jsonl == nullptr) return usage_error("out must not be NULL");
  *out_jsonl = nullptr;
  if (m == nullptr || t == nullptr || domain == nullptr) {
    return usage_error("matrix, table, and domain must not be NULL");
  }
  return guarded([&] {
    std::string lines;
    for (const auto& fit : traitlab::paired_trait_sweep(m->m, t->t, domain)) {
      lines += traitlab::ols_fit_json(fit, domain);
      lines += '\n';
    }
    *out_jsonl = dup_string(lines);
  });
}

int tl_pca_run(const tl_trait_matrix* m, int standardized, tl_pca** out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  *out = nullptr;
  if (m == nullptr) return usage_error("matrix must not be NULL");
  return guarded([&] {
    auto handle = new tl_pca{traitlab::pca_2d(m->m, standardized != 0),
                             m->m.models};
    *out = handle;
  });
}

int tl_pca_variance(const tl_pca* p, double out[2]) {
  if (p == nullptr || out == nullptr) {
    return usage_error("pca and out must not be NULL");
  }
  out[0] = p->p.variance_explained[0];
  out[1] = p->p.variance_explained[1];
  return TL_OK;
}

int tl_pca_loadings(const tl_pca* p, double out[10]) {
  if (p == nullptr || out == nullptr) {
    return usage_error("pca and out must not be NULL");
  }
  for (int t = 0; t < traitlab::kTraitCount; ++t) {
    out[t * 2] = p->p.loadings[t][0];
    out[t * 2 + 1] = p->p.loadings[t][1];
  }
  return TL_OK;
}

size_t tl_pca_score_count(const tl_pca* p) {
  return p == nullptr ? 0 : p->p.scores.size();
}

int tl_pca_scores(const tl_pca* p, double* out, size_t capacity) {
  if (p == nullptr || out == nullptr) {
    return usage_error("pca and out must not be NULL");
  }
  if (capacity < p->p.scores.size() * 2) {
    return usage_error("capacity below 2 doubles per score row");
  }
  for (std::size_t i = 0; i < p->p.scores.size(); ++i) {
    out[i * 2] = p->p.scores[i][0];
    out[i * 2 + 1] = p->p.scores[i][1];
  }
  return TL_OK;
}

char* tl_pca_loadings_csv(const tl_pca* p) {
  if (p == nullptr) {
    usage_error("pca must not be NULL");
    return nullptr;
  }
  return guarded_string([&] { return traitlab::pca_loadings_csv(p->p); });
}

char* tl_pca_scores_csv(const tl_pca* p) {
  if (p == nullptr) {
    usage_error("pca must not be NULL");
    return nullptr;
  }
  return guarded_string([&] {
    traitlab::TraitMatrix shell;
    shell.models = p->models;
    return traitlab::pca_scores_csv(p->p, shell);
  });
}

char* tl_pca_svg(const tl_pca* p) {
  if (p == nullptr) {
    usage_error("pca must not be NULL");
    return nullptr;
  }
  return guarded_string([&] {
    std::vector<traitlab::ScatterPoint> pts;
    for (std::size_t i = 0; i < p->p.scores.size(); ++i) {
      std::string label = i < p->models.size() ? p->models[i] : "";
      pts.push_back({p->p.scores[i][0], p->p.scores[i][1], label});
    }
    char x_label[48], y_label[48];
    std::snprintf(x_label, sizeof(x_label), "PC1 (%.1f%% var)",
                  100.0 * p->p.variance_explained[0]);
    std::snprintf(y_label, sizeof(y_label), "PC2 (%.1f%% var)",
                  100.0 * p->p.variance_explained[1]);
    return traitlab::scatter_svg(pts, x_label, y_label,
                                 "models in trait space");
  });
}

void tl_pca_free(tl_pca* p) { delete p; }

/* ------------------------------------------------------------ sampler */

int tl_sample_corpus(const char* input_path, uint64_t budget_tokens,
                     uint32_t seq_len, uint64_t seed, tl_sample_result** out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  *out = nullptr;
  if (input_path == nullptr) return usage_error("input_path must not be NULL");
  return guarded([&] {
    *out = new tl_sample_result{
        traitlab::run_sampler(input_path, budget_tokens, seq_len, seed)};
  });
}

uint64_t tl_sample_count(const tl_sample_result* s) {
  return s == nullptr ? 0 : s->run.selected.size();
}

char* tl_sample_chunks_jsonl(const tl_sample_result* s) {
  if (s == nullptr) {
    usage_error("sample result must not be NULL");
    return nullptr;
  }
  return guarded_string(
      [&] { return traitlab::chunks_jsonl(s->run.selected); });
}

char* tl_sample_manifest_json(const tl_sample_result* s) {
  if (s == nullptr) {
    usage_error("sample result must not be NULL");
    return nullptr;
  }
  return guarded_string([&] { return s->run.manifest_json; });
}

void tl_sample_result_free(tl_sample_result* s) { delete s; }

/* -------------------------------------------------------------- synth */

int tl_synth_generate(const char* target_json, const tl_resources* r,
                      tl_synth_result** out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  *out = nullptr;
  if (target_json == nullptr || r == nullptr) {
    return usage_error("target_json and resources must not be NULL");
  }
  return guarded([&] {
    auto target = traitlab::target_from_json(target_json);
    *out = new tl_synth_result{traitlab::generate(target, r->res)};
  });
}

const char* tl_synth_text(const tl_synth_result* s) {
  return s == nullptr ? nullptr : s->r.text.c_str();
}

char* tl_synth_expected_json(const tl_synth_result* s) {
  if (s == nullptr) {
    usage_error("synth result must not be NULL");
    return nullptr;
  }
  return guarded_string([&] { return traitlab::profile_json(s->r.expected); });
}

void tl_synth_result_free(tl_synth_result* s) { delete s; }

/* ------------------------------------------------------------- client */

int tl_administer(const tl_inventory* inv, const tl_client_options* opts,
                  const char* template_text, tl_admin_run** out) {
  if (out == nullptr) return usage_error("out must not be NULL");
  *out = nullptr;
  if (inv == nullptr || opts == nullptr) {
    return usage_error("inventory and options must not be NULL");
  }
  return guarded([&] {
    traitlab::EndpointConfig cfg;
    cfg.base_url = opts->base_url != nullptr ? opts->base_url : "";
    cfg.model = opts->model != nullptr ? opts->model : "";
    cfg.api_key_env = opts->api_key_env != nullptr ? opts->api_key_env : "";
    cfg.temperature = opts->temperature;
    cfg.max_tokens = opts->max_tokens;
    cfg.max_attempts = opts->max_retries;
    cfg.concurrency = opts->concurrency;
    cfg.timeout_ms = static_cast<int>(opts->timeout_seconds * 1000.0);
    cfg.retry_base_ms = opts->retry_base_ms > 0 ? opts->retry_base_ms : 250;
    cfg.prompt_template = template_text != nullptr ? template_text : "";
    *out = new tl_admin_run{traitlab::administer(inv->items, cfg)};
  });
}

char* tl_admin_run_json(const tl_admin_run* run) {
  if (run == nullptr) {
    usage_error("run must not be NULL");
    return nullptr;
  }
  return guarded_string([&] { return traitlab::run_json(run->run); });
}

char* tl_admin_run_responses_jsonl(const tl_admin_run* run) {
  if (run == nullptr) {
    usage_error("run must not be NULL");
    return nullptr;
  }
  return guarded_string([&] { return traitlab::responses_jsonl(run->run); });
}

void tl_admin_run_free(tl_admin_run* run) { delete run; }

char* tl_render_prompt(const char* template_text, const char* statement) {
  if (statement == nullptr) {
    usage_error("statement must not be NULL");
    return nullptr;
  }
  return guarded_string([&] {
    traitlab::MpiItem item;
    item.statement = statement;
    item.trait = traitlab::TraitDim::Openness;
    item.key = traitlab::ItemKey::Positive;
    return traitlab::render_prompt(
        item, template_text != nullptr ? template_text : "");
  });
}

}  // extern "C"
