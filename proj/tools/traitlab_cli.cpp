// traitlab-cli: every pipeline of the shared library behind one binary.
// Exit codes: 0 ok, 1 domain error, 2 usage or I/O error, 3 transport error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "traitlab.h"

namespace {

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  operator T*() const { return p; }
};

struct StrFree {
  void operator()(char* s) const { tl_string_free(s); }
};
using OwnedStr = std::unique_ptr<char, StrFree>;

int fail(int status) {
  std::fprintf(stderr, "error: %s\n", tl_last_error());
  return tl_status_exit_class(status);
}

int usage(const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
  return 2;
}

// "-" or empty sends the body to stdout.
int emit(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::fwrite(body.data(), 1, body.size(), stdout);
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) return usage("cannot open output file: " + path);
  out << body;
  out.close();
  if (!out) return usage("write failed: " + path);
  return 0;
}

bool slurp(const std::string& path, std::string& body) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  body = ss.str();
  return true;
}

struct ProfileArgs {
  std::string corpus;
  std::string data_dir = "data";
  std::string format = "json";
  std::string out = "-";
  std::uint64_t cap = 200000;
  std::uint64_t seed = 0;
};

int cmd_profile(const ProfileArgs& a) {
  Handle<tl_resources, tl_resources_free> res;
  int st = tl_resources_open_dir(a.data_dir.c_str(), res.out());
  if (st != TL_OK) return fail(st);
  Handle<tl_corpus, tl_corpus_free> corpus;
  st = tl_corpus_open(a.corpus.c_str(), corpus.out());
  if (st != TL_OK) return fail(st);
  Handle<tl_profile, tl_profile_free> prof;
  st = tl_profile_corpus(corpus, res, a.cap, a.seed, prof.out());
  if (st != TL_OK) return fail(st);

  OwnedStr digests(tl_resources_digests_json(res));
  if (!digests) return fail(TL_ERR_INTERNAL);
  std::string body;
  if (a.format == "json") {
    OwnedStr pj(tl_profile_json(prof));
    if (!pj) return fail(TL_ERR_INTERNAL);
    auto j = nlohmann::json::parse(pj.get());
    j["metadata"] = {{"lexicon_digests", nlohmann::json::parse(digests.get())},
                     {"token_cap", a.cap},
                     {"seed", a.seed}};
    body = j.dump(2) + "\n";
  } else if (a.format == "tsv") {
    OwnedStr pt(tl_profile_tsv(prof));
    if (!pt) return fail(TL_ERR_INTERNAL);
    body += "# token_cap=" + std::to_string(a.cap) +
            " seed=" + std::to_string(a.seed) + "\n";
    body += std::string("# lexicon_digests=") + digests.get() + "\n";
    body +=
        "imperative_ratio\tttr\tavg_sentence_len\tsentiment_variance"
        "\tdetachment\n";
    body += pt.get();
    body += "\n";
  } else {
    return usage("profile supports --format json or tsv");
  }
  return emit(a.out, body);
}

struct ScoreArgs {
  std::string items;
  std::string responses;
  std::string format = "json";
  std::string out = "-";
};

int cmd_score(const ScoreArgs& a) {
  Handle<tl_inventory, tl_inventory_free> inv;
  int st = tl_inventory_open(a.items.c_str(), inv.out());
  if (st != TL_OK) return fail(st);
  Handle<tl_responses, tl_responses_free> resp;
  st = tl_responses_open(a.responses.c_str(), resp.out());
  if (st != TL_OK) return fail(st);
  Handle<tl_trait_report, tl_trait_report_free> rep;
  st = tl_score_traits(inv, resp, rep.out());
  if (st != TL_OK) return fail(st);

  std::string body;
  if (a.format == "json") {
    OwnedStr j(tl_trait_report_json(rep));
    if (!j) return fail(TL_ERR_INTERNAL);
    body = std::string(j.get()) + "\n";
  } else if (a.format == "tsv") {
    OwnedStr row(tl_trait_report_tsv(rep));
    if (!row) return fail(TL_ERR_INTERNAL);
    body =
        "O_mean\tO_sigma\tC_mean\tC_sigma\tE_mean\tE_sigma\tA_mean\tA_sigma"
        "\tN_mean\tN_sigma\n";
    body += row.get();
    body += "\n";
  } else {
    return usage("score supports --format json or tsv");
  }
  return emit(a.out, body);
}

struct AdministerArgs {
  std::string items;
  std::string base_url;
  std::string model;
  std::string api_key_env = "TRAITLAB_API_KEY";
  std::string template_file;
  std::string out = "-";
  std::string responses_out;
  double temperature = 0.0;
  int max_tokens = 0;
  int max_attempts = 3;
  int concurrency = 4;
  double timeout_seconds = 30.0;
  int retry_base_ms = 0;
  bool no_auth = false;
};

int cmd_administer(const AdministerArgs& a) {
  Handle<tl_inventory, tl_inventory_free> inv;
  int st = tl_inventory_open(a.items.c_str(), inv.out());
  if (st != TL_OK) return fail(st);

  std::string template_text;
  bool custom_template = !a.template_file.empty();
  if (custom_template && !slurp(a.template_file, template_text)) {
    return usage("cannot read template file: " + a.template_file);
  }

  tl_client_options opts{};
  opts.base_url = a.base_url.c_str();
  opts.model = a.model.c_str();
  opts.api_key_env = a.no_auth ? "" : a.api_key_env.c_str();
  opts.temperature = a.temperature;
  opts.max_tokens = a.max_tokens;
  opts.max_retries = a.max_attempts;
  opts.concurrency = a.concurrency;
  opts.timeout_seconds = a.timeout_seconds;
  opts.retry_base_ms = a.retry_base_ms;

  Handle<tl_admin_run, tl_admin_run_free> run;
  st = tl_administer(inv, &opts,
                     custom_template ? template_text.c_str() : nullptr,
                     run.out());
  if (st != TL_OK) return fail(st);

  if (!a.responses_out.empty()) {
    OwnedStr lines(tl_admin_run_responses_jsonl(run));
    if (!lines) return fail(TL_ERR_INTERNAL);
    int rc = emit(a.responses_out, lines.get());
    if (rc != 0) return rc;
  }
  OwnedStr j(tl_admin_run_json(run));
  if (!j) return fail(TL_ERR_INTERNAL);
  return emit(a.out, j.get());
}

struct CorrelateArgs {
  std::string traits;
  std::string perf;
  std::string format = "csv";
  std::string out = "-";
  std::string sweep_domain;
  std::string sweep_out = "-";
  std::vector<std::string> drop;
};

int cmd_correlate(const CorrelateArgs& a) {
  if (a.format != "csv") return usage("correlate supports --format csv");
  Handle<tl_trait_matrix, tl_trait_matrix_free> traits;
  int st = tl_trait_matrix_open_csv(a.traits.c_str(), traits.out());
  if (st != TL_OK) return fail(st);
  Handle<tl_perf_table, tl_perf_table_free> perf;
  st = tl_perf_table_open_csv(a.perf.c_str(), perf.out());
  if (st != TL_OK) return fail(st);

  tl_trait_matrix* t_cur = traits.p;
  tl_perf_table* p_cur = perf.p;
  std::vector<tl_trait_matrix*> t_extra;
  std::vector<tl_perf_table*> p_extra;
  auto cleanup = [&] {
    for (auto* m : t_extra) tl_trait_matrix_free(m);
    for (auto* p : p_extra) tl_perf_table_free(p);
  };
  for (const auto& model : a.drop) {
    tl_trait_matrix* t_next = nullptr;
    st = tl_trait_matrix_drop_row(t_cur, model.c_str(), &t_next);
    if (st != TL_OK) {
      cleanup();
      return fail(st);
    }
    t_extra.push_back(t_next);
    t_cur = t_next;
    tl_perf_table* p_next = nullptr;
    st = tl_perf_table_drop_row(p_cur, model.c_str(), &p_next);
    if (st != TL_OK) {
      cleanup();
      return fail(st);
    }
    p_extra.push_back(p_next);
    p_cur = p_next;
  }

  Handle<tl_corr_matrix, tl_corr_matrix_free> corr;
  st = tl_correlate(t_cur, p_cur, corr.out());
  if (st != TL_OK) {
    cleanup();
    return fail(st);
  }
  OwnedStr csv(tl_corr_matrix_csv(corr));
  if (!csv) {
    cleanup();
    return fail(TL_ERR_INTERNAL);
  }
  int rc = emit(a.out, csv.get());
  if (rc == 0 && !a.sweep_domain.empty()) {
    char* lines = nullptr;
    st = tl_paired_ols_sweep(t_cur, p_cur, a.sweep_domain.c_str(), &lines);
    if (st != TL_OK) {
      cleanup();
      return fail(st);
    }
    OwnedStr owned(lines);
    rc = emit(a.sweep_out, owned.get());
  }
  cleanup();
  return rc;
}

struct PcaArgs {
  std::string traits;
  std::string preprocessing = "raw";
  std::string out = "-";
  std::string loadings_out;
  std::string scores_out;
  std::string svg_out;
  std::vector<std::string> drop;
};

int pca_one(tl_trait_matrix* m, bool standardized, const PcaArgs& a,
            std::string& variance_csv) {
  Handle<tl_pca, tl_pca_free> pca;
  int st = tl_pca_run(m, standardized ? 1 : 0, pca.out());
  if (st != TL_OK) return fail(st);
  double ve[2];
  st = tl_pca_variance(pca, ve);
  if (st != TL_OK) return fail(st);
  char row[96];
  std::snprintf(row, sizeof(row), "%s,%.6f,%.6f\n",
                standardized ? "standardized" : "raw", ve[0], ve[1]);
  variance_csv += row;

  if (!a.loadings_out.empty()) {
    OwnedStr csv(tl_pca_loadings_csv(pca));
    if (!csv) return fail(TL_ERR_INTERNAL);
    int rc = emit(a.loadings_out, csv.get());
    if (rc != 0) return rc;
  }
  if (!a.scores_out.empty()) {
    OwnedStr csv(tl_pca_scores_csv(pca));
    if (!csv) return fail(TL_ERR_INTERNAL);
    int rc = emit(a.scores_out, csv.get());
    if (rc != 0) return rc;
  }
  if (!a.svg_out.empty()) {
    OwnedStr svg(tl_pca_svg(pca));
    if (!svg) return fail(TL_ERR_INTERNAL);
    int rc = emit(a.svg_out, svg.get());
    if (rc != 0) return rc;
  }
  return 0;
}

int cmd_pca(const PcaArgs& a) {
  bool both = a.preprocessing == "both";
  if (both &&
      (!a.loadings_out.empty() || !a.scores_out.empty() ||
       !a.svg_out.empty())) {
    return usage("file outputs need a single --preprocessing mode");
  }
  Handle<tl_trait_matrix, tl_trait_matrix_free> traits;
  int st = tl_trait_matrix_open_csv(a.traits.c_str(), traits.out());
  if (st != TL_OK) return fail(st);

  tl_trait_matrix* cur = traits.p;
  std::vector<tl_trait_matrix*> extra;
  for (const auto& model : a.drop) {
    tl_trait_matrix* next = nullptr;
    st = tl_trait_matrix_drop_row(cur, model.c_str(), &next);
    if (st != TL_OK) {
      for (auto* m : extra) tl_trait_matrix_free(m);
      return fail(st);
    }
    extra.push_back(next);
    cur = next;
  }

  std::string variance_csv = "preprocessing,PC1_variance,PC2_variance\n";
  int rc = 0;
  if (a.preprocessing == "raw" || both) {
    rc = pca_one(cur, false, a, variance_csv);
  }
  if (rc == 0 && (a.preprocessing == "standardized" || both)) {
    rc = pca_one(cur, true, a, variance_csv);
  }
  if (rc == 0 && a.preprocessing != "raw" &&
      a.preprocessing != "standardized" && !both) {
    rc = usage("--preprocessing must be raw, standardized, or both");
  }
  if (rc == 0) rc = emit(a.out, variance_csv);
  for (auto* m : extra) tl_trait_matrix_free(m);
  return rc;
}

struct SampleArgs {
  std::string input;
  std::string manifest_out = "-";
  std::string chunks_out;
  std::uint64_t budget = 0;
  std::uint64_t seq_len = 512;
  std::uint64_t seed = 0;
};

int cmd_sample(const SampleArgs& a) {
  Handle<tl_sample_result, tl_sample_result_free> run;
  int st = tl_sample_corpus(a.input.c_str(), a.budget,
                            static_cast<uint32_t>(a.seq_len), a.seed,
                            run.out());
  if (st != TL_OK) return fail(st);
  if (!a.chunks_out.empty()) {
    OwnedStr lines(tl_sample_chunks_jsonl(run));
    if (!lines) return fail(TL_ERR_INTERNAL);
    int rc = emit(a.chunks_out, lines.get());
    if (rc != 0) return rc;
  }
  OwnedStr manifest(tl_sample_manifest_json(run));
  if (!manifest) return fail(TL_ERR_INTERNAL);
  return emit(a.manifest_out, manifest.get());
}

struct SynthArgs {
  std::string target;
  std::string data_dir = "data";
  std::string out = "-";
  std::string expected_out;
  std::int64_t seed = -1;
};

int cmd_synth(const SynthArgs& a) {
  std::string target_json;
  if (!slurp(a.target, target_json)) {
    return usage("cannot read target file: " + a.target);
  }
  if (a.seed >= 0) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(target_json);
    } catch (const nlohmann::json::exception& e) {
      return usage(std::string("target is not valid JSON: ") + e.what());
    }
    j["seed"] = static_cast<std::uint64_t>(a.seed);
    target_json = j.dump();
  }
  Handle<tl_resources, tl_resources_free> res;
  int st = tl_resources_open_dir(a.data_dir.c_str(), res.out());
  if (st != TL_OK) return fail(st);
  Handle<tl_synth_result, tl_synth_result_free> synth;
  st = tl_synth_generate(target_json.c_str(), res, synth.out());
  if (st != TL_OK) return fail(st);
  if (!a.expected_out.empty()) {
    OwnedStr expected(tl_synth_expected_json(synth));
    if (!expected) return fail(TL_ERR_INTERNAL);
    int rc = emit(a.expected_out, std::string(expected.get()) + "\n");
    if (rc != 0) return rc;
  }
  const char* text = tl_synth_text(synth);
  if (text == nullptr) return fail(TL_ERR_INTERNAL);
  return emit(a.out, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corpus forensics and machine psychometrics toolkit"};
  app.set_version_flag("--version", std::string(tl_version()));
  app.require_subcommand(1);

  ProfileArgs pa;
  auto* profile = app.add_subcommand(
      "profile", "five linguistic signals over a text corpus");
  profile->add_option("corpus", pa.corpus, "corpus file or directory")
      ->required();
  profile->add_option("--data-dir", pa.data_dir, "lexicon directory");
  profile->add_option("--cap", pa.cap, "sample token cap, 0 = everything");
  profile->add_option("--seed", pa.seed, "document shuffle seed for the cap");
  profile->add_option("--format", pa.format, "json or tsv");
  profile->add_option("--out", pa.out, "output file, - for stdout");

  ScoreArgs sa;
  auto* score = app.add_subcommand(
      "score", "score inventory responses into trait means");
  score->add_option("--items", sa.items, "inventory JSON")->required();
  score->add_option("--responses", sa.responses, "responses JSON-lines")
      ->required();
  score->add_option("--format", sa.format, "json or tsv");
  score->add_option("--out", sa.out, "output file, - for stdout");

  AdministerArgs aa;
  auto* administer = app.add_subcommand(
      "administer", "run an inventory against a chat-completions endpoint");
  administer->add_option("--items", aa.items, "inventory JSON")->required();
  administer->add_option("--base-url", aa.base_url, "endpoint base URL")
      ->required();
  administer->add_option("--model", aa.model, "model name")->required();
  administer->add_option("--api-key-env", aa.api_key_env,
                         "env var holding the API key");
  administer->add_flag("--no-auth", aa.no_auth,
                       "send no Authorization header");
  administer->add_option("--template", aa.template_file,
                         "prompt template file with {statement}");
  administer->add_option("--temperature", aa.temperature, "sampling temp");
  administer->add_option("--max-tokens", aa.max_tokens,
                         "completion cap, 0 = unset");
  administer->add_option("--max-attempts", aa.max_attempts,
                         "tries per item including the first");
  administer->add_option("--concurrency", aa.concurrency,
                         "max in-flight requests");
  administer->add_option("--timeout-seconds", aa.timeout_seconds,
                         "per-request timeout");
  administer->add_option("--retry-base-ms", aa.retry_base_ms,
                         "first backoff step, 0 = default");
  administer->add_option("--responses-out", aa.responses_out,
                         "also write responses JSON-lines here");
  administer->add_option("--out", aa.out, "run record file, - for stdout");

  CorrelateArgs ca;
  auto* correlate = app.add_subcommand(
      "correlate", "trait x domain Pearson matrix from CSV tables");
  correlate->add_option("--traits", ca.traits, "trait matrix CSV")
      ->required();
  correlate->add_option("--perf", ca.perf, "performance table CSV")
      ->required();
  correlate->add_option("--drop", ca.drop, "drop a model row, repeatable");
  correlate->add_option("--sweep", ca.sweep_domain,
                        "also emit the paired-trait sweep for this domain");
  correlate->add_option("--sweep-out", ca.sweep_out,
                        "sweep JSON-lines file, - for stdout");
  correlate->add_option("--format", ca.format, "csv");
  correlate->add_option("--out", ca.out, "matrix file, - for stdout");

  PcaArgs za;
  auto* pca = app.add_subcommand(
      "pca", "top-2 principal components of a trait matrix");
  pca->add_option("--traits", za.traits, "trait matrix CSV")->required();
  pca->add_option("--preprocessing", za.preprocessing,
                  "raw, standardized, or both");
  pca->add_option("--drop", za.drop, "drop a model row, repeatable");
  pca->add_option("--loadings-out", za.loadings_out, "loadings CSV file");
  pca->add_option("--scores-out", za.scores_out, "scores CSV file");
  pca->add_option("--svg-out", za.svg_out, "scatter plot SVG file");
  pca->add_option("--out", za.out,
                  "variance-explained CSV, - for stdout");

  SampleArgs ma;
  auto* sample = app.add_subcommand(
      "sample", "budget-matched sequence sampling over a corpus");
  sample->add_option("--input", ma.input, "corpus file or directory")
      ->required();
  sample->add_option("--budget", ma.budget, "token budget")->required();
  sample->add_option("--seq-len", ma.seq_len, "tokens per sequence");
  sample->add_option("--seed", ma.seed, "sampling seed");
  sample->add_option("--chunks-out", ma.chunks_out,
                     "selected chunks JSON-lines file");
  sample->add_option("--out", ma.manifest_out,
                     "manifest file, - for stdout");

  SynthArgs ya;
  auto* synth = app.add_subcommand(
      "synth", "generate a corpus matching a profile target");
  synth->add_option("--target", ya.target, "target JSON file")->required();
  synth->add_option("--data-dir", ya.data_dir, "lexicon directory");
  synth->add_option("--seed", ya.seed, "override the target's seed");
  synth->add_option("--expected-out", ya.expected_out,
                    "expected profile JSON file");
  synth->add_option("--out", ya.out, "corpus text file, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (profile->parsed()) return cmd_profile(pa);
  if (score->parsed()) return cmd_score(sa);
  if (administer->parsed()) return cmd_administer(aa);
  if (correlate->parsed()) return cmd_correlate(ca);
  if (pca->parsed()) return cmd_pca(za);
  if (sample->parsed()) return cmd_sample(ma);
  if (synth->parsed()) return cmd_synth(ya);
  return 2;
}
