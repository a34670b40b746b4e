// End-to-end checks of the shared-library C surface. Everything here goes
// through traitlab.h only; internal headers stay out on purpose.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "traitlab.h"

namespace {

struct StrFree {
  void operator()(char* s) const { tl_string_free(s); }
};
using OwnedStr = std::unique_ptr<char, StrFree>;

std::string fixture(const std::string& name) {
  return std::string(TRAITLAB_SOURCE_DIR) + "/" + name;
}

std::string temp_file(const std::string& name, const std::string& body) {
  auto path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path, std::ios::binary);
  out << body;
  return path;
}

std::string slurp_str(char* owned) {
  OwnedStr guard(owned);
  REQUIRE(owned != nullptr);
  return std::string(owned);
}

struct StubServer {
  httplib::Server svr;
  std::thread th;
  int port = 0;
  std::atomic<int> hits{0};
  std::function<void(const httplib::Request&, httplib::Response&)> handler;

  StubServer() {
    svr.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                            httplib::Response& res) {
      ++hits;
      handler(req, res);
    });
    port = svr.bind_to_any_port("127.0.0.1");
    th = std::thread([this] { svr.listen_after_bind(); });
    svr.wait_until_ready();
  }
  ~StubServer() {
    svr.stop();
    th.join();
  }
  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port);
  }
};

void reply(httplib::Response& res, const std::string& content) {
  nlohmann::json j{{"choices", {{{"message", {{"content", content}}}}}}};
  res.set_content(j.dump(), "application/json");
}

tl_resources* open_data() {
  tl_resources* res = nullptr;
  REQUIRE(tl_resources_open_dir(fixture("data").c_str(), &res) == TL_OK);
  return res;
}

const char* kInventory3 =
    "[{\"id\":\"q1\",\"statement\":\"s one\",\"trait\":\"O\",\"key\":\"+\"},"
    "{\"id\":\"q2\",\"statement\":\"s two\",\"trait\":\"O\",\"key\":\"+\"},"
    "{\"id\":\"q3\",\"statement\":\"s three\",\"trait\":\"N\",\"key\":\"-\"}]";

}  // namespace

TEST_CASE("version, exit classes, and error text") {
  CHECK(std::strcmp(tl_version(), "0.1.0") == 0);
  CHECK(tl_last_error() != nullptr);

  CHECK(tl_status_exit_class(TL_OK) == 0);
  CHECK(tl_status_exit_class(TL_ERR_EMPTY_CORPUS) == 1);
  CHECK(tl_status_exit_class(TL_ERR_BAD_DATA) == 1);
  CHECK(tl_status_exit_class(TL_ERR_INTERNAL) == 1);
  CHECK(tl_status_exit_class(TL_ERR_USAGE) == 2);
  CHECK(tl_status_exit_class(TL_ERR_IO) == 2);
  CHECK(tl_status_exit_class(TL_ERR_INVALID_ARGUMENT) == 2);
  CHECK(tl_status_exit_class(TL_ERR_CONFIG) == 2);
  CHECK(tl_status_exit_class(TL_ERR_TRANSPORT) == 3);
  CHECK(tl_status_exit_class(TL_ERR_ALL_REQUESTS_FAILED) == 3);
}

TEST_CASE("resources open, digest records, and window knob") {
  tl_resources* res = open_data();
  auto digests = slurp_str(tl_resources_digests_json(res));
  auto j = nlohmann::json::parse(digests);
  CHECK(j.size() == 7);
  CHECK(j.contains("verbs.txt"));
  for (const auto& [name, hex] : j.items()) {
    (void)name;
    CHECK(hex.get<std::string>().size() == 64);
  }

  CHECK(tl_resources_set_negation_window(res, -1) ==
        TL_ERR_INVALID_ARGUMENT);
  CHECK(tl_resources_set_negation_window(res, 5) == TL_OK);
  CHECK(tl_resources_set_negation_window(nullptr, 5) ==
        TL_ERR_INVALID_ARGUMENT);
  tl_resources_free(res);

  tl_resources* missing = nullptr;
  CHECK(tl_resources_open_dir("no_such_dir_zz", &missing) == TL_ERR_IO);
  CHECK(missing == nullptr);
  CHECK(std::strlen(tl_last_error()) > 0);
  CHECK(tl_resources_open_dir(fixture("data").c_str(), nullptr) ==
        TL_ERR_INVALID_ARGUMENT);
}

TEST_CASE("corpus profile matches hand counts") {
  tl_resources* res = open_data();
  tl_corpus* corpus = nullptr;
  REQUIRE(tl_corpus_from_string("Check the wiring. It seems good. "
                                "I found it awful.",
                                &corpus) == TL_OK);
  CHECK(tl_corpus_doc_count(corpus) == 1);

  tl_profile* prof = nullptr;
  REQUIRE(tl_profile_corpus(corpus, res, 0, 0, &prof) == TL_OK);
  tl_profile_values v{};
  REQUIRE(tl_profile_get(prof, &v) == TL_OK);
  // 3 sentences, 1 imperative; 10 word tokens, 9 types; it,it vs i;
  // polarities 0, 0.7, -1.0.
  CHECK(v.n_sentences == 3);
  CHECK(v.n_tokens == 10);
  CHECK(v.imperative_ratio == 1.0 / 3.0);
  CHECK(v.ttr == 0.9);
  CHECK(v.avg_sentence_len == 10.0 / 3.0);
  CHECK(v.detachment == 0.1);
  double mean = (0.0 + 0.7 - 1.0) / 3.0;
  double var = ((0.0 - mean) * (0.0 - mean) + (0.7 - mean) * (0.7 - mean) +
                (-1.0 - mean) * (-1.0 - mean)) /
               3.0;
  CHECK(v.sentiment_variance ==
        doctest::Approx(std::sqrt(var)).epsilon(1e-12));

  auto j = nlohmann::json::parse(slurp_str(tl_profile_json(prof)));
  CHECK(j["imperative_ratio"].get<double>() == v.imperative_ratio);
  CHECK(j["ttr"].get<double>() == v.ttr);
  CHECK(j["n_tokens"].get<std::uint64_t>() == 10);

  auto tsv = slurp_str(tl_profile_tsv(prof));
  CHECK(std::count(tsv.begin(), tsv.end(), '\t') == 4);
  tl_profile_free(prof);
  tl_corpus_free(corpus);

  tl_corpus* empty = nullptr;
  REQUIRE(tl_corpus_from_string("", &empty) == TL_OK);
  tl_profile* none = nullptr;
  CHECK(tl_profile_corpus(empty, res, 0, 0, &none) == TL_ERR_EMPTY_CORPUS);
  CHECK(none == nullptr);
  tl_corpus_free(empty);

  tl_corpus* missing = nullptr;
  CHECK(tl_corpus_open("no_such_corpus_zz", &missing) == TL_ERR_IO);
  tl_resources_free(res);
}

TEST_CASE("choice parsing and keyed scoring") {
  CHECK(tl_parse_choice("(B) Moderately Accurate") == 'B');
  CHECK(tl_parse_choice("b.") == 'B');
  CHECK(tl_parse_choice("I cannot say.") == 0);
  CHECK(tl_parse_choice(nullptr) == 0);

  CHECK(tl_score_choice(1, 'A') == 5);
  CHECK(tl_score_choice(1, 'E') == 1);
  CHECK(tl_score_choice(0, 'A') == 1);
  CHECK(tl_score_choice(0, 'E') == 5);
  CHECK(tl_score_choice(1, 'c') == 3);
  CHECK(tl_score_choice(1, 'F') == 0);
  CHECK(tl_score_choice(1, 0) == 0);
}

TEST_CASE("inventory scoring through the C surface") {
  auto inv_path = temp_file("capi_inv.json", kInventory3);
  auto resp_path = temp_file("capi_resp.jsonl",
                             "{\"item_id\":\"q1\",\"raw\":\"(A) yes\"}\n"
                             "{\"item_id\":\"q2\",\"raw\":\"(C)\"}\n");

  tl_inventory* inv = nullptr;
  REQUIRE(tl_inventory_open(inv_path.c_str(), &inv) == TL_OK);
  CHECK(tl_inventory_item_count(inv) == 3);

  tl_responses* resp = nullptr;
  REQUIRE(tl_responses_open(resp_path.c_str(), &resp) == TL_OK);

  tl_trait_report* rep = nullptr;
  REQUIRE(tl_score_traits(inv, resp, &rep) == TL_OK);

  double mean = 0, sigma = 0;
  uint64_t answered = 0, skipped = 0;
  REQUIRE(tl_trait_report_get(rep, 0, &mean, &sigma, &answered, &skipped) ==
          TL_OK);
  CHECK(mean == doctest::Approx(4.0));   // scores 5 and 3
  CHECK(sigma == doctest::Approx(1.0));
  CHECK(answered == 2);
  CHECK(skipped == 0);

  REQUIRE(tl_trait_report_get(rep, 4, &mean, &sigma, &answered, &skipped) ==
          TL_OK);
  CHECK(std::isnan(mean));
  CHECK(answered == 0);
  CHECK(skipped == 1);

  CHECK(tl_trait_report_get(rep, 5, &mean, &sigma, &answered, &skipped) ==
        TL_ERR_INVALID_ARGUMENT);

  auto j = nlohmann::json::parse(slurp_str(tl_trait_report_json(rep)));
  CHECK(j["traits"]["O"]["mean"].get<double>() == doctest::Approx(4.0));
  CHECK(j["traits"]["N"]["mean"].is_null());

  auto tsv = slurp_str(tl_trait_report_tsv(rep));
  CHECK(tsv.rfind("4.0000\t1.0000", 0) == 0);

  tl_trait_report_free(rep);
  tl_responses_free(resp);
  tl_inventory_free(inv);

  tl_responses* missing = nullptr;
  CHECK(tl_responses_open("no_such_responses_zz", &missing) == TL_ERR_IO);

  // fixture inventory loads and its count matches the raw JSON array
  tl_inventory* sample = nullptr;
  REQUIRE(tl_inventory_open(fixture("fixtures/mpi_items_sample.json").c_str(),
                            &sample) == TL_OK);
  std::ifstream raw(fixture("fixtures/mpi_items_sample.json"));
  nlohmann::json arr = nlohmann::json::parse(raw);
  CHECK(tl_inventory_item_count(sample) == arr.size());
  tl_inventory_free(sample);
}

TEST_CASE("analytics pipeline through the C surface") {
  tl_trait_matrix* traits = nullptr;
  REQUIRE(tl_trait_matrix_open_csv(
              fixture("fixtures/table2_traits.csv").c_str(), &traits) ==
          TL_OK);
  CHECK(tl_trait_matrix_rows(traits) == 12);

  tl_perf_table* perf = nullptr;
  REQUIRE(tl_perf_table_open_csv(
              fixture("fixtures/table1_mmlupro.csv").c_str(), &perf) ==
          TL_OK);
  CHECK(tl_perf_table_domain_count(perf) == 7);
  CHECK(std::strcmp(tl_perf_table_domain_name(perf, 0), "STEM") == 0);
  CHECK(tl_perf_table_domain_name(perf, 7) == nullptr);

  tl_corr_matrix* corr = nullptr;
  REQUIRE(tl_correlate(traits, perf, &corr) == TL_OK);
  double r = 0;
  int n = 0;
  REQUIRE(tl_corr_matrix_get(corr, 2, "STEM", &r, &n) == TL_OK);
  CHECK(n == 12);
  CHECK(r == doctest::Approx(0.4355).epsilon(0.01));
  CHECK(tl_corr_matrix_get(corr, 2, "NoSuchDomain", &r, &n) ==
        TL_ERR_UNKNOWN_DOMAIN);
  // the csv artifact repeats the same cell
  auto csv = slurp_str(tl_corr_matrix_csv(corr));
  CHECK(csv.find("# joined_rows=12") != std::string::npos);
  std::istringstream lines(csv);
  std::string line;
  double cell = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("E,", 0) == 0) {
      std::sscanf(line.c_str(), "E,%lf", &cell);
    }
  }
  CHECK(cell == doctest::Approx(r).epsilon(1e-6));
  tl_corr_matrix_free(corr);

  tl_trait_matrix* smaller = nullptr;
  REQUIRE(tl_trait_matrix_drop_row(traits, "llama-3-8b", &smaller) == TL_OK);
  CHECK(tl_trait_matrix_rows(smaller) == 11);
  tl_corr_matrix* corr11 = nullptr;
  REQUIRE(tl_correlate(smaller, perf, &corr11) == TL_OK);
  REQUIRE(tl_corr_matrix_get(corr11, 2, "STEM", &r, &n) == TL_OK);
  CHECK(n == 11);
  tl_corr_matrix_free(corr11);
  tl_trait_matrix_free(smaller);

  tl_ols_fit fit{};
  REQUIRE(tl_paired_ols(traits, perf, "STEM", 2, 4, &fit) == TL_OK);
  CHECK(fit.n == 12);
  CHECK(fit.rss >= 0.0);
  CHECK(fit.combo_rho >= 0.0);
  CHECK(fit.combo_rho <= 1.0);
  CHECK(tl_paired_ols(traits, perf, "STEM", 2, 2, &fit) ==
        TL_ERR_SAME_TRAIT);

  char* sweep = nullptr;
  REQUIRE(tl_paired_ols_sweep(traits, perf, "STEM", &sweep) == TL_OK);
  auto sweep_str = slurp_str(sweep);
  CHECK(std::count(sweep_str.begin(), sweep_str.end(), '\n') == 10);

  tl_pca* pca = nullptr;
  REQUIRE(tl_pca_run(traits, 1, &pca) == TL_OK);
  double ve[2] = {0, 0};
  REQUIRE(tl_pca_variance(pca, ve) == TL_OK);
  CHECK(ve[0] == doctest::Approx(0.503).epsilon(0.1));
  CHECK(ve[1] == doctest::Approx(0.231).epsilon(0.1));

  double loadings[10];
  REQUIRE(tl_pca_loadings(pca, loadings) == TL_OK);
  for (int pc = 0; pc < 2; ++pc) {
    double norm = 0;
    for (int t = 0; t < 5; ++t) {
      norm += loadings[t * 2 + pc] * loadings[t * 2 + pc];
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
  }

  REQUIRE(tl_pca_score_count(pca) == 12);
  double scores[24];
  CHECK(tl_pca_scores(pca, scores, 23) == TL_ERR_INVALID_ARGUMENT);
  REQUIRE(tl_pca_scores(pca, scores, 24) == TL_OK);

  auto loadings_csv = slurp_str(tl_pca_loadings_csv(pca));
  CHECK(loadings_csv.rfind("trait,PC1,PC2", 0) == 0);
  auto scores_csv = slurp_str(tl_pca_scores_csv(pca));
  CHECK(scores_csv.find("llama-3-8b") != std::string::npos);
  auto svg = slurp_str(tl_pca_svg(pca));
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("llama-3-8b") != std::string::npos);
  CHECK(svg.find("PC1") != std::string::npos);
  tl_pca_free(pca);

  tl_perf_table_free(perf);
  tl_trait_matrix_free(traits);
}

TEST_CASE("sampler through the C surface") {
  std::string body;
  for (int i = 0; i < 1100; ++i) body += "w" + std::to_string(i) + " ";
  auto path = temp_file("capi_corpus.txt", body);

  tl_sample_result* run = nullptr;
  REQUIRE(tl_sample_corpus(path.c_str(), 1024, 512, 9, &run) == TL_OK);
  CHECK(tl_sample_count(run) == 2);

  auto manifest = slurp_str(tl_sample_manifest_json(run));
  auto j = nlohmann::json::parse(manifest);
  CHECK(j["n_sequences"] == 2);
  CHECK(j["seq_len"] == 512);
  CHECK(j["seed"] == 9);
  CHECK(j["rounding"] == "ceil");
  CHECK(j["replacement"] == "without");
  CHECK(j["inputs"].size() == 1);

  auto chunks = slurp_str(tl_sample_chunks_jsonl(run));
  std::istringstream lines(chunks);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    auto c = nlohmann::json::parse(line);
    CHECK(c["tokens"].size() == 512);
    ++count;
  }
  CHECK(count == 2);
  tl_sample_result_free(run);

  tl_sample_result* rerun = nullptr;
  REQUIRE(tl_sample_corpus(path.c_str(), 1024, 512, 9, &rerun) == TL_OK);
  CHECK(slurp_str(tl_sample_manifest_json(rerun)) == manifest);
  CHECK(slurp_str(tl_sample_chunks_jsonl(rerun)) == chunks);
  tl_sample_result_free(rerun);

  tl_sample_result* bad = nullptr;
  CHECK(tl_sample_corpus(path.c_str(), 10, 512, 9, &bad) ==
        TL_ERR_BUDGET_TOO_SMALL);
  CHECK(tl_sample_corpus("no_such_input_zz", 1024, 512, 9, &bad) ==
        TL_ERR_IO);
}

TEST_CASE("synth round trip through the C surface") {
  tl_resources* res = open_data();
  std::string target =
      "{\"imperative_ratio\":0.5,\"detachment\":0.1,"
      "\"polarities\":[0.5,-0.5,0,0,1,-1,0,0,0.5,-0.5],"
      "\"ttr_band\":[0.2,0.6],\"n_sentences\":10,\"seed\":99}";

  tl_synth_result* synth = nullptr;
  REQUIRE(tl_synth_generate(target.c_str(), res, &synth) == TL_OK);
  const char* text = tl_synth_text(synth);
  REQUIRE(text != nullptr);
  auto expected =
      nlohmann::json::parse(slurp_str(tl_synth_expected_json(synth)));

  tl_corpus* corpus = nullptr;
  REQUIRE(tl_corpus_from_string(text, &corpus) == TL_OK);
  tl_profile* prof = nullptr;
  REQUIRE(tl_profile_corpus(corpus, res, 0, 0, &prof) == TL_OK);
  tl_profile_values v{};
  REQUIRE(tl_profile_get(prof, &v) == TL_OK);

  CHECK(v.imperative_ratio == expected["imperative_ratio"].get<double>());
  CHECK(v.detachment == expected["detachment"].get<double>());
  CHECK(v.ttr == expected["ttr"].get<double>());
  CHECK(v.avg_sentence_len == expected["avg_sentence_len"].get<double>());
  CHECK(v.n_tokens == expected["n_tokens"].get<std::uint64_t>());
  CHECK(v.n_sentences == expected["n_sentences"].get<std::uint64_t>());
  CHECK(v.sentiment_variance ==
        doctest::Approx(expected["sentiment_variance"].get<double>())
            .epsilon(1e-9));
  CHECK(v.imperative_ratio == 0.5);
  CHECK(v.detachment == 0.1);
  CHECK(v.ttr >= 0.2);
  CHECK(v.ttr <= 0.6);

  tl_profile_free(prof);
  tl_corpus_free(corpus);
  tl_synth_result_free(synth);

  tl_synth_result* bad = nullptr;
  CHECK(tl_synth_generate("not json", res, &bad) == TL_ERR_BAD_DATA);
  CHECK(tl_synth_generate(
            "{\"imperative_ratio\":0.05,\"n_sentences\":10,\"seed\":1}",
            res, &bad) == TL_ERR_UNREPRESENTABLE_TARGET);
  CHECK(tl_synth_generate(nullptr, res, &bad) == TL_ERR_INVALID_ARGUMENT);
  tl_resources_free(res);
}

TEST_CASE("administration against a local stub") {
  auto inv_path = temp_file("capi_admin_inv.json", kInventory3);
  tl_inventory* inv = nullptr;
  REQUIRE(tl_inventory_open(inv_path.c_str(), &inv) == TL_OK);

  StubServer server;
  server.handler = [](const httplib::Request&, httplib::Response& res) {
    reply(res, "(D) Moderately Inaccurate");
  };

  std::string url = server.url();
  tl_client_options opts{};
  opts.base_url = url.c_str();
  opts.model = "stub-model";
  opts.api_key_env = "";
  opts.temperature = 0.0;
  opts.max_tokens = 16;
  opts.max_retries = 1;
  opts.concurrency = 2;
  opts.timeout_seconds = 5.0;
  opts.retry_base_ms = 1;

  tl_admin_run* run = nullptr;
  REQUIRE(tl_administer(inv, &opts, nullptr, &run) == TL_OK);
  CHECK(server.hits.load() == 3);

  auto j = nlohmann::json::parse(slurp_str(tl_admin_run_json(run)));
  CHECK(j["inventory_digest"].get<std::string>().size() == 64);
  CHECK(j["responses"].size() == 3);
  for (const auto& r : j["responses"]) {
    CHECK(r["choice"] == "D");
  }

  // the emitted responses feed straight back into scoring
  auto lines = slurp_str(tl_admin_run_responses_jsonl(run));
  auto resp_path = temp_file("capi_admin_resp.jsonl", lines);
  tl_responses* resp = nullptr;
  REQUIRE(tl_responses_open(resp_path.c_str(), &resp) == TL_OK);
  tl_trait_report* rep = nullptr;
  REQUIRE(tl_score_traits(inv, resp, &rep) == TL_OK);
  double mean = 0;
  REQUIRE(tl_trait_report_get(rep, 0, &mean, nullptr, nullptr, nullptr) ==
          TL_OK);
  CHECK(mean == doctest::Approx(2.0));  // positive key, D
  REQUIRE(tl_trait_report_get(rep, 4, &mean, nullptr, nullptr, nullptr) ==
          TL_OK);
  CHECK(mean == doctest::Approx(4.0));  // negative key, D
  tl_trait_report_free(rep);
  tl_responses_free(resp);
  tl_admin_run_free(run);

  server.handler = [](const httplib::Request&, httplib::Response& res) {
    res.status = 500;
    res.set_content("overload", "text/plain");
  };
  tl_admin_run* failed = nullptr;
  CHECK(tl_administer(inv, &opts, nullptr, &failed) ==
        TL_ERR_ALL_REQUESTS_FAILED);

  tl_client_options bad = opts;
  bad.model = "";
  tl_admin_run* none = nullptr;
  CHECK(tl_administer(inv, &bad, nullptr, &none) == TL_ERR_CONFIG);
  tl_inventory_free(inv);
}

TEST_CASE("prompt rendering through the C surface") {
  OwnedStr prompt(tl_render_prompt(nullptr, "You worry about things"));
  REQUIRE(prompt != nullptr);
  std::string p(prompt.get());
  CHECK(p.find("You worry about things") != std::string::npos);
  CHECK(p.find("(A) Very Accurate") != std::string::npos);
  CHECK(p.find("(E) Very Inaccurate") != std::string::npos);

  OwnedStr custom(tl_render_prompt("Q: {statement}?", "It rains"));
  REQUIRE(custom != nullptr);
  CHECK(std::string(custom.get()) == "Q: It rains?");

  CHECK(tl_render_prompt("no placeholder here", "x") == nullptr);
  CHECK(tl_render_prompt(nullptr, nullptr) == nullptr);
}
