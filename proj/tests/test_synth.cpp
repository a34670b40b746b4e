#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "error.hpp"
#include "lexicons.hpp"
#include "profiler.hpp"
#include "rng.hpp"
#include "synthgen.hpp"

using namespace traitlab;
using traitlab::text::parse_document;

namespace {

const Resources& res() {
  static Resources r = Resources::load_dir(TRAITLAB_SOURCE_DIR "/data");
  return r;
}

CorpusProfile profile_text(const std::string& text) {
  std::vector<text::Document> docs;
  docs.push_back(parse_document(text, res().abbrev));
  ProfileOptions opts;
  opts.token_cap = 0;
  return profile(docs, res(), opts);
}

errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e.code();
  }
  return errc::ok;
}

ProfileTarget base_target(std::uint64_t n, std::uint64_t seed) {
  ProfileTarget t;
  t.n_sentences = n;
  t.seed = seed;
  return t;
}

}  // namespace

TEST_CASE("half imperative over ten sentences") {
  auto t = base_target(10, 1);
  t.imperative_ratio = 0.5;
  auto r = generate(t, res());
  CHECK(r.expected.imperative_ratio == 0.5);
  auto p = profile_text(r.text);
  CHECK(p.imperative_ratio == 0.5);
  CHECK(p.n_sentences == 10);
}

TEST_CASE("zero and full imperative ratios") {
  for (double ratio : {0.0, 1.0}) {
    auto t = base_target(7, 3);
    t.imperative_ratio = ratio;
    auto r = generate(t, res());
    CHECK(profile_text(r.text).imperative_ratio == ratio);
  }
}

TEST_CASE("zero detachment from balanced pronouns") {
  auto t = base_target(6, 9);
  t.detachment = 0.0;
  auto r = generate(t, res());
  CHECK(r.expected.detachment == 0.0);
  CHECK(profile_text(r.text).detachment == 0.0);
}

TEST_CASE("polarity list drives sentiment variance") {
  auto t = base_target(4, 17);
  t.polarities = {1.0, -1.0, 0.0, 0.0};
  auto r = generate(t, res());
  CHECK(r.expected.sentiment_variance ==
        doctest::Approx(0.7071067811865476).epsilon(1e-12));
  auto p = profile_text(r.text);
  CHECK(std::abs(p.sentiment_variance - r.expected.sentiment_variance) <
        1e-9);

  auto t2 = base_target(2, 17);
  t2.polarities = {0.25, -0.25};  // realized as two-word means
  auto r2 = generate(t2, res());
  CHECK(r2.expected.sentiment_variance == doctest::Approx(0.25));
  CHECK(std::abs(profile_text(r2.text).sentiment_variance - 0.25) < 1e-9);
}

TEST_CASE("ttr band is honored") {
  auto t = base_target(20, 5);
  t.ttr_lo = 0.3;
  t.ttr_hi = 0.4;
  auto r = generate(t, res());
  CHECK(r.expected.ttr >= 0.3);
  CHECK(r.expected.ttr <= 0.4);
  auto p = profile_text(r.text);
  CHECK(p.ttr >= 0.3);
  CHECK(p.ttr <= 0.4);
}

TEST_CASE("round trip: profiler reproduces the constructed profile") {
  Rng rng(4242);
  const std::vector<double> singles = {0.0, 0.3,  0.5,  0.7,  1.0,
                                       -0.3, -0.5, -0.7, -1.0};
  int generated = 0;
  for (int iter = 0; iter < 120; ++iter) {
    std::uint64_t n = 10 * (1 + rng.below(6));
    ProfileTarget t = base_target(n, rng.next());
    std::uint64_t n_imp = rng.below(n + 1);
    t.imperative_ratio =
        static_cast<double>(n_imp) / static_cast<double>(n);

    std::uint64_t denom = 50 + rng.below(200);
    long long num = static_cast<long long>(rng.below(2 * denom / 3 + 1)) -
                    static_cast<long long>(denom / 3);
    t.detachment = static_cast<double>(num) / static_cast<double>(denom);

    for (std::uint64_t s = 0; s < n; ++s) {
      if (rng.below(2) == 0) {
        t.polarities.push_back(singles[rng.below(singles.size())]);
      } else {
        double v1 = singles[1 + rng.below(singles.size() - 1)];
        double v2 = singles[1 + rng.below(singles.size() - 1)];
        t.polarities.push_back((v1 + v2) / 2.0);
      }
    }

    auto r = generate(t, res());
    ++generated;
    auto p = profile_text(r.text);

    CHECK(p.imperative_ratio == r.expected.imperative_ratio);
    CHECK(p.detachment == r.expected.detachment);
    CHECK(p.ttr == r.expected.ttr);
    CHECK(p.avg_sentence_len == r.expected.avg_sentence_len);
    CHECK(p.n_tokens == r.expected.n_tokens);
    CHECK(p.n_sentences == r.expected.n_sentences);
    CHECK(std::abs(p.sentiment_variance - r.expected.sentiment_variance) <
          1e-9);

    // the realized profile must also hit the requested targets
    CHECK(r.expected.imperative_ratio == t.imperative_ratio);
    CHECK(r.expected.detachment == t.detachment);

    // independent two-pass check of the variance bookkeeping
    long double mean = 0;
    for (double v : t.polarities) mean += v;
    mean /= static_cast<long double>(n);
    long double acc = 0;
    for (double v : t.polarities) acc += (v - mean) * (v - mean);
    double sigma =
        std::sqrt(static_cast<double>(acc / static_cast<long double>(n)));
    CHECK(std::abs(r.expected.sentiment_variance - sigma) < 1e-9);
  }
  CHECK(generated == 120);
}

TEST_CASE("determinism under seed") {
  auto t = base_target(12, 31);
  t.imperative_ratio = 0.25;
  t.detachment = 0.125;
  auto a = generate(t, res());
  auto b = generate(t, res());
  CHECK(a.text == b.text);

  t.seed = 32;
  auto c = generate(t, res());
  CHECK(c.text != a.text);
  CHECK(c.expected.imperative_ratio == a.expected.imperative_ratio);
  CHECK(c.expected.detachment == a.expected.detachment);
}

TEST_CASE("unrepresentable and invalid targets") {
  CHECK(code_of([] {
          auto t = base_target(10, 0);
          t.imperative_ratio = 0.05;
          generate(t, res());
        }) == errc::unrepresentable_target);
  CHECK(code_of([] {
          auto t = base_target(2, 0);
          t.polarities = {0.123, 0.0};
          generate(t, res());
        }) == errc::unrepresentable_target);
  CHECK(code_of([] {
          auto t = base_target(2, 0);
          t.detachment = 1.0;
          generate(t, res());
        }) == errc::unrepresentable_target);
  CHECK(code_of([] {
          auto t = base_target(2, 0);
          t.detachment = 0.5;
          t.ttr_lo = 0.95;
          t.ttr_hi = 1.0;
          generate(t, res());
        }) == errc::unrepresentable_target);
  CHECK(code_of([] {
          auto t = base_target(4, 0);
          t.polarities = {0.5};
          generate(t, res());
        }) == errc::length_mismatch);
  CHECK(code_of([] { generate(base_target(1, 0), res()); }) ==
        errc::invalid_argument);
  CHECK(code_of([] {
          auto t = base_target(3, 0);
          t.detachment = 1.5;
          generate(t, res());
        }) == errc::invalid_argument);
  CHECK(code_of([] {
          auto t = base_target(3, 0);
          t.ttr_lo = 0.8;
          t.ttr_hi = 0.2;
          generate(t, res());
        }) == errc::invalid_argument);
}

TEST_CASE("target json round trip") {
  auto t = target_from_json(
      "{\"imperative_ratio\": 0.2, \"detachment\": -0.1, "
      "\"polarities\": [0.7, 0, 0, 0, -0.7], \"ttr_band\": [0.1, 0.9], "
      "\"n_sentences\": 5, \"seed\": 11}");
  CHECK(t.imperative_ratio == 0.2);
  CHECK(t.detachment == -0.1);
  CHECK(t.polarities.size() == 5);
  CHECK(t.ttr_lo == 0.1);
  CHECK(t.n_sentences == 5);

  auto back = target_from_json(target_json(t));
  CHECK(back.imperative_ratio == t.imperative_ratio);
  CHECK(back.detachment == t.detachment);
  CHECK(back.polarities == t.polarities);
  CHECK(back.seed == t.seed);

  CHECK(code_of([] { target_from_json("not json"); }) == errc::bad_data);
  CHECK(code_of([] { target_from_json("{\"n_sentences\": 2, "
                                      "\"polarities\": \"x\"}"); }) ==
        errc::bad_data);
  CHECK(code_of([] { target_from_json("{}"); }) == errc::bad_data);
  // misspelled keys must not be silently dropped
  CHECK(code_of([] {
          target_from_json("{\"n_sentences\": 2, \"ttr_lo\": 0.2}");
        }) == errc::bad_data);
}

TEST_CASE("minimal targets still parse as the right sentence count") {
  // every sentence has at least one word, so the splitter sees exactly n
  for (std::uint64_t n : {2ull, 3ull, 25ull}) {
    auto r = generate(base_target(n, 77), res());
    auto doc = parse_document(r.text, res().abbrev);
    CHECK(doc.sentences.size() == n);
  }
}
