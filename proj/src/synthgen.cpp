#include "synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "error.hpp"
#include "rng.hpp"

namespace traitlab {

namespace {

constexpr double kResolutionTol = 1e-9;

void validate(const ProfileTarget& t) {
  if (t.n_sentences < 2) {
    fail(errc::invalid_argument, "n_sentences must be >= 2");
  }
  if (!(t.imperative_ratio >= 0.0 && t.imperative_ratio <= 1.0)) {
    fail(errc::invalid_argument, "imperative_ratio must be in [0, 1]");
  }
  if (!(t.detachment >= -1.0 && t.detachment <= 1.0)) {
    fail(errc::invalid_argument, "detachment must be in [-1, 1]");
  }
  if (!(t.ttr_lo >= 0.0 && t.ttr_lo <= t.ttr_hi && t.ttr_hi <= 1.0)) {
    fail(errc::invalid_argument, "ttr band must satisfy 0 <= lo <= hi <= 1");
  }
  if (!t.polarities.empty() && t.polarities.size() != t.n_sentences) {
    fail(errc::length_mismatch, "polarities must list one value per sentence");
  }
  for (double p : t.polarities) {
    if (!(p >= -1.0 && p <= 1.0)) {
      fail(errc::invalid_argument, "sentence polarity must be in [-1, 1]");
    }
  }
}

struct Pools {
  std::vector<std::string> verbs;
  std::vector<double> values;  // distinct polarity values, ascending
  std::map<double, std::vector<std::string>> words_by_value;
  std::vector<std::string> impersonal;
  std::vector<std::string> personal;
};

// A pool word must carry exactly one signal, so anything that overlaps
// another lexicon (or reads as an abbreviation when it ends a sentence)
// is dropped here.
Pools build_pools(const Resources& res) {
  auto tainted = [&](const std::string& w, bool allow_polarity,
                     bool allow_pronoun) {
    if (w == "please") return true;
    if (!allow_polarity && res.polarity.values.count(w)) return true;
    if (res.polarity.negations.count(w)) return true;
    if (!allow_pronoun && (res.pronouns.personal.count(w) ||
                           res.pronouns.impersonal.count(w))) {
      return true;
    }
    if (res.adverbs.contains(w)) return true;
    if (res.abbrev.contains(w + ".")) return true;
    return false;
  };

  Pools p;
  for (const auto& v : res.verbs.verbs) {
    if (!tainted(v, false, false)) p.verbs.push_back(v);
  }
  std::sort(p.verbs.begin(), p.verbs.end());

  for (const auto& [word, value] : res.polarity.values) {
    if (res.verbs.contains(word) || tainted(word, true, false)) continue;
    p.words_by_value[value].push_back(word);
  }
  for (auto& [value, words] : p.words_by_value) {
    std::sort(words.begin(), words.end());
    p.values.push_back(value);
  }

  for (const auto& w : res.pronouns.impersonal) {
    if (!res.verbs.contains(w) && !tainted(w, false, true)) {
      p.impersonal.push_back(w);
    }
  }
  for (const auto& w : res.pronouns.personal) {
    if (!res.verbs.contains(w) && !tainted(w, false, true)) {
      p.personal.push_back(w);
    }
  }
  std::sort(p.impersonal.begin(), p.impersonal.end());
  std::sort(p.personal.begin(), p.personal.end());
  return p;
}

// Zero, one, or two lexicon values whose mean is the requested polarity.
std::vector<double> realize_polarity(double want, const Pools& pools) {
  if (want == 0.0) return {};
  for (double v : pools.values) {
    if (std::abs(v - want) < 1e-12) return {v};
  }
  for (double v1 : pools.values) {
    for (double v2 : pools.values) {
      if (v2 < v1) continue;
      if (std::abs((v1 + v2) / 2.0 - want) < 1e-12) return {v1, v2};
    }
  }
  fail(errc::unrepresentable_target,
       "sentence polarity has no one- or two-word realization");
}

std::string fresh_filler(std::uint64_t i) {
  std::string s = "q";
  std::uint64_t v = i;
  do {
    s += static_cast<char>('a' + v % 26);
    v /= 26;
  } while (v != 0);
  return s;
}

}  // namespace

ProfileTarget target_from_json(const std::string& json_text) {
  auto j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail(errc::bad_data, "target must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "n_sentences" && key != "imperative_ratio" &&
        key != "detachment" && key != "seed" && key != "polarities" &&
        key != "ttr_band") {
      fail(errc::bad_data, "unknown target key: " + key);
    }
  }
  auto number = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) fail(errc::bad_data, std::string(key) + " must be a number");
    return j[key].get<double>();
  };
  ProfileTarget t;
  if (!j.contains("n_sentences") || !j["n_sentences"].is_number_unsigned()) {
    fail(errc::bad_data, "n_sentences must be a non-negative integer");
  }
  t.n_sentences = j["n_sentences"].get<std::uint64_t>();
  t.imperative_ratio = number("imperative_ratio", 0.0);
  t.detachment = number("detachment", 0.0);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) {
      fail(errc::bad_data, "seed must be a non-negative integer");
    }
    t.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("polarities")) {
    if (!j["polarities"].is_array()) {
      fail(errc::bad_data, "polarities must be an array");
    }
    for (const auto& v : j["polarities"]) {
      if (!v.is_number()) fail(errc::bad_data, "polarities must be numbers");
      t.polarities.push_back(v.get<double>());
    }
  }
  if (j.contains("ttr_band")) {
    if (!j["ttr_band"].is_array() || j["ttr_band"].size() != 2 ||
        !j["ttr_band"][0].is_number() || !j["ttr_band"][1].is_number()) {
      fail(errc::bad_data, "ttr_band must be [lo, hi]");
    }
    t.ttr_lo = j["ttr_band"][0].get<double>();
    t.ttr_hi = j["ttr_band"][1].get<double>();
  }
  validate(t);
  return t;
}

ProfileTarget target_from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return target_from_json(buf.str());
}

std::string target_json(const ProfileTarget& t) {
  nlohmann::json j;
  j["imperative_ratio"] = t.imperative_ratio;
  j["detachment"] = t.detachment;
  j["polarities"] = t.polarities;
  j["ttr_band"] = {t.ttr_lo, t.ttr_hi};
  j["n_sentences"] = t.n_sentences;
  j["seed"] = t.seed;
  return j.dump(2) + "\n";
}

SynthResult generate(const ProfileTarget& t, const Resources& res) {
  validate(t);
  Pools pools = build_pools(res);
  if (pools.verbs.empty() || pools.impersonal.empty() ||
      pools.personal.empty()) {
    fail(errc::bad_data, "lexicons leave no usable template vocabulary");
  }
  Rng rng(t.seed);
  const std::uint64_t n = t.n_sentences;

  double scaled = t.imperative_ratio * static_cast<double>(n);
  long long n_imp = std::llround(scaled);
  if (std::abs(scaled - static_cast<double>(n_imp)) > kResolutionTol) {
    fail(errc::unrepresentable_target,
         "imperative_ratio is not a whole number of sentences");
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  shuffle(order, rng);
  std::vector<bool> imperative(n, false);
  for (long long i = 0; i < n_imp; ++i) imperative[order[i]] = true;

  // Token lists are kept lowercase; capitalization is applied only when
  // the text is serialized, so type counting stays trivial.
  std::vector<std::vector<std::string>> sent(n);
  std::vector<double> realized(n, 0.0);
  std::uint64_t words = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (imperative[i]) {
      sent[i].push_back(pools.verbs[rng.below(pools.verbs.size())]);
    } else {
      sent[i].push_back("the");
    }
    ++words;
    double want = t.polarities.empty() ? 0.0 : t.polarities[i];
    double sum = 0.0;
    std::size_t hits = 0;
    for (double v : realize_polarity(want, pools)) {
      const auto& bank = pools.words_by_value.at(v);
      sent[i].push_back(bank[rng.below(bank.size())]);
      ++words;
      sum += v;
      ++hits;
    }
    realized[i] = hits ? sum / static_cast<double>(hits) : 0.0;
  }

  std::set<std::string> types;
  for (const auto& s : sent) types.insert(s.begin(), s.end());
  const std::uint64_t base_words = words;
  const std::uint64_t base_types = types.size();

  // One fixed word per pronoun side keeps the type arithmetic exact while
  // the word total is still being chosen.
  const std::string& impersonal_word = pools.impersonal.front();
  const std::string& personal_word = pools.personal.front();

  // Search for a word total where (a) the pronoun surplus reproduces the
  // detachment target under the same double division the profiler
  // performs, and (b) enough filler slots remain to land the type/token
  // ratio inside the requested band.
  const std::uint64_t max_words = base_words + 200000;
  bool found = false;
  std::uint64_t total_words = 0;
  long long surplus = 0;
  std::uint64_t fresh = 0;
  for (std::uint64_t w = base_words; w <= max_words && !found; ++w) {
    long long guess = std::llround(t.detachment * static_cast<double>(w));
    for (long long cand : {guess - 1, guess, guess + 1}) {
      if (static_cast<std::uint64_t>(std::llabs(cand)) > w - base_words) {
        continue;
      }
      if (static_cast<double>(cand) / static_cast<double>(w) !=
          t.detachment) {
        continue;
      }
      std::uint64_t slots = w - base_words - std::llabs(cand);
      std::uint64_t types_now = base_types + (cand != 0 ? 1 : 0);
      auto ttr_with = [&](std::uint64_t extra) {
        return static_cast<double>(types_now + extra) /
               static_cast<double>(w);
      };
      long long k0 = static_cast<long long>(std::ceil(
                         t.ttr_lo * static_cast<double>(w) - 1e-9)) -
                     static_cast<long long>(types_now);
      std::uint64_t k = k0 > 0 ? static_cast<std::uint64_t>(k0) : 0;
      while (k <= slots && ttr_with(k) < t.ttr_lo) ++k;
      if (k > slots || ttr_with(k) > t.ttr_hi) continue;
      total_words = w;
      surplus = cand;
      fresh = k;
      found = true;
      break;
    }
  }
  if (!found) {
    fail(errc::unrepresentable_target,
         "no word total realizes both detachment and the ttr band");
  }

  const std::uint64_t n_impersonal = surplus > 0 ? surplus : 0;
  const std::uint64_t n_personal = surplus < 0 ? -surplus : 0;
  for (std::uint64_t k = 0; k < n_impersonal; ++k) {
    sent[rng.below(n)].push_back(impersonal_word);
  }
  for (std::uint64_t k = 0; k < n_personal; ++k) {
    sent[rng.below(n)].push_back(personal_word);
  }
  if (surplus != 0) {
    types.insert(surplus > 0 ? impersonal_word : personal_word);
  }

  const std::uint64_t fillers =
      total_words - base_words - (n_impersonal + n_personal);
  const std::string repeat_word = sent[0][0];
  std::uint64_t next_filler = 0;
  for (std::uint64_t k = 0; k < fillers; ++k) {
    std::string w;
    if (k < fresh) {
      do {
        w = fresh_filler(next_filler++);
      } while (types.count(w) || res.verbs.contains(w) ||
               res.polarity.values.count(w) ||
               res.polarity.negations.count(w) ||
               res.pronouns.personal.count(w) ||
               res.pronouns.impersonal.count(w) || res.adverbs.contains(w));
      types.insert(w);
    } else {
      w = repeat_word;
    }
    sent[rng.below(n)].push_back(w);
  }

  SynthResult out;
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < sent[i].size(); ++j) {
      std::string w = sent[i][j];
      if (j == 0) w[0] = static_cast<char>(std::toupper(
          static_cast<unsigned char>(w[0])));
      out.text += w;
      out.text += j + 1 < sent[i].size() ? " " : "";
    }
    out.text += '.';
    out.text += i + 1 < n ? ' ' : '\n';
  }

  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    double d = realized[i] - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (realized[i] - mean);
  }
  double var = m2 / static_cast<double>(n);

  CorpusProfile& e = out.expected;
  e.imperative_ratio =
      static_cast<double>(n_imp) / static_cast<double>(n);
  e.ttr = static_cast<double>(types.size()) /
          static_cast<double>(total_words);
  e.avg_sentence_len =
      static_cast<double>(total_words) / static_cast<double>(n);
  e.sentiment_variance = var > 0 ? std::sqrt(var) : 0.0;
  e.detachment = (static_cast<double>(n_impersonal) -
                  static_cast<double>(n_personal)) /
                 static_cast<double>(total_words);
  e.n_tokens = total_words;
  e.n_sentences = n;
  return out;
}

}  // namespace traitlab
