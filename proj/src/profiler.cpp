#include "profiler.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "error.hpp"
#include "rng.hpp"

namespace traitlab {

bool RuleImperativeDetector::is_imperative(const text::Document& doc,
                                           const text::Sentence& sentence,
                                           const Resources& res) const {
  for (std::size_t i = sentence.first_token; i < sentence.end_token; ++i) {
    const auto& t = doc.tokens[i];
    if (t.kind != text::TokenKind::Word) continue;
    if (t.lower == "please" || res.adverbs.contains(t.lower)) continue;
    return res.verbs.contains(t.lower);
  }
  return false;
}

double sentence_polarity(const text::Document& doc,
                         const text::Sentence& sentence,
                         const PolarityLexicon& lex) {
  double sum = 0;
  std::size_t hits = 0;
  int flip_left = 0;
  for (std::size_t i = sentence.first_token; i < sentence.end_token; ++i) {
    const auto& t = doc.tokens[i];
    if (t.kind != text::TokenKind::Word) continue;
    if (lex.negations.count(t.lower)) {
      flip_left = lex.window;
      continue;
    }
    auto it = lex.values.find(t.lower);
    if (it != lex.values.end()) {
      sum += flip_left > 0 ? -it->second : it->second;
      ++hits;
    }
    if (flip_left > 0) --flip_left;
  }
  return hits ? sum / static_cast<double>(hits) : 0.0;
}

void DocStats::merge(DocStats other) {
  sentences += other.sentences;
  imperatives += other.imperatives;
  word_tokens += other.word_tokens;
  word_number_tokens += other.word_number_tokens;
  personal += other.personal;
  impersonal += other.impersonal;
  if (types.size() < other.types.size()) types.swap(other.types);
  types.merge(other.types);
  if (other.pol_n > 0) {
    if (pol_n == 0) {
      pol_n = other.pol_n;
      pol_mean = other.pol_mean;
      pol_m2 = other.pol_m2;
    } else {
      double na = static_cast<double>(pol_n);
      double nb = static_cast<double>(other.pol_n);
      double delta = other.pol_mean - pol_mean;
      pol_mean += delta * (nb / (na + nb));
      pol_m2 += other.pol_m2 + delta * delta * (na * nb / (na + nb));
      pol_n += other.pol_n;
    }
  }
}

DocStats doc_stats(const text::Document& doc, const Resources& res,
                   const ImperativeDetector& detector) {
  DocStats s;
  for (const auto& t : doc.tokens) {
    if (t.kind == text::TokenKind::Punct) continue;
    ++s.word_number_tokens;
    if (t.kind == text::TokenKind::Word) {
      ++s.word_tokens;
      s.types.insert(t.lower);
      if (res.pronouns.personal.count(t.lower)) ++s.personal;
      if (res.pronouns.impersonal.count(t.lower)) ++s.impersonal;
    }
  }
  for (const auto& sent : doc.sentences) {
    ++s.sentences;
    if (detector.is_imperative(doc, sent, res)) ++s.imperatives;
    double p = sentence_polarity(doc, sent, res.polarity);
    ++s.pol_n;
    double d = p - s.pol_mean;
    s.pol_mean += d / static_cast<double>(s.pol_n);
    s.pol_m2 += d * (p - s.pol_mean);
  }
  return s;
}

namespace {

// Documents without a single Word/Number token carry no signal and are
// not counted (they would otherwise contribute token-free sentences).
DocStats accumulate(const std::vector<text::Document>& docs,
                    const Resources& res,
                    const ImperativeDetector& detector) {
  DocStats total;
  for (const auto& doc : docs) {
    DocStats s = doc_stats(doc, res, detector);
    if (s.word_number_tokens == 0) continue;
    total.merge(std::move(s));
  }
  return total;
}

double population_sigma(const DocStats& s) {
  if (s.pol_n == 0) return 0.0;
  double var = s.pol_m2 / static_cast<double>(s.pol_n);
  return var > 0 ? std::sqrt(var) : 0.0;
}

}  // namespace

double imperative_ratio(const std::vector<text::Document>& docs,
                        const Resources& res) {
  RuleImperativeDetector det;
  DocStats s = accumulate(docs, res, det);
  if (s.sentences == 0) fail(errc::empty_corpus, "corpus has no sentences");
  return static_cast<double>(s.imperatives) /
         static_cast<double>(s.sentences);
}

double type_token_ratio(const std::vector<text::Document>& docs,
                        const Resources& res) {
  RuleImperativeDetector det;
  DocStats s = accumulate(docs, res, det);
  if (s.word_tokens == 0) fail(errc::empty_corpus, "corpus has no word tokens");
  return static_cast<double>(s.types.size()) /
         static_cast<double>(s.word_tokens);
}

double sentence_complexity(const std::vector<text::Document>& docs,
                           const Resources& res) {
  RuleImperativeDetector det;
  DocStats s = accumulate(docs, res, det);
  if (s.sentences == 0) fail(errc::empty_corpus, "corpus has no sentences");
  return static_cast<double>(s.word_number_tokens) /
         static_cast<double>(s.sentences);
}

double sentiment_variance(const std::vector<text::Document>& docs,
                          const Resources& res) {
  RuleImperativeDetector det;
  DocStats s = accumulate(docs, res, det);
  if (s.sentences == 0) fail(errc::empty_corpus, "corpus has no sentences");
  if (s.sentences < 2) {
    fail(errc::too_few_sentences,
         "sentiment variance needs at least 2 sentences");
  }
  return population_sigma(s);
}

double detachment_index(const std::vector<text::Document>& docs,
                        const Resources& res) {
  RuleImperativeDetector det;
  DocStats s = accumulate(docs, res, det);
  if (s.word_tokens == 0) fail(errc::empty_corpus, "corpus has no word tokens");
  return (static_cast<double>(s.impersonal) -
          static_cast<double>(s.personal)) /
         static_cast<double>(s.word_tokens);
}

CorpusProfile profile(const std::vector<text::Document>& docs,
                      const Resources& res, const ProfileOptions& opts) {
  if (docs.empty()) fail(errc::empty_corpus, "no documents");
  RuleImperativeDetector rule;
  const ImperativeDetector& det = opts.detector ? *opts.detector : rule;

  DocStats total;
  if (opts.token_cap > 0) {
    std::vector<std::size_t> order(docs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(opts.seed);
    shuffle(order, rng);
    for (std::size_t idx : order) {
      if (total.word_number_tokens >= opts.token_cap) break;
      DocStats s = doc_stats(docs[idx], res, det);
      if (s.word_number_tokens == 0) continue;
      total.merge(std::move(s));
    }
  } else {
    total = accumulate(docs, res, det);
  }

  if (total.word_number_tokens == 0) {
    fail(errc::empty_corpus, "corpus has no word tokens");
  }
  if (total.word_tokens == 0) {
    fail(errc::empty_corpus, "corpus has no word tokens");
  }
  if (total.sentences < 2) {
    fail(errc::too_few_sentences,
         "sentiment variance needs at least 2 sentences");
  }

  CorpusProfile p;
  p.imperative_ratio = static_cast<double>(total.imperatives) /
                       static_cast<double>(total.sentences);
  p.ttr = static_cast<double>(total.types.size()) /
          static_cast<double>(total.word_tokens);
  p.avg_sentence_len = static_cast<double>(total.word_number_tokens) /
                       static_cast<double>(total.sentences);
  p.sentiment_variance = population_sigma(total);
  p.detachment = (static_cast<double>(total.impersonal) -
                  static_cast<double>(total.personal)) /
                 static_cast<double>(total.word_tokens);
  p.n_tokens = total.word_number_tokens;
  p.n_sentences = total.sentences;
  return p;
}

std::string profile_json(const CorpusProfile& p) {
  nlohmann::json j{
      {"imperative_ratio", p.imperative_ratio},
      {"ttr", p.ttr},
      {"avg_sentence_len", p.avg_sentence_len},
      {"sentiment_variance", p.sentiment_variance},
      {"detachment", p.detachment},
      {"n_tokens", p.n_tokens},
      {"n_sentences", p.n_sentences},
      {"denominators",
       {{"detachment", "word"}, {"avg_sentence_len", "word+number"}}},
  };
  return j.dump();
}

std::string profile_tsv(const CorpusProfile& p) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\t%.6f\t%.6f\t%.6f",
                p.imperative_ratio, p.ttr, p.avg_sentence_len,
                p.sentiment_variance, p.detachment);
  return buf;
}

}  // namespace traitlab
