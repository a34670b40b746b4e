#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "lexicons.hpp"
#include "tokenizer.hpp"

namespace traitlab {

struct CorpusProfile {
  double imperative_ratio = 0;
  double ttr = 0;
  double avg_sentence_len = 0;
  double sentiment_variance = 0;
  double detachment = 0;
  std::uint64_t n_tokens = 0;  // Word + Number tokens in the profiled set
  std::uint64_t n_sentences = 0;
};

class ImperativeDetector {
 public:
  virtual ~ImperativeDetector() = default;
  virtual bool is_imperative(const text::Document& doc,
                             const text::Sentence& sentence,
                             const Resources& res) const = 0;
};

// Verb-initial rule: after skipping a leading "please" and closed-list
// adverbs, the sentence's first Word token is a known base-form verb. A
// non-verb first word (subject pronoun, determiner, anything else) makes
// the sentence non-imperative.
class RuleImperativeDetector final : public ImperativeDetector {
 public:
  bool is_imperative(const text::Document& doc,
                     const text::Sentence& sentence,
                     const Resources& res) const override;
};

// Per-document tallies. Merging two of these is associative and
// commutative, so documents can be counted in any grouping or order.
struct DocStats {
  std::uint64_t sentences = 0;
  std::uint64_t imperatives = 0;
  std::uint64_t word_tokens = 0;
  std::uint64_t word_number_tokens = 0;
  std::uint64_t personal = 0;
  std::uint64_t impersonal = 0;
  std::unordered_set<std::string> types;
  // Welford accumulator over per-sentence polarities.
  std::uint64_t pol_n = 0;
  double pol_mean = 0;
  double pol_m2 = 0;

  void merge(DocStats other);
};

DocStats doc_stats(const text::Document& doc, const Resources& res,
                   const ImperativeDetector& detector);

double sentence_polarity(const text::Document& doc,
                         const text::Sentence& sentence,
                         const PolarityLexicon& lex);

double imperative_ratio(const std::vector<text::Document>& docs,
                        const Resources& res);
double type_token_ratio(const std::vector<text::Document>& docs,
                        const Resources& res);
double sentence_complexity(const std::vector<text::Document>& docs,
                           const Resources& res);
double sentiment_variance(const std::vector<text::Document>& docs,
                          const Resources& res);
double detachment_index(const std::vector<text::Document>& docs,
                        const Resources& res);

struct ProfileOptions {
  std::uint64_t token_cap = 200000;  // 0 profiles everything
  std::uint64_t seed = 0;            // document shuffle for the cap
  const ImperativeDetector* detector = nullptr;  // default: rule detector
};

CorpusProfile profile(const std::vector<text::Document>& docs,
                      const Resources& res, const ProfileOptions& opts = {});

std::string profile_json(const CorpusProfile& p);
// Single row in column order: imperative, ttr, complexity, sentiment
// variance, detachment.
std::string profile_tsv(const CorpusProfile& p);

}  // namespace traitlab
