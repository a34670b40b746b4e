#pragma once

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tokenizer.hpp"

namespace traitlab {

struct VerbLexicon {
  std::unordered_set<std::string> verbs;  // base forms, lowercased

  bool contains(std::string_view lower) const {
    return verbs.count(std::string(lower)) > 0;
  }
  static VerbLexicon load(const std::string& path);
};

struct PolarityLexicon {
  std::unordered_map<std::string, double> values;  // word -> [-1,1]
  std::unordered_set<std::string> negations;
  int window = 3;  // word tokens after a negation that get flipped

  static PolarityLexicon load(const std::string& values_path,
                              const std::string& negations_path);
};

struct PronounSets {
  std::unordered_set<std::string> personal;
  std::unordered_set<std::string> impersonal;

  static PronounSets load(const std::string& personal_path,
                          const std::string& impersonal_path);
};

struct AdverbList {
  std::unordered_set<std::string> words;

  bool contains(std::string_view lower) const {
    return words.count(std::string(lower)) > 0;
  }
  static AdverbList load(const std::string& path);
};

// All shipped resource files for one run, plus their content digests so
// output can record exactly which lexicon versions produced it.
struct Resources {
  text::Abbreviations abbrev;
  VerbLexicon verbs;
  PolarityLexicon polarity;
  PronounSets pronouns;
  AdverbList adverbs;
  std::map<std::string, std::string> digests;  // file name -> sha256 hex

  static Resources load_dir(const std::string& dir);
  std::string digests_json() const;
};

// Shared line reader: one entry per line, '#' comments and blanks skipped,
// entries case-folded.
std::vector<std::string> read_word_list(const std::string& path);

}  // namespace traitlab
