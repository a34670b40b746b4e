#include "lexicons.hpp"

#include <cstdlib>
#include <fstream>

#include "error.hpp"
#include "sha256.hpp"
#include "unicode.hpp"

namespace traitlab {

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::vector<std::string> read_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io, "cannot open word list: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    line = strip_cr(std::move(line));
    if (line.empty() || line[0] == '#') continue;
    out.push_back(uni::fold_utf8(line));
  }
  return out;
}

VerbLexicon VerbLexicon::load(const std::string& path) {
  VerbLexicon lex;
  for (auto& w : read_word_list(path)) lex.verbs.insert(std::move(w));
  if (lex.verbs.empty()) fail(errc::bad_data, "verb lexicon is empty: " + path);
  return lex;
}

PolarityLexicon PolarityLexicon::load(const std::string& values_path,
                                      const std::string& negations_path) {
  PolarityLexicon lex;
  std::ifstream in(values_path);
  if (!in) fail(errc::io, "cannot open polarity lexicon: " + values_path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(std::move(line));
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      fail(errc::bad_data, values_path + ":" + std::to_string(lineno) +
                               ": expected word<TAB>polarity");
    }
    std::string word = uni::fold_utf8(line.substr(0, tab));
    const char* begin = line.c_str() + tab + 1;
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end == begin || value < -1.0 || value > 1.0) {
      fail(errc::bad_data, values_path + ":" + std::to_string(lineno) +
                               ": polarity must be a number in [-1,1]");
    }
    lex.values[word] = value;
  }
  for (auto& w : read_word_list(negations_path)) {
    lex.negations.insert(std::move(w));
  }
  return lex;
}

PronounSets PronounSets::load(const std::string& personal_path,
                              const std::string& impersonal_path) {
  PronounSets sets;
  for (auto& w : read_word_list(personal_path)) {
    sets.personal.insert(std::move(w));
  }
  for (auto& w : read_word_list(impersonal_path)) {
    sets.impersonal.insert(std::move(w));
  }
  for (const char* required :
       {"i", "me", "my", "we", "us", "our", "you"}) {
    if (!sets.personal.count(required)) {
      fail(errc::bad_data,
           std::string("personal pronoun set is missing \"") + required +
               "\": " + personal_path);
    }
  }
  for (const auto& w : sets.personal) {
    if (sets.impersonal.count(w)) {
      fail(errc::bad_data, "pronoun sets overlap on \"" + w + "\"");
    }
  }
  return sets;
}

AdverbList AdverbList::load(const std::string& path) {
  AdverbList list;
  for (auto& w : read_word_list(path)) list.words.insert(std::move(w));
  return list;
}

Resources Resources::load_dir(const std::string& dir) {
  auto join = [&dir](const char* name) { return dir + "/" + name; };
  Resources res;
  res.abbrev = text::Abbreviations::load(join("abbreviations.txt"));
  res.verbs = VerbLexicon::load(join("verbs.txt"));
  res.polarity = PolarityLexicon::load(join("polarity.tsv"),
                                       join("negations.txt"));
  res.pronouns = PronounSets::load(join("pronouns_personal.txt"),
                                   join("pronouns_impersonal.txt"));
  res.adverbs = AdverbList::load(join("adverbs.txt"));
  for (const char* name :
       {"abbreviations.txt", "verbs.txt", "polarity.tsv", "negations.txt",
        "pronouns_personal.txt", "pronouns_impersonal.txt", "adverbs.txt"}) {
    res.digests[name] = sha256_file_hex(join(name));
  }
  return res;
}

std::string Resources::digests_json() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [name, hex] : digests) {
    if (!first) out += ",";
    first = false;
    out += "\"" + name + "\":\"" + hex + "\"";
  }
  out += "}";
  return out;
}

}  // namespace traitlab
