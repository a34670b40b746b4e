#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace traitlab::text {

enum class TokenKind { Word, Number, Punct };

struct Token {
  std::string surface;
  std::string lower;  // case-folded surface
  TokenKind kind;
  std::size_t begin;  // byte offsets into the source text
  std::size_t end;
};

struct Sentence {
  std::size_t first_token;  // index range into the document token list
  std::size_t end_token;    // one past the last token
  std::size_t begin;        // byte offsets
  std::size_t end;
};

// Entries are stored lowercased including their trailing dot ("e.g.").
class Abbreviations {
 public:
  Abbreviations() = default;
  explicit Abbreviations(std::vector<std::string> entries);

  static Abbreviations load(const std::string& path);

  bool contains(std::string_view lowered) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_set<std::string> entries_;
};

struct Document {
  std::string text;
  std::vector<Token> tokens;
  std::vector<Sentence> sentences;
};

// Word tokens are maximal alphabetic runs, optionally with internal
// apostrophes or hyphens; digit runs (with internal '.'/',' between
// digits) are Number tokens; any other non-space codepoint is one Punct
// token. Whitespace separates and is never emitted.
std::vector<Token> tokenize(std::string_view text);

// Sentences end at . ! ? followed by whitespace or end of input (a dot is
// suppressed when the preceding word+dot matches the abbreviation list),
// and at blank-line paragraph breaks. Empty sentences are never produced.
std::vector<Sentence> split_sentences(std::string_view text,
                                      const std::vector<Token>& tokens,
                                      const Abbreviations& abbrev);

Document parse_document(std::string text, const Abbreviations& abbrev);

// Tokens with kind == Word, order preserved.
std::vector<const Token*> word_tokens(const Document& doc);

}  // namespace traitlab::text
