#include "tokenizer.hpp"

#include <fstream>

#include "error.hpp"
#include "unicode.hpp"

namespace traitlab::text {

namespace {

bool is_apostrophe(char32_t cp) { return cp == 0x27 || cp == 0x2019; }
bool is_hyphen(char32_t cp) { return cp == 0x2D || cp == 0x2010; }

bool is_terminal_mark(std::string_view surface) {
  return surface == "." || surface == "!" || surface == "?" ||
         surface == "…" || surface == "。" || surface == "！" ||
         surface == "？";
}

}  // namespace

Abbreviations::Abbreviations(std::vector<std::string> entries) {
  for (auto& e : entries) {
    if (!e.empty()) entries_.insert(uni::fold_utf8(e));
  }
}

Abbreviations Abbreviations::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io, "cannot open abbreviation list: " + path);
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    entries.push_back(line);
  }
  return Abbreviations(std::move(entries));
}

bool Abbreviations::contains(std::string_view lowered) const {
  return entries_.count(std::string(lowered)) > 0;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  const std::size_t n = text.size();
  std::size_t pos = 0;

  while (pos < n) {
    std::size_t start = pos;
    char32_t cp = uni::decode(text, pos);
    if (uni::is_space(cp)) continue;

    if (uni::is_alpha(cp)) {
      // Extend over letters; apostrophes/hyphens join only between letters.
      std::size_t end = pos;
      while (end < n) {
        std::size_t next = end;
        char32_t c = uni::decode(text, next);
        if (uni::is_alpha(c)) {
          end = next;
        } else if (is_apostrophe(c) || is_hyphen(c)) {
          std::size_t probe = next;
          if (probe < n && uni::is_alpha(uni::decode(text, probe))) {
            end = next;  // separator kept; letter consumed next iteration
          } else {
            break;
          }
        } else {
          break;
        }
      }
      std::string surface(text.substr(start, end - start));
      tokens.push_back({surface, uni::fold_utf8(surface), TokenKind::Word,
                        start, end});
      pos = end;
    } else if (uni::is_digit(cp)) {
      std::size_t end = pos;
      while (end < n) {
        std::size_t next = end;
        char32_t c = uni::decode(text, next);
        if (uni::is_digit(c)) {
          end = next;
        } else if (c == '.' || c == ',') {
          std::size_t probe = next;
          if (probe < n && uni::is_digit(uni::decode(text, probe))) {
            end = next;
          } else {
            break;
          }
        } else {
          break;
        }
      }
      std::string surface(text.substr(start, end - start));
      tokens.push_back(
          {surface, surface, TokenKind::Number, start, end});
      pos = end;
    } else {
      std::string surface(text.substr(start, pos - start));
      tokens.push_back({surface, uni::fold_utf8(surface), TokenKind::Punct,
                        start, pos});
    }
  }
  return tokens;
}

namespace {

// Lowercased run of non-space bytes ending at (and including) the dot,
// e.g. "e.g." for the second dot of "e.g.". Bounded lookback.
std::string abbreviation_candidate(std::string_view text, std::size_t dot_begin,
                                   std::size_t dot_end) {
  std::size_t start = dot_begin;
  while (start > 0 && dot_begin - start < 40) {
    unsigned char b = static_cast<unsigned char>(text[start - 1]);
    if (b == ' ' || b == '\t' || b == '\n' || b == '\r' || b == '\v' ||
        b == '\f') {
      break;
    }
    --start;
  }
  return uni::fold_utf8(text.substr(start, dot_end - start));
}

bool paragraph_break_between(std::string_view text, std::size_t gap_begin,
                             std::size_t gap_end) {
  int newlines = 0;
  for (std::size_t k = gap_begin; k < gap_end; ++k) {
    if (text[k] == '\n' && ++newlines >= 2) return true;
  }
  return false;
}

}  // namespace

std::vector<Sentence> split_sentences(std::string_view text,
                                      const std::vector<Token>& tokens,
                                      const Abbreviations& abbrev) {
  std::vector<Sentence> sentences;
  const std::size_t n = tokens.size();
  std::size_t first = 0;
  bool group_has_content = false;  // any Word/Number since last flush

  auto flush = [&](std::size_t end_token) {
    if (end_token > first) {
      sentences.push_back({first, end_token, tokens[first].begin,
                           tokens[end_token - 1].end});
      first = end_token;
      group_has_content = false;
    }
  };

  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    bool boundary = false;

    if (tokens[i].kind != TokenKind::Punct) group_has_content = true;

    if (tokens[i].kind == TokenKind::Punct) {
      // Byte-adjacent punctuation closes as one run ("...", ."), !!).
      while (j + 1 < n && tokens[j + 1].kind == TokenKind::Punct &&
             tokens[j + 1].begin == tokens[j].end) {
        ++j;
      }
      bool terminal = false;
      for (std::size_t k = i; k <= j; ++k) {
        if (is_terminal_mark(tokens[k].surface)) {
          terminal = true;
          break;
        }
      }
      bool followed_by_gap =
          (j + 1 == n) || tokens[j + 1].begin > tokens[j].end;
      if (terminal && followed_by_gap) {
        if (j == i && tokens[i].surface == "." &&
            abbrev.contains(abbreviation_candidate(text, tokens[i].begin,
                                                   tokens[i].end))) {
          boundary = false;
        } else {
          boundary = true;
        }
      }
    }

    if (!boundary && j + 1 < n &&
        paragraph_break_between(text, tokens[j].end, tokens[j + 1].begin)) {
      boundary = true;
    }

    i = j + 1;
    // Punctuation-only fragments never stand alone as sentences; they
    // attach to the following sentence instead.
    if (boundary && group_has_content) flush(i);
  }
  if (first < n) {
    if (group_has_content || sentences.empty()) {
      flush(n);
    } else {
      sentences.back().end_token = n;
      sentences.back().end = tokens[n - 1].end;
    }
  }
  return sentences;
}

Document parse_document(std::string text, const Abbreviations& abbrev) {
  Document doc;
  doc.text = std::move(text);
  doc.tokens = tokenize(doc.text);
  doc.sentences = split_sentences(doc.text, doc.tokens, abbrev);
  return doc;
}

std::vector<const Token*> word_tokens(const Document& doc) {
  std::vector<const Token*> out;
  for (const auto& t : doc.tokens) {
    if (t.kind == TokenKind::Word) out.push_back(&t);
  }
  return out;
}

}  // namespace traitlab::text
