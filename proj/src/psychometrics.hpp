#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace traitlab {

enum class TraitDim {
  Openness = 0,
  Conscientiousness = 1,
  Extraversion = 2,
  Agreeableness = 3,
  Neuroticism = 4,
};
inline constexpr int kTraitCount = 5;

const char* trait_name(TraitDim t);
char trait_letter(TraitDim t);
std::optional<TraitDim> trait_from_letter(char c);

enum class ItemKey { Positive, Negative };

struct MpiItem {
  std::string id;
  std::string statement;
  TraitDim trait;
  ItemKey key;
};

struct MpiResponse {
  std::string item_id;
  std::string raw;
  char choice = 0;  // 'A'..'E', or 0 when unparsed
};

struct TraitScore {
  double mean = 0;  // meaningful only when n_answered >= 1
  double sigma = 0;
  std::uint64_t n_answered = 0;
  std::uint64_t n_skipped = 0;
};

struct TraitReport {
  std::array<TraitScore, kTraitCount> traits;
};

// First standalone "(A)".."(E)" marker anywhere in the text, else a leading
// single letter A-E; case-insensitive. Returns 0 when nothing parses.
char parse_choice(const std::string& raw);

// Positive key: A=5 B=4 C=3 D=2 E=1. Negative key reverses the scale.
int score_choice(const MpiItem& item, char choice);

// Inventory: JSON array of {id, statement, trait: "O|C|E|A|N", key: "+|-"}.
std::vector<MpiItem> load_inventory(const std::string& path);
// Responses: JSON-lines {item_id, raw, choice?}. Absent choice is parsed
// from raw.
std::vector<MpiResponse> load_responses(const std::string& path);

// Per trait: mean and population sigma over answered items; unanswered or
// unparsed items of that trait count as skipped.
TraitReport score_traits(const std::vector<MpiItem>& items,
                         const std::vector<MpiResponse>& responses);

std::string report_json(const TraitReport& r);
// One row, trait-major pairs: mean and sigma for O, C, E, A, N.
std::string report_tsv(const TraitReport& r);

}  // namespace traitlab
