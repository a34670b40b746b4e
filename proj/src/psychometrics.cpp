#include "psychometrics.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "error.hpp"

namespace traitlab {

const char* trait_name(TraitDim t) {
  switch (t) {
    case TraitDim::Openness: return "openness";
    case TraitDim::Conscientiousness: return "conscientiousness";
    case TraitDim::Extraversion: return "extraversion";
    case TraitDim::Agreeableness: return "agreeableness";
    case TraitDim::Neuroticism: return "neuroticism";
  }
  return "?";
}

char trait_letter(TraitDim t) { return "OCEAN"[static_cast<int>(t)]; }

std::optional<TraitDim> trait_from_letter(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'O': return TraitDim::Openness;
    case 'C': return TraitDim::Conscientiousness;
    case 'E': return TraitDim::Extraversion;
    case 'A': return TraitDim::Agreeableness;
    case 'N': return TraitDim::Neuroticism;
  }
  return std::nullopt;
}

namespace {

char option_letter(char c) {
  char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return (u >= 'A' && u <= 'E') ? u : 0;
}

bool letter_terminator(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '.' ||
         c == ')' || c == ':' || c == ',' || c == '-';
}

}  // namespace

char parse_choice(const std::string& raw) {
  for (std::size_t i = 0; i + 2 < raw.size(); ++i) {
    if (raw[i] != '(') continue;
    char letter = option_letter(raw[i + 1]);
    if (letter && raw[i + 2] == ')') return letter;
  }
  std::size_t i = 0;
  while (i < raw.size() &&
         std::isspace(static_cast<unsigned char>(raw[i]))) {
    ++i;
  }
  if (i < raw.size()) {
    char letter = option_letter(raw[i]);
    if (letter && (i + 1 == raw.size() || letter_terminator(raw[i + 1]))) {
      return letter;
    }
  }
  return 0;
}

int score_choice(const MpiItem& item, char choice) {
  char letter = option_letter(choice);
  if (!letter) fail(errc::invalid_argument, "choice must be A..E");
  int rank = letter - 'A';  // 0..4
  return item.key == ItemKey::Positive ? 5 - rank : 1 + rank;
}

namespace {

nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io, "cannot open file: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(errc::bad_data, "invalid JSON: " + path);
  return j;
}

}  // namespace

std::vector<MpiItem> load_inventory(const std::string& path) {
  nlohmann::json j = parse_json_file(path);
  if (!j.is_array()) fail(errc::bad_data, "inventory must be a JSON array");
  std::vector<MpiItem> items;
  std::unordered_set<std::string> seen;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("id") || !e.contains("statement") ||
        !e.contains("trait") || !e.contains("key")) {
      fail(errc::bad_data,
           "inventory items need id, statement, trait, key: " + path);
    }
    MpiItem item;
    item.id = e.at("id").get<std::string>();
    item.statement = e.at("statement").get<std::string>();
    if (item.statement.empty()) {
      fail(errc::bad_data, "empty statement for item " + item.id);
    }
    std::string trait = e.at("trait").get<std::string>();
    auto dim = trait.size() == 1 ? trait_from_letter(trait[0]) : std::nullopt;
    if (!dim) fail(errc::bad_data, "unknown trait \"" + trait + "\"");
    item.trait = *dim;
    std::string key = e.at("key").get<std::string>();
    if (key == "+") {
      item.key = ItemKey::Positive;
    } else if (key == "-") {
      item.key = ItemKey::Negative;
    } else {
      fail(errc::bad_data, "item key must be \"+\" or \"-\"");
    }
    if (!seen.insert(item.id).second) {
      fail(errc::bad_data, "duplicate item id " + item.id);
    }
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<MpiResponse> load_responses(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io, "cannot open file: " + path);
  std::vector<MpiResponse> responses;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("item_id")) {
      fail(errc::bad_data,
           path + ":" + std::to_string(lineno) + ": bad response record");
    }
    MpiResponse r;
    r.item_id = j.at("item_id").get<std::string>();
    if (j.contains("raw")) r.raw = j.at("raw").get<std::string>();
    if (j.contains("choice")) {
      std::string c = j.at("choice").get<std::string>();
      r.choice = c.size() == 1 ? option_letter(c[0]) : 0;
      if (!r.choice) {
        fail(errc::bad_data,
             path + ":" + std::to_string(lineno) + ": choice must be A..E");
      }
    } else {
      r.choice = parse_choice(r.raw);
    }
    responses.push_back(std::move(r));
  }
  return responses;
}

TraitReport score_traits(const std::vector<MpiItem>& items,
                         const std::vector<MpiResponse>& responses) {
  std::unordered_map<std::string, const MpiItem*> by_id;
  for (const auto& item : items) by_id[item.id] = &item;

  std::array<std::vector<int>, kTraitCount> scores;
  std::array<std::uint64_t, kTraitCount> item_counts{};
  for (const auto& item : items) {
    ++item_counts[static_cast<int>(item.trait)];
  }

  std::unordered_set<std::string> answered;
  for (const auto& r : responses) {
    auto it = by_id.find(r.item_id);
    if (it == by_id.end()) {
      fail(errc::unknown_item, "response for unknown item " + r.item_id);
    }
    if (!answered.insert(r.item_id).second) {
      fail(errc::duplicate_response, "duplicate response for " + r.item_id);
    }
    if (r.choice) {
      scores[static_cast<int>(it->second->trait)].push_back(
          score_choice(*it->second, r.choice));
    }
  }

  TraitReport report;
  for (int t = 0; t < kTraitCount; ++t) {
    auto& ts = report.traits[t];
    const auto& vals = scores[t];
    ts.n_answered = vals.size();
    ts.n_skipped = item_counts[t] - vals.size();
    if (!vals.empty()) {
      double sum = 0;
      for (int v : vals) sum += v;
      ts.mean = sum / static_cast<double>(vals.size());
      double m2 = 0;
      for (int v : vals) m2 += (v - ts.mean) * (v - ts.mean);
      ts.sigma = std::sqrt(m2 / static_cast<double>(vals.size()));
    }
  }
  return report;
}

std::string report_json(const TraitReport& r) {
  nlohmann::json traits = nlohmann::json::object();
  for (int t = 0; t < kTraitCount; ++t) {
    const auto& ts = r.traits[t];
    nlohmann::json entry{{"n_answered", ts.n_answered},
                         {"n_skipped", ts.n_skipped}};
    if (ts.n_answered > 0) {
      entry["mean"] = ts.mean;
      entry["sigma"] = ts.sigma;
    } else {
      entry["mean"] = nullptr;
      entry["sigma"] = nullptr;
    }
    traits[std::string(1, trait_letter(static_cast<TraitDim>(t)))] = entry;
  }
  nlohmann::json j{
      {"traits", traits},
      {"scoring", "likert A=5..E=1, reversed for negative-keyed items"},
      {"sigma", "population"},
  };
  return j.dump();
}

std::string report_tsv(const TraitReport& r) {
  std::string out;
  char buf[64];
  for (int t = 0; t < kTraitCount; ++t) {
    const auto& ts = r.traits[t];
    if (ts.n_answered > 0) {
      std::snprintf(buf, sizeof(buf), "%.4f\t%.4f", ts.mean, ts.sigma);
    } else {
      std::snprintf(buf, sizeof(buf), "nan\tnan");
    }
    if (t) out += '\t';
    out += buf;
  }
  return out;
}

}  // namespace traitlab
