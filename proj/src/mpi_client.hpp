#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psychometrics.hpp"

namespace traitlab {

struct EndpointConfig {
  std::string base_url;  // scheme://host[:port], no trailing path
  std::string model;
  // Name of the environment variable holding the API key. The key value
  // itself is read at request time and never stored in any artifact.
  std::string api_key_env = "TRAITLAB_API_KEY";
  double temperature = 0.0;
  int max_tokens = 0;    // completion token cap; 0 leaves it unset
  int max_attempts = 3;  // total tries per item, including the first
  int concurrency = 4;
  int timeout_ms = 30000;
  int retry_base_ms = 250;  // first backoff step; doubles per retry
  std::string prompt_template;  // empty selects the default template
};

struct AttemptLog {
  int attempt = 0;            // 1-based
  std::string started_at;     // UTC, ISO 8601
  int backoff_ms = 0;         // delay taken before this attempt
  int status = 0;             // HTTP status, 0 on connect failure
  bool ok = false;
  std::string error;
};

struct TranscriptEntry {
  std::string item_id;
  std::string prompt;
  std::string raw;  // completion text of the successful attempt
  std::vector<AttemptLog> attempts;
};

struct AdministrationRun {
  std::string inventory_digest;
  std::string config_json;  // snapshot; credential referenced by name only
  std::vector<MpiResponse> responses;       // aligned 1:1 with items
  std::vector<TranscriptEntry> transcript;  // one entry per item
};

const std::string& default_prompt_template();

// Substitutes {statement} into the template.
std::string render_prompt(const MpiItem& item, const std::string& tmpl);

// One chat-completion request per item against an OpenAI-compatible
// endpoint, at most `concurrency` in flight, with exponential backoff on
// transport failure. Item order is preserved in the outputs regardless of
// completion order. Items whose transport never succeeds are recorded as
// unparsed with the error string.
AdministrationRun administer(const std::vector<MpiItem>& items,
                             const EndpointConfig& cfg);

std::string run_json(const AdministrationRun& run);
std::string responses_jsonl(const AdministrationRun& run);

}  // namespace traitlab
