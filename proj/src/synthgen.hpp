#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lexicons.hpp"
#include "profiler.hpp"

namespace traitlab {

// A corpus recipe whose metrics are known by construction. Targets beyond
// the resolution of n_sentences (or of the polarity word bank) are
// rejected rather than approximated.
struct ProfileTarget {
  double imperative_ratio = 0.0;   // must be integral at n_sentences
  double detachment = 0.0;         // realized by exact pronoun bookkeeping
  std::vector<double> polarities;  // one per sentence; empty means all 0
  double ttr_lo = 0.0;
  double ttr_hi = 1.0;
  std::uint64_t n_sentences = 0;
  std::uint64_t seed = 0;
};

ProfileTarget target_from_json(const std::string& json_text);
ProfileTarget target_from_file(const std::string& path);
std::string target_json(const ProfileTarget& t);

struct SynthResult {
  std::string text;
  CorpusProfile expected;
};

// Compose sentences from the shipped lexicons so that the profiler's own
// integer bookkeeping reproduces the target: imperative ratio and
// detachment come out bit-identical, sentence polarities are realized
// word-for-word, and the type/token ratio lands inside [ttr_lo, ttr_hi].
SynthResult generate(const ProfileTarget& t, const Resources& res);

}  // namespace traitlab
