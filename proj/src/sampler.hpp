#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "corpus_io.hpp"

namespace traitlab {

struct SequenceChunk {
  std::string source;    // document id
  std::uint64_t offset;  // token offset of the window start
  std::vector<std::string> tokens;  // exactly seq_len entries
};

struct SamplePlan {
  std::uint64_t budget_tokens = 0;
  std::uint32_t seq_len = 0;
  std::uint64_t seed = 0;
  std::uint64_t n_sequences = 0;  // ceil(budget / seq_len)
};

using TokenSplitter =
    std::function<std::vector<std::string>(const std::string&)>;

// Default counting tokenizer: maximal runs of non-whitespace bytes.
std::vector<std::string> whitespace_tokens(const std::string& text);

// Consecutive non-overlapping seq_len windows; trailing partial dropped.
std::vector<SequenceChunk> chunk(const std::vector<std::string>& tokens,
                                 std::uint32_t seq_len,
                                 const std::string& source);
std::uint64_t chunk_count(std::uint64_t n_tokens, std::uint32_t seq_len);

// Match-or-exceed: n_sequences * seq_len lands in [budget, budget+seq_len).
SamplePlan plan(std::uint64_t budget_tokens, std::uint32_t seq_len,
                std::uint64_t seed);

// Uniform without replacement: seeded shuffle, take the first n_sequences.
// sample() and sample_indices draw from the same stream, so the sampled
// chunks are exactly the chunks at the sampled indices, in order.
std::vector<std::uint64_t> sample_indices(std::uint64_t n_chunks,
                                          const SamplePlan& p);
std::vector<SequenceChunk> sample(const std::vector<SequenceChunk>& chunks,
                                  const SamplePlan& p);

struct SampleRun {
  SamplePlan plan;
  std::vector<SequenceChunk> selected;
  std::string manifest_json;
};

// Load a corpus path, chunk every document, sample to the budget. The
// manifest records the plan, both rounding/replacement decisions, and a
// sha256 digest per input file.
SampleRun run_sampler(const std::string& corpus_path,
                      std::uint64_t budget_tokens, std::uint32_t seq_len,
                      std::uint64_t seed,
                      const TokenSplitter& splitter = whitespace_tokens);

// One line per chunk: {"source":..., "offset":..., "tokens":[...]}.
std::string chunks_jsonl(const std::vector<SequenceChunk>& chunks);

}  // namespace traitlab
