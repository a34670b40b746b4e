#include "sampler.hpp"

#include <cctype>
#include <filesystem>

#include <json.hpp>

#include "error.hpp"
#include "rng.hpp"
#include "sha256.hpp"

namespace fs = std::filesystem;

namespace traitlab {

std::vector<std::string> whitespace_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::size_t i = 0, n = text.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < n && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

std::vector<SequenceChunk> chunk(const std::vector<std::string>& tokens,
                                 std::uint32_t seq_len,
                                 const std::string& source) {
  if (seq_len == 0) fail(errc::invalid_argument, "seq_len must be >= 1");
  std::vector<SequenceChunk> out;
  std::uint64_t full = tokens.size() / seq_len;
  out.reserve(full);
  for (std::uint64_t w = 0; w < full; ++w) {
    SequenceChunk c;
    c.source = source;
    c.offset = w * seq_len;
    c.tokens.assign(tokens.begin() + c.offset,
                    tokens.begin() + c.offset + seq_len);
    out.push_back(std::move(c));
  }
  return out;
}

std::uint64_t chunk_count(std::uint64_t n_tokens, std::uint32_t seq_len) {
  if (seq_len == 0) fail(errc::invalid_argument, "seq_len must be >= 1");
  return n_tokens / seq_len;
}

SamplePlan plan(std::uint64_t budget_tokens, std::uint32_t seq_len,
                std::uint64_t seed) {
  if (seq_len == 0) fail(errc::invalid_argument, "seq_len must be >= 1");
  if (budget_tokens < seq_len) {
    fail(errc::budget_too_small,
         "budget " + std::to_string(budget_tokens) +
             " is below one sequence of " + std::to_string(seq_len));
  }
  SamplePlan p;
  p.budget_tokens = budget_tokens;
  p.seq_len = seq_len;
  p.seed = seed;
  p.n_sequences = (budget_tokens + seq_len - 1) / seq_len;
  return p;
}

std::vector<std::uint64_t> sample_indices(std::uint64_t n_chunks,
                                          const SamplePlan& p) {
  if (n_chunks < p.n_sequences) {
    fail(errc::insufficient_chunks,
         "need " + std::to_string(p.n_sequences) + " chunks, have " +
             std::to_string(n_chunks));
  }
  std::vector<std::uint64_t> idx(n_chunks);
  for (std::uint64_t i = 0; i < n_chunks; ++i) idx[i] = i;
  Rng rng(p.seed);
  shuffle_prefix(idx, p.n_sequences, rng);
  idx.resize(p.n_sequences);
  return idx;
}

std::vector<SequenceChunk> sample(const std::vector<SequenceChunk>& chunks,
                                  const SamplePlan& p) {
  auto idx = sample_indices(chunks.size(), p);
  std::vector<SequenceChunk> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(chunks[i]);
  return out;
}

namespace {

std::vector<std::string> input_files(const std::string& corpus_path) {
  std::error_code ec;
  if (!fs::is_directory(corpus_path, ec)) return {corpus_path};
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(corpus_path, ec)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    if (ext == ".txt" || ext == ".jsonl") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

SampleRun run_sampler(const std::string& corpus_path,
                      std::uint64_t budget_tokens, std::uint32_t seq_len,
                      std::uint64_t seed, const TokenSplitter& splitter) {
  SampleRun run;
  run.plan = plan(budget_tokens, seq_len, seed);

  auto docs = load_corpus_path(corpus_path);
  std::vector<SequenceChunk> chunks;
  for (const auto& doc : docs) {
    auto toks = splitter(doc.text);
    auto windows = chunk(toks, seq_len, doc.source);
    chunks.insert(chunks.end(), std::make_move_iterator(windows.begin()),
                  std::make_move_iterator(windows.end()));
  }
  run.selected = sample(chunks, run.plan);

  nlohmann::json manifest;
  manifest["budget_tokens"] = run.plan.budget_tokens;
  manifest["seq_len"] = run.plan.seq_len;
  manifest["seed"] = run.plan.seed;
  manifest["n_sequences"] = run.plan.n_sequences;
  manifest["n_chunks_available"] = chunks.size();
  manifest["rounding"] = "ceil";
  manifest["replacement"] = "without";
  manifest["rng"] = "xoshiro256** v1";
  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& f : input_files(corpus_path)) {
    inputs[fs::path(f).filename().string()] = sha256_file_hex(f);
  }
  manifest["inputs"] = inputs;
  run.manifest_json = manifest.dump(2) + "\n";
  return run;
}

std::string chunks_jsonl(const std::vector<SequenceChunk>& chunks) {
  std::string out;
  for (const auto& c : chunks) {
    nlohmann::json j;
    j["source"] = c.source;
    j["offset"] = c.offset;
    j["tokens"] = c.tokens;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace traitlab
