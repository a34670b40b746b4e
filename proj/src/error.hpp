#pragma once

#include <stdexcept>
#include <string>

namespace traitlab {

// Mirrors the tl_status values of the public C header.
enum class errc : int {
  ok = 0,

  empty_corpus = 100,
  too_few_sentences = 101,
  too_few_points = 102,
  zero_variance = 103,
  length_mismatch = 104,
  same_trait = 105,
  singular = 106,
  unknown_domain = 107,
  join_empty = 108,
  zero_variance_column = 109,
  unknown_item = 110,
  duplicate_response = 111,
  budget_too_small = 112,
  insufficient_chunks = 113,
  unrepresentable_target = 114,
  bad_template = 115,
  bad_data = 116,
  internal = 199,

  usage = 200,
  io = 201,
  invalid_argument = 202,
  config = 203,

  transport = 300,
  all_requests_failed = 301,
};

class error : public std::runtime_error {
 public:
  error(errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, std::string message) {
  throw error(code, std::move(message));
}

}  // namespace traitlab
