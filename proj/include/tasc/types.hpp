#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tasc {

using TokenId = std::uint32_t;
using TokenSequence = std::vector<TokenId>;

/// Raised for malformed or unreadable external inputs (files, records, flags).
/// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a text cannot be represented under a vocabulary.
class EncodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a checked runtime property fails (e.g. speculative output
/// diverging from plain greedy decoding). The CLI maps this to exit code 1.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TokenSequenceHash {
  std::size_t operator()(const TokenSequence& seq) const noexcept {
    // FNV-1a over the ids, then a final avalanche.
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (TokenId t : seq) {
      h ^= t;
      h *= 0x100000001b3ull;
    }
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return static_cast<std::size_t>(h);
  }
};

}  // namespace tasc
