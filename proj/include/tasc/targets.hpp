#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>

#include "tasc/specdec.hpp"

namespace tasc {

/// Reference target: unpruned n-gram model of a held-out corpus with
/// descending-order backoff and a most-frequent-token fallback.
class NGramTarget : public TargetModel {
 public:
  NGramTarget(std::span<const TokenSequence> corpus, std::size_t order, std::size_t vocab_size);

  TokenDistribution next(std::span<const TokenId> context) const override { return model_.distribution(context); }
  std::size_t vocab_size() const override { return vocab_size_; }
  const NGramDrafter& model() const { return model_; }

 private:
  NGramDrafter model_;
  std::size_t vocab_size_;
};

/// Reference target: softmax over pseudo-random logits seeded by `seed` and
/// the last `window` context tokens. Dense over the whole vocabulary.
class RandomLogitTarget : public TargetModel {
 public:
  RandomLogitTarget(std::size_t vocab_size, std::uint64_t seed, std::size_t window = 2, double temperature = 1.0);

  TokenDistribution next(std::span<const TokenId> context) const override;
  std::size_t vocab_size() const override { return vocab_size_; }

 private:
  std::size_t vocab_size_;
  std::uint64_t seed_;
  std::size_t window_;
  double temperature_;
};

/// Raised by ReplayTarget for a context its response file does not cover.
class MissingContextError : public InputError {
 public:
  explicit MissingContextError(TokenSequence context);
  const TokenSequence& context() const { return context_; }

 private:
  TokenSequence context_;
};

// Offline target protocol, JSON lines:
//   request  : {"context": [ids...]}
//   response : {"context": [ids...], "argmax": id, "distribution": [[id, p], ...]}
// "distribution" may be omitted, meaning a point mass on "argmax".
void write_target_requests(std::ostream& out, std::span<const TokenSequence> contexts);
std::vector<TokenSequence> read_target_requests(std::istream& in);
void write_target_responses(std::ostream& out, const TargetModel& target, std::span<const TokenSequence> contexts);

/// Target answering from a response file produced by an external model.
class ReplayTarget : public TargetModel {
 public:
  ReplayTarget(std::istream& responses, std::size_t vocab_size);
  static ReplayTarget from_file(const std::filesystem::path& path, std::size_t vocab_size);

  TokenDistribution next(std::span<const TokenId> context) const override;
  std::size_t vocab_size() const override { return vocab_size_; }
  std::size_t size() const { return table_.size(); }

 private:
  std::map<TokenSequence, TokenDistribution> table_;
  std::size_t vocab_size_;
};

}  // namespace tasc
