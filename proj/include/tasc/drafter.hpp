#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "tasc/metrics.hpp"
#include "tasc/types.hpp"

namespace tasc {

/// Sparse next-token distribution, sorted by token id, summing to 1.
using TokenDistribution = std::vector<std::pair<TokenId, double>>;

/// Argmax with ties resolved to the lowest token id.
TokenId argmax(const TokenDistribution& dist);

double probability_of(const TokenDistribution& dist, TokenId token);

EmpiricalDistribution to_empirical(const TokenDistribution& dist);

/// Order-n conditional counts: (n-1)-token context -> next token -> count.
struct NGramModel {
  using NextCounts = std::map<TokenId, std::uint64_t>;

  std::size_t order = 2;
  std::uint64_t pruned_below = 1;  // p_min; every retained count is >= this
  std::map<TokenSequence, NextCounts> table;

  const NextCounts* find(std::span<const TokenId> context) const;
  std::size_t entries() const;

  friend bool operator==(const NGramModel&, const NGramModel&) = default;
};

/// A stack of n-gram models (orders 2..n_max) queried in descending order.
/// The first order whose context matches supplies the whole normalized
/// next-token distribution; if none matches the result is a point mass on
/// the fallback token. Orders are never interpolated.
class NGramDrafter {
 public:
  NGramDrafter(std::vector<NGramModel> models, TokenId fallback, std::uint64_t p_min, std::size_t vocab_size);

  std::size_t n_max() const { return models_.size() + 1; }
  std::uint64_t p_min() const { return p_min_; }
  std::size_t vocab_size() const { return vocab_size_; }
  TokenId fallback() const { return fallback_; }
  std::span<const NGramModel> models() const { return models_; }
  const NGramModel& model(std::size_t order) const { return models_.at(order - 2); }

  TokenDistribution distribution(std::span<const TokenId> context) const;

  /// Order that answered `context`, or 0 when the fallback was used.
  std::size_t matched_order(std::span<const TokenId> context) const;

  friend bool operator==(const NGramDrafter&, const NGramDrafter&) = default;

 private:
  friend class PromptDrafter;

  std::vector<NGramModel> models_;
  TokenId fallback_;
  std::uint64_t p_min_;
  std::size_t vocab_size_;
};

using CorpusDrafter = NGramDrafter;

/// Counts below `p_min` are pruned; the fallback is the most frequent token
/// of the corpus (lowest id on ties). `vocab_size` 0 infers max id + 1.
/// Throws std::invalid_argument on an empty corpus or bad parameters.
CorpusDrafter build_corpus_drafter(std::span<const TokenSequence> sequences, std::size_t n_max,
                                   std::uint64_t p_min, std::size_t vocab_size = 0);

/// N-gram drafter over a single growing context (the prompt and, when
/// refreshed, the tokens accepted so far). No pruning.
class PromptDrafter {
 public:
  PromptDrafter(TokenSequence prompt, std::size_t n_max, bool refresh_enabled = true);

  /// Extends the history; equivalent to rebuilding from prompt ++ accepted.
  void refresh(std::span<const TokenId> accepted);

  TokenDistribution distribution(std::span<const TokenId> context) const {
    return tables_.distribution(context);
  }

  bool refresh_enabled() const { return refresh_enabled_; }
  /// Set when built from an empty prompt; the fallback is then token 0.
  bool empty_prompt() const { return unigrams_.empty(); }
  const NGramDrafter& tables() const { return tables_; }
  const TokenSequence& history() const { return history_; }

 private:
  void absorb(std::size_t pos);

  TokenSequence history_;
  NGramDrafter tables_;
  std::map<TokenId, std::uint64_t> unigrams_;
  bool refresh_enabled_;
};

PromptDrafter build_prompt_drafter(const TokenSequence& prompt, std::size_t n_max, bool refresh_enabled = true);
PromptDrafter refresh_prompt_drafter(PromptDrafter drafter, std::span<const TokenId> accepted);

/// Anything that proposes draft continuations for speculative decoding.
class Drafter {
 public:
  virtual ~Drafter() = default;
  /// Proposes exactly `gamma` tokens continuing `context`.
  virtual TokenSequence draft(std::span<const TokenId> context, std::size_t gamma) const = 0;
  /// Called with the tokens emitted after each verification step.
  virtual void observe(std::span<const TokenId> emitted) { (void)emitted; }
};

/// lambda * p_corp + (1 - lambda) * p_prompt over one shared read-only corpus
/// drafter and a per-session prompt drafter.
class MixedDrafter : public Drafter {
 public:
  MixedDrafter(std::shared_ptr<const CorpusDrafter> corpus, PromptDrafter prompt, double lambda);

  TokenDistribution distribution(std::span<const TokenId> context) const;

  /// Greedy autoregressive argmax of the mixture; the prompt drafter is not
  /// refreshed mid-draft.
  TokenSequence draft(std::span<const TokenId> context, std::size_t gamma) const override;

  /// Refreshes the prompt drafter when its refresh policy is enabled.
  void observe(std::span<const TokenId> emitted) override;

  double lambda() const { return lambda_; }
  const CorpusDrafter& corpus() const { return *corpus_; }
  const PromptDrafter& prompt() const { return prompt_; }

 private:
  std::shared_ptr<const CorpusDrafter> corpus_;
  PromptDrafter prompt_;
  double lambda_;
};

inline TokenDistribution drafter_distribution(const NGramDrafter& d, std::span<const TokenId> context) {
  return d.distribution(context);
}
inline TokenDistribution drafter_distribution(const PromptDrafter& d, std::span<const TokenId> context) {
  return d.distribution(context);
}
inline TokenDistribution mixed_distribution(const MixedDrafter& m, std::span<const TokenId> context) {
  return m.distribution(context);
}

/// Pointwise lambda * a + (1 - lambda) * b.
TokenDistribution mix(const TokenDistribution& a, const TokenDistribution& b, double lambda);

}  // namespace tasc
