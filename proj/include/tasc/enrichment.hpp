#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tasc/corpus.hpp"
#include "tasc/vocabulary.hpp"

namespace tasc {

struct MergeCandidate {
  TokenSequence ngram;
  std::uint64_t freq = 0;
  std::uint64_t reward = 0;  // freq * (n - 1)
  double pcs = 0.0;

  friend bool operator==(const MergeCandidate&, const MergeCandidate&) = default;
};

struct AugmentationConfig {
  std::size_t budget = 100;        // M, tokens to add
  std::size_t n_max = 4;           // longest n-gram considered
  double pcs_threshold = 0.1;      // accept iff PCS < threshold
  std::size_t recount_interval = 1;  // acceptances between full recounts
  std::size_t threads = 1;         // n-gram counting workers

  void validate() const;
};

/// freq(ngram) * (n - 1). Throws std::invalid_argument on arity mismatch.
std::uint64_t merge_reward(const TokenSequence& ngram, const NGramCounts& counts);

/// Frequency-weighted probability that the final token's string is a proper
/// prefix of another token's string:
///
///   sum freq(t') over t' != last whose string strictly extends str(last)
///   ---------------------------------------------------------------------
///   sum freq(t'') over every t'' whose string starts with str(last)
///
/// 0 when the denominator is 0. `token_freqs` must be an order-1 table.
double prefix_collision_score(const TokenSequence& ngram, const Vocabulary& vocab,
                              const NGramCounts& token_freqs);

struct LedgerEntry {
  MergeCandidate candidate;
  bool accepted = false;
  TokenId id = 0;  // new token id when accepted
};

struct EnrichmentResult {
  Vocabulary vocab;
  std::vector<MergeCandidate> accepted;
  std::vector<MergeCandidate> rejected;
  std::vector<LedgerEntry> ledger;  // every examined candidate, in order
  bool exhausted = false;           // candidates ran out before the budget was met
};

/// Greedy tokenizer enrichment. Each iteration takes the unused n-gram
/// (2 <= n <= n_max) with the largest merge reward over the current
/// tokenization, ties broken by longer n and then lexicographic ids, marks it
/// used, and adds it iff its PCS is below the threshold.
EnrichmentResult enrich_vocabulary(const TaskCorpus& corpus, const Vocabulary& base,
                                   const AugmentationConfig& config);

/// Same loop over sequences already tokenized under `base`.
EnrichmentResult enrich_sequences(std::vector<TokenSequence> sequences, const Vocabulary& base,
                                  const AugmentationConfig& config);

struct CompressionReport {
  double avg_len_before = 0.0;
  double avg_len_after = 0.0;
  double compression_ratio = 1.0;  // avg_len_before / avg_len_after
  double bytes_per_token_before = 0.0;
  double bytes_per_token_after = 0.0;
};

/// Computed over the output side of `corpus`.
CompressionReport compression_report(const TaskCorpus& corpus, const Vocabulary& before,
                                     const Vocabulary& after);

}  // namespace tasc
