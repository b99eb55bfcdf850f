#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tasc/corpus.hpp"

namespace tasc {

/// Discrete distribution over items listed in key order. All entropies in
/// this module are reported in bits.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;

  /// Throws std::invalid_argument unless p >= 0 and sum(p) == 1 +- 1e-9.
  static EmpiricalDistribution from_probabilities(std::vector<double> probabilities);
  /// Throws std::invalid_argument when the counts sum to zero.
  static EmpiricalDistribution from_counts(std::span<const std::uint64_t> counts);

  template <class Key>
  static EmpiricalDistribution from_count_map(const std::map<Key, std::uint64_t>& counts) {
    std::vector<std::uint64_t> c;
    c.reserve(counts.size());
    for (const auto& [_, v] : counts) c.push_back(v);
    return from_counts(c);
  }

  std::span<const double> probabilities() const { return p_; }
  std::size_t size() const { return p_.size(); }
  std::size_t support_size() const;
  bool empty() const { return p_.empty(); }

 private:
  std::vector<double> p_;
};

/// -sum p log2 p, with 0 log 0 = 0.
double shannon_entropy(const EmpiricalDistribution& dist);

/// (1 / (1 - alpha)) log2 sum p^alpha. Requires alpha > 0 and alpha != 1.
double renyi_entropy(const EmpiricalDistribution& dist, double alpha);

/// Shannon entropy divided by log2(vocab_size). Throws std::invalid_argument
/// when vocab_size is smaller than the support.
double normalized_entropy(const EmpiricalDistribution& dist, std::size_t vocab_size);

/// Smallest k such that the k most probable items (ties in key order) carry
/// at least `mass`. Cumulative sums are compared with a 1e-12 slack so that
/// e.g. ten items of 0.1 reach 0.8 after eight.
std::size_t coverage_count(const EmpiricalDistribution& dist, double mass);

/// Unigram distribution of token ids over a tokenized corpus, keyed by id.
EmpiricalDistribution token_distribution(std::span<const TokenSequence> sequences);

enum class TextNormalization { None, Lower, LowerStripPunct };

TextNormalization parse_normalization(std::string_view name);
std::string_view to_string(TextNormalization n);

std::vector<std::string> split_words(std::string_view text, TextNormalization norm);

struct VariabilityReport {
  std::size_t n = 2;
  double mass = 0.8;
  double input_entropy = 0.0;   // bits
  double output_entropy = 0.0;  // bits
  double delta_pct = 0.0;       // 100 * (out - in) / in; NaN when in == 0 < out
  std::size_t input_coverage = 0;
  std::size_t output_coverage = 0;
  double coverage_ratio = 0.0;  // input_coverage / output_coverage
  std::size_t input_unique = 0;
  std::size_t output_unique = 0;
};

/// Word n-gram entropy and coverage for both corpus sides. Windows stay
/// within one document. Throws InputError when a side has no n-gram.
VariabilityReport variability_report(const TaskCorpus& corpus, std::size_t n,
                                     TextNormalization norm = TextNormalization::None,
                                     double mass = 0.8);

/// Word n-gram counts over one side, keyed by the word tuple.
std::map<std::vector<std::string>, std::uint64_t> word_ngram_counts(const TaskCorpus& corpus, CorpusSide side,
                                                                    std::size_t n, TextNormalization norm);

}  // namespace tasc
