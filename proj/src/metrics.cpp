#include "tasc/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

namespace tasc {

EmpiricalDistribution EmpiricalDistribution::from_probabilities(std::vector<double> probabilities) {
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("probabilities must be finite and >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("probabilities must sum to 1");
  EmpiricalDistribution d;
  d.p_ = std::move(probabilities);
  return d;
}

EmpiricalDistribution EmpiricalDistribution::from_counts(std::span<const std::uint64_t> counts) {
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) throw std::invalid_argument("cannot build a distribution from zero counts");
  EmpiricalDistribution d;
  d.p_.reserve(counts.size());
  for (auto c : counts) d.p_.push_back(static_cast<double>(c) / static_cast<double>(total));
  return d;
}

std::size_t EmpiricalDistribution::support_size() const {
  return static_cast<std::size_t>(std::count_if(p_.begin(), p_.end(), [](double p) { return p > 0.0; }));
}

double shannon_entropy(const EmpiricalDistribution& dist) {
  double h = 0.0;
  for (double p : dist.probabilities()) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double renyi_entropy(const EmpiricalDistribution& dist, double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
    throw std::invalid_argument("Renyi order must be > 0 and != 1");
  }
  double s = 0.0;
  for (double p : dist.probabilities()) {
    if (p > 0.0) s += std::pow(p, alpha);
  }
  return std::log2(s) / (1.0 - alpha);
}

double normalized_entropy(const EmpiricalDistribution& dist, std::size_t vocab_size) {
  if (vocab_size < dist.support_size()) throw std::invalid_argument("vocabulary smaller than distribution support");
  if (vocab_size <= 1) return 0.0;
  return shannon_entropy(dist) / std::log2(static_cast<double>(vocab_size));
}

std::size_t coverage_count(const EmpiricalDistribution& dist, double mass) {
  if (!(mass > 0.0 && mass <= 1.0)) throw std::invalid_argument("coverage mass must lie in (0, 1]");
  const auto p = dist.probabilities();
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  double cum = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    cum += p[order[k]];
    if (cum >= mass - 1e-12) return k + 1;
  }
  return order.size();
}

EmpiricalDistribution token_distribution(std::span<const TokenSequence> sequences) {
  std::map<TokenId, std::uint64_t> counts;
  for (const auto& s : sequences) {
    for (TokenId t : s) ++counts[t];
  }
  return EmpiricalDistribution::from_count_map(counts);
}

TextNormalization parse_normalization(std::string_view name) {
  if (name == "none") return TextNormalization::None;
  if (name == "lower") return TextNormalization::Lower;
  if (name == "lower+strip-punct") return TextNormalization::LowerStripPunct;
  throw InputError("unknown normalization '" + std::string(name) + "'");
}

std::string_view to_string(TextNormalization n) {
  switch (n) {
    case TextNormalization::None: return "none";
    case TextNormalization::Lower: return "lower";
    case TextNormalization::LowerStripPunct: return "lower+strip-punct";
  }
  return "none";
}

std::vector<std::string> split_words(std::string_view text, TextNormalization norm) {
  std::vector<std::string> words;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) words.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
      flush();
      continue;
    }
    if (norm == TextNormalization::LowerStripPunct && c < 0x80 && std::ispunct(c)) continue;
    if (norm != TextNormalization::None && c >= 'A' && c <= 'Z') ch = static_cast<char>(c - 'A' + 'a');
    cur += ch;
  }
  flush();
  return words;
}

std::map<std::vector<std::string>, std::uint64_t> word_ngram_counts(const TaskCorpus& corpus, CorpusSide side,
                                                                    std::size_t n, TextNormalization norm) {
  if (n == 0) throw std::invalid_argument("n-gram order must be >= 1");
  std::map<std::vector<std::string>, std::uint64_t> counts;
  for (const auto& d : corpus.documents()) {
    const auto words = split_words(side == CorpusSide::Input ? d.input : d.output, norm);
    for (std::size_t i = 0; i + n <= words.size(); ++i) {
      ++counts[std::vector<std::string>(words.begin() + static_cast<std::ptrdiff_t>(i),
                                        words.begin() + static_cast<std::ptrdiff_t>(i + n))];
    }
  }
  return counts;
}

VariabilityReport variability_report(const TaskCorpus& corpus, std::size_t n, TextNormalization norm, double mass) {
  const auto in_counts = word_ngram_counts(corpus, CorpusSide::Input, n, norm);
  const auto out_counts = word_ngram_counts(corpus, CorpusSide::Output, n, norm);
  if (in_counts.empty()) throw InputError("input side has no word " + std::to_string(n) + "-grams");
  if (out_counts.empty()) throw InputError("output side has no word " + std::to_string(n) + "-grams");
  const auto in = EmpiricalDistribution::from_count_map(in_counts);
  const auto out = EmpiricalDistribution::from_count_map(out_counts);

  VariabilityReport r;
  r.n = n;
  r.mass = mass;
  r.input_entropy = shannon_entropy(in);
  r.output_entropy = shannon_entropy(out);
  if (r.input_entropy > 0.0) {
    r.delta_pct = 100.0 * (r.output_entropy - r.input_entropy) / r.input_entropy;
  } else {
    r.delta_pct = r.output_entropy == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  }
  r.input_coverage = coverage_count(in, mass);
  r.output_coverage = coverage_count(out, mass);
  r.coverage_ratio = static_cast<double>(r.input_coverage) / static_cast<double>(r.output_coverage);
  r.input_unique = in_counts.size();
  r.output_unique = out_counts.size();
  return r;
}

}  // namespace tasc
