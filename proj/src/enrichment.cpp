#include "tasc/enrichment.hpp"

#include <algorithm>
#include <unordered_set>

namespace tasc {

void AugmentationConfig::validate() const {
  if (budget < 1) throw std::invalid_argument("token budget must be >= 1");
  if (n_max < 2) throw std::invalid_argument("n_max must be >= 2");
  if (!(pcs_threshold >= 0.0 && pcs_threshold <= 1.0)) throw std::invalid_argument("PCS threshold must lie in [0, 1]");
  if (recount_interval < 1) throw std::invalid_argument("recount interval must be >= 1");
}

std::uint64_t merge_reward(const TokenSequence& ngram, const NGramCounts& counts) {
  if (ngram.size() != counts.order) throw std::invalid_argument("n-gram arity does not match count table order");
  if (ngram.size() < 2) return 0;
  return counts.count(ngram) * (ngram.size() - 1);
}

double prefix_collision_score(const TokenSequence& ngram, const Vocabulary& vocab, const NGramCounts& token_freqs) {
  if (ngram.empty()) throw std::invalid_argument("n-gram must be non-empty");
  if (token_freqs.order != 1) throw std::invalid_argument("PCS needs unigram frequencies");
  const TokenId last = ngram.back();
  const std::string& suffix = vocab.token_string(last);
  std::uint64_t colliding = 0;
  std::uint64_t sharing = 0;
  for (const auto& [key, freq] : token_freqs.table) {
    const std::string& s = vocab.token_string(key[0]);
    if (!s.starts_with(suffix)) continue;
    sharing += freq;
    if (key[0] != last && s.size() > suffix.size()) colliding += freq;
  }
  return sharing == 0 ? 0.0 : static_cast<double>(colliding) / static_cast<double>(sharing);
}

namespace {

bool ranks_before(const MergeCandidate& a, const MergeCandidate& b) {
  if (a.reward != b.reward) return a.reward > b.reward;
  if (a.ngram.size() != b.ngram.size()) return a.ngram.size() > b.ngram.size();
  return a.ngram < b.ngram;
}

std::vector<MergeCandidate> rank_candidates(std::span<const TokenSequence> seqs, std::size_t n_max,
                                            std::size_t threads) {
  std::vector<MergeCandidate> out;
  for (std::size_t n = 2; n <= n_max; ++n) {
    NGramCounts counts = count_ngrams(seqs, n, threads);
    out.reserve(out.size() + counts.table.size());
    for (auto& [ngram, freq] : counts.table) {
      out.push_back(MergeCandidate{ngram, freq, freq * (n - 1), 0.0});
    }
  }
  std::sort(out.begin(), out.end(), ranks_before);
  return out;
}

}  // namespace

EnrichmentResult enrich_sequences(std::vector<TokenSequence> seqs, const Vocabulary& base,
                                  const AugmentationConfig& config) {
  config.validate();
  if (std::none_of(seqs.begin(), seqs.end(), [](const TokenSequence& s) { return s.size() >= 2; })) {
    throw InputError("corpus has no sequence of length >= 2; nothing to merge");
  }

  EnrichmentResult result{base, {}, {}, {}, false};
  std::unordered_set<TokenSequence, TokenSequenceHash> used;
  std::vector<MergeCandidate> ranked;
  NGramCounts unigrams;
  std::size_t cursor = 0;
  std::size_t since_recount = 0;
  bool stale = true;

  while (result.accepted.size() < config.budget) {
    if (stale) {
      ranked = rank_candidates(seqs, config.n_max, config.threads);
      unigrams = count_ngrams(seqs, 1, config.threads);
      cursor = 0;
      since_recount = 0;
      stale = false;
    }
    while (cursor < ranked.size() && used.contains(ranked[cursor].ngram)) ++cursor;
    if (cursor == ranked.size()) {
      if (since_recount > 0) {
        stale = true;
        continue;
      }
      result.exhausted = true;
      break;
    }

    MergeCandidate cand = ranked[cursor++];
    used.insert(cand.ngram);
    cand.pcs = prefix_collision_score(cand.ngram, result.vocab, unigrams);
    if (cand.pcs < config.pcs_threshold) {
      const TokenId id = result.vocab.add_token(cand.ngram);
      for (auto& s : seqs) merge_ngram(s, cand.ngram, id);
      result.ledger.push_back({cand, true, id});
      result.accepted.push_back(std::move(cand));
      if (++since_recount >= config.recount_interval) stale = true;
    } else {
      result.ledger.push_back({cand, false, 0});
      result.rejected.push_back(std::move(cand));
    }
  }
  return result;
}

EnrichmentResult enrich_vocabulary(const TaskCorpus& corpus, const Vocabulary& base, const AugmentationConfig& config) {
  config.validate();
  // A base that already carries added tokens is extended after them.
  return enrich_sequences(tokenize_corpus(corpus, base, CorpusSide::Output), base, config);
}

CompressionReport compression_report(const TaskCorpus& corpus, const Vocabulary& before, const Vocabulary& after) {
  std::uint64_t bytes = 0;
  std::uint64_t tokens_before = 0;
  std::uint64_t tokens_after = 0;
  for (const auto& d : corpus.documents()) {
    bytes += d.output.size();
    tokens_before += before.encode(d.output).size();
    tokens_after += after.encode(d.output).size();
  }
  const double docs = static_cast<double>(corpus.size());
  CompressionReport r;
  r.avg_len_before = static_cast<double>(tokens_before) / docs;
  r.avg_len_after = static_cast<double>(tokens_after) / docs;
  r.compression_ratio = r.avg_len_before / r.avg_len_after;
  r.bytes_per_token_before = static_cast<double>(bytes) / static_cast<double>(tokens_before);
  r.bytes_per_token_after = static_cast<double>(bytes) / static_cast<double>(tokens_after);
  return r;
}

}  // namespace tasc
