#include "tasc/drafter.hpp"

#include <algorithm>
#include <stdexcept>

namespace tasc {

TokenId argmax(const TokenDistribution& dist) {
  if (dist.empty()) throw std::invalid_argument("argmax of an empty distribution");
  TokenId best = dist.front().first;
  double best_p = dist.front().second;
  for (const auto& [t, p] : dist) {
    if (p > best_p || (p == best_p && t < best)) {
      best = t;
      best_p = p;
    }
  }
  return best;
}

double probability_of(const TokenDistribution& dist, TokenId token) {
  auto it = std::lower_bound(dist.begin(), dist.end(), token,
                             [](const auto& e, TokenId t) { return e.first < t; });
  return it != dist.end() && it->first == token ? it->second : 0.0;
}

EmpiricalDistribution to_empirical(const TokenDistribution& dist) {
  std::vector<double> p;
  p.reserve(dist.size());
  for (const auto& [_, q] : dist) p.push_back(q);
  return EmpiricalDistribution::from_probabilities(std::move(p));
}

const NGramModel::NextCounts* NGramModel::find(std::span<const TokenId> context) const {
  auto it = table.find(TokenSequence(context.begin(), context.end()));
  return it == table.end() ? nullptr : &it->second;
}

std::size_t NGramModel::entries() const {
  std::size_t n = 0;
  for (const auto& [_, next] : table) n += next.size();
  return n;
}

NGramDrafter::NGramDrafter(std::vector<NGramModel> models, TokenId fallback, std::uint64_t p_min,
                           std::size_t vocab_size)
    : models_(std::move(models)), fallback_(fallback), p_min_(p_min), vocab_size_(vocab_size) {
  if (models_.empty()) throw std::invalid_argument("drafter needs at least the bigram model");
  for (std::size_t i = 0; i < models_.size(); ++i) {
    if (models_[i].order != i + 2) throw std::invalid_argument("drafter models must cover orders 2..n_max in order");
  }
}

std::size_t NGramDrafter::matched_order(std::span<const TokenId> context) const {
  for (std::size_t n = n_max(); n >= 2; --n) {
    if (context.size() < n - 1) continue;
    if (const auto* next = models_[n - 2].find(context.last(n - 1)); next && !next->empty()) return n;
  }
  return 0;
}

TokenDistribution NGramDrafter::distribution(std::span<const TokenId> context) const {
  const std::size_t n = matched_order(context);
  if (n == 0) return {{fallback_, 1.0}};
  const auto& next = *models_[n - 2].find(context.last(n - 1));
  std::uint64_t total = 0;
  for (const auto& [_, c] : next) total += c;
  TokenDistribution dist;
  dist.reserve(next.size());
  for (const auto& [t, c] : next) dist.emplace_back(t, static_cast<double>(c) / static_cast<double>(total));
  return dist;
}

namespace {

TokenId most_frequent(const std::map<TokenId, std::uint64_t>& unigrams) {
  TokenId best = 0;
  std::uint64_t best_c = 0;
  for (const auto& [t, c] : unigrams) {
    if (c > best_c) {
      best = t;
      best_c = c;
    }
  }
  return best;
}

}  // namespace

CorpusDrafter build_corpus_drafter(std::span<const TokenSequence> sequences, std::size_t n_max, std::uint64_t p_min,
                                   std::size_t vocab_size) {
  if (n_max < 2) throw std::invalid_argument("n_max must be >= 2");
  if (p_min < 1) throw std::invalid_argument("p_min must be >= 1");

  std::map<TokenId, std::uint64_t> unigrams;
  std::vector<NGramModel> models(n_max - 1);
  for (std::size_t n = 2; n <= n_max; ++n) {
    models[n - 2].order = n;
    models[n - 2].pruned_below = p_min;
  }
  TokenId max_id = 0;
  for (const auto& seq : sequences) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      ++unigrams[seq[i]];
      max_id = std::max(max_id, seq[i]);
      for (std::size_t n = 2; n <= n_max && n - 1 <= i; ++n) {
        TokenSequence ctx(seq.begin() + static_cast<std::ptrdiff_t>(i - (n - 1)),
                          seq.begin() + static_cast<std::ptrdiff_t>(i));
        ++models[n - 2].table[std::move(ctx)][seq[i]];
      }
    }
  }
  if (unigrams.empty()) throw std::invalid_argument("cannot build a corpus drafter from an empty corpus");

  for (auto& m : models) {
    for (auto it = m.table.begin(); it != m.table.end();) {
      std::erase_if(it->second, [&](const auto& e) { return e.second < p_min; });
      it = it->second.empty() ? m.table.erase(it) : std::next(it);
    }
  }
  if (vocab_size == 0) vocab_size = static_cast<std::size_t>(max_id) + 1;
  if (vocab_size <= max_id) throw std::invalid_argument("vocab_size smaller than the largest token id");
  return NGramDrafter(std::move(models), most_frequent(unigrams), p_min, vocab_size);
}

namespace {

std::vector<NGramModel> empty_models(std::size_t n_max) {
  if (n_max < 2) throw std::invalid_argument("n_max must be >= 2");
  std::vector<NGramModel> models(n_max - 1);
  for (std::size_t n = 2; n <= n_max; ++n) models[n - 2].order = n;
  return models;
}

}  // namespace

PromptDrafter::PromptDrafter(TokenSequence prompt, std::size_t n_max, bool refresh_enabled)
    : tables_(empty_models(n_max), 0, 1, 0), refresh_enabled_(refresh_enabled) {
  refresh(prompt);
}

void PromptDrafter::absorb(std::size_t pos) {
  const TokenId t = history_[pos];
  ++unigrams_[t];
  tables_.vocab_size_ = std::max<std::size_t>(tables_.vocab_size_, static_cast<std::size_t>(t) + 1);
  for (std::size_t n = 2; n <= tables_.n_max() && n - 1 <= pos; ++n) {
    TokenSequence ctx(history_.begin() + static_cast<std::ptrdiff_t>(pos - (n - 1)),
                      history_.begin() + static_cast<std::ptrdiff_t>(pos));
    ++tables_.models_[n - 2].table[std::move(ctx)][t];
  }
}

void PromptDrafter::refresh(std::span<const TokenId> accepted) {
  if (accepted.empty()) return;
  const std::size_t start = history_.size();
  history_.insert(history_.end(), accepted.begin(), accepted.end());
  for (std::size_t pos = start; pos < history_.size(); ++pos) absorb(pos);
  tables_.fallback_ = most_frequent(unigrams_);
}

PromptDrafter build_prompt_drafter(const TokenSequence& prompt, std::size_t n_max, bool refresh_enabled) {
  return PromptDrafter(prompt, n_max, refresh_enabled);
}

PromptDrafter refresh_prompt_drafter(PromptDrafter drafter, std::span<const TokenId> accepted) {
  drafter.refresh(accepted);
  return drafter;
}

TokenDistribution mix(const TokenDistribution& a, const TokenDistribution& b, double lambda) {
  TokenDistribution out;
  out.reserve(a.size() + b.size());
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      out.emplace_back(ia->first, lambda * ia->second);
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      out.emplace_back(ib->first, (1.0 - lambda) * ib->second);
      ++ib;
    } else {
      out.emplace_back(ia->first, lambda * ia->second + (1.0 - lambda) * ib->second);
      ++ia;
      ++ib;
    }
  }
  return out;
}

MixedDrafter::MixedDrafter(std::shared_ptr<const CorpusDrafter> corpus, PromptDrafter prompt, double lambda)
    : corpus_(std::move(corpus)), prompt_(std::move(prompt)), lambda_(lambda) {
  if (!corpus_) throw std::invalid_argument("mixed drafter needs a corpus drafter");
  if (!(lambda_ >= 0.0 && lambda_ <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
}

TokenDistribution MixedDrafter::distribution(std::span<const TokenId> context) const {
  return mix(corpus_->distribution(context), prompt_.distribution(context), lambda_);
}

TokenSequence MixedDrafter::draft(std::span<const TokenId> context, std::size_t gamma) const {
  if (gamma < 1) throw std::invalid_argument("draft length must be >= 1");
  TokenSequence work(context.begin(), context.end());
  TokenSequence out;
  out.reserve(gamma);
  for (std::size_t i = 0; i < gamma; ++i) {
    const TokenId t = argmax(distribution(work));
    out.push_back(t);
    work.push_back(t);
  }
  return out;
}

void MixedDrafter::observe(std::span<const TokenId> emitted) {
  if (prompt_.refresh_enabled()) prompt_.refresh(emitted);
}

}  // namespace tasc
