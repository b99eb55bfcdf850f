#include "tasc/vocabulary.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "tasc/bpe.hpp"

namespace tasc {

namespace {

constexpr TokenId kNoId = std::numeric_limits<TokenId>::max();

std::uint64_t pair_key(TokenId a, TokenId b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::vector<std::string> byte_tokens() {
  std::vector<std::string> out;
  out.reserve(256);
  for (int b = 0; b < 256; ++b) out.emplace_back(1, static_cast<char>(b));
  return out;
}

}  // namespace

std::string_view to_string(BaseScheme scheme) {
  switch (scheme) {
    case BaseScheme::Bytes: return "bytes";
    case BaseScheme::Words: return "words";
    case BaseScheme::Bpe: return "bpe";
  }
  return "bytes";
}

BaseScheme parse_base_scheme(std::string_view name) {
  if (name == "bytes") return BaseScheme::Bytes;
  if (name == "words") return BaseScheme::Words;
  if (name == "bpe") return BaseScheme::Bpe;
  throw InputError("unknown base scheme '" + std::string(name) + "'");
}

std::vector<std::string_view> split_word_pieces(std::string_view text) {
  std::vector<std::string_view> pieces;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t j = i;
    while (j < text.size() && is_space(static_cast<unsigned char>(text[j]))) ++j;
    while (j < text.size() && !is_space(static_cast<unsigned char>(text[j]))) ++j;
    pieces.push_back(text.substr(i, j - i));
    i = j;
  }
  return pieces;
}

void Vocabulary::index_base() {
  base_index_.clear();
  byte_ids_.assign(256, kNoId);
  for (TokenId id = 0; id < base_.size(); ++id) {
    if (!base_index_.emplace(base_[id], id).second) {
      throw std::invalid_argument("duplicate base token string at id " + std::to_string(id));
    }
    if (base_[id].size() == 1) byte_ids_[static_cast<unsigned char>(base_[id][0])] = id;
  }
  merge_rank_.clear();
  for (std::size_t r = 0; r < merges_.size(); ++r) merge_rank_.emplace(pair_key(merges_[r].first, merges_[r].second), r);
}

Vocabulary Vocabulary::bytes() {
  Vocabulary v;
  v.scheme_ = BaseScheme::Bytes;
  v.base_ = byte_tokens();
  v.index_base();
  return v;
}

Vocabulary Vocabulary::words_from_pieces(std::vector<std::string> pieces) {
  Vocabulary v;
  v.scheme_ = BaseScheme::Words;
  v.base_ = byte_tokens();
  for (auto& p : pieces) {
    if (p.size() > 1) v.base_.push_back(std::move(p));
  }
  v.index_base();
  return v;
}

Vocabulary Vocabulary::words(std::span<const std::string> texts, std::size_t max_words) {
  std::map<std::string_view, std::size_t> freq;
  for (const auto& t : texts) {
    for (auto piece : split_word_pieces(t)) {
      if (piece.size() > 1) ++freq[piece];
    }
  }
  std::vector<std::pair<std::string_view, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (max_words > 0 && ranked.size() > max_words) ranked.resize(max_words);
  std::vector<std::string> pieces;
  pieces.reserve(ranked.size());
  for (const auto& [p, _] : ranked) pieces.emplace_back(p);
  return words_from_pieces(std::move(pieces));
}

Vocabulary Vocabulary::bpe(std::vector<std::string> tokens, std::vector<std::pair<TokenId, TokenId>> merges) {
  Vocabulary v;
  v.scheme_ = BaseScheme::Bpe;
  v.base_ = std::move(tokens);
  v.merges_ = std::move(merges);
  for (const auto& [a, b] : v.merges_) {
    if (a >= v.base_.size() || b >= v.base_.size()) throw std::invalid_argument("BPE merge refers to unknown id");
  }
  v.index_base();
  for (const auto& [a, b] : v.merges_) {
    if (!v.base_index_.contains(v.base_[a] + v.base_[b])) {
      throw std::invalid_argument("BPE merge result '" + v.base_[a] + v.base_[b] + "' is not a token");
    }
  }
  return v;
}

const std::string& Vocabulary::token_string(TokenId id) const {
  if (id < base_.size()) return base_[id];
  if (id < size()) return added_[id - base_.size()].string;
  throw EncodingError("unknown token id " + std::to_string(id));
}

const AddedToken& Vocabulary::added(TokenId id) const {
  if (!is_added(id)) throw std::out_of_range("token " + std::to_string(id) + " is not an added token");
  return added_[id - base_.size()];
}

TokenId Vocabulary::add_token(TokenSequence constituents) {
  if (constituents.size() < 2) throw std::invalid_argument("an added token needs at least two constituents");
  std::string s;
  for (TokenId c : constituents) {
    if (!contains(c)) throw std::invalid_argument("constituent id " + std::to_string(c) + " is not in the vocabulary");
    s += token_string(c);
  }
  const auto id = static_cast<TokenId>(size());
  added_.push_back(AddedToken{id, std::move(constituents), std::move(s)});
  return id;
}

Vocabulary Vocabulary::with_added_prefix(std::size_t n_added) const {
  Vocabulary v = *this;
  if (n_added < v.added_.size()) v.added_.resize(n_added);
  return v;
}

void Vocabulary::encode_piece(std::string_view piece, TokenSequence& out) const {
  if (scheme_ == BaseScheme::Words) {
    if (auto it = base_index_.find(std::string(piece)); it != base_index_.end()) {
      out.push_back(it->second);
      return;
    }
  }
  TokenSequence symbols;
  symbols.reserve(piece.size());
  for (char ch : piece) {
    const TokenId id = byte_ids_[static_cast<unsigned char>(ch)];
    if (id == kNoId) {
      throw EncodingError("byte " + std::to_string(static_cast<unsigned char>(ch)) + " has no token in the vocabulary");
    }
    symbols.push_back(id);
  }
  if (scheme_ == BaseScheme::Bpe) {
    while (symbols.size() > 1) {
      std::size_t best_rank = std::numeric_limits<std::size_t>::max();
      for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
        auto it = merge_rank_.find(pair_key(symbols[i], symbols[i + 1]));
        if (it != merge_rank_.end() && it->second < best_rank) {
          best_rank = it->second;
        }
      }
      if (best_rank == std::numeric_limits<std::size_t>::max()) break;
      const auto [a, b] = merges_[best_rank];
      const TokenId merged = base_index_.at(base_[a] + base_[b]);
      // Merge every occurrence of the winning pair, left to right.
      TokenSequence next;
      next.reserve(symbols.size());
      for (std::size_t i = 0; i < symbols.size();) {
        if (i + 1 < symbols.size() && symbols[i] == a && symbols[i + 1] == b) {
          next.push_back(merged);
          i += 2;
        } else {
          next.push_back(symbols[i++]);
        }
      }
      symbols.swap(next);
    }
  }
  out.insert(out.end(), symbols.begin(), symbols.end());
}

TokenSequence Vocabulary::base_encode(std::string_view text) const {
  TokenSequence out;
  out.reserve(text.size());
  switch (scheme_) {
    case BaseScheme::Bytes:
      encode_piece(text, out);
      break;
    case BaseScheme::Words:
      for (auto piece : split_word_pieces(text)) encode_piece(piece, out);
      break;
    case BaseScheme::Bpe:
      for (auto piece : bpe::split_pieces(text)) encode_piece(piece, out);
      break;
  }
  return out;
}

void Vocabulary::apply_added_tokens(TokenSequence& tokens) const {
  for (const auto& tok : added_) {
    if (tokens.size() < tok.constituents.size()) continue;
    merge_ngram(tokens, tok.constituents, tok.id);
  }
}

TokenSequence Vocabulary::encode(std::string_view text) const {
  TokenSequence out = base_encode(text);
  apply_added_tokens(out);
  return out;
}

std::string Vocabulary::decode(std::span<const TokenId> tokens) const {
  std::string out;
  for (TokenId t : tokens) out += token_string(t);
  return out;
}

bool operator==(const Vocabulary& a, const Vocabulary& b) {
  return a.scheme_ == b.scheme_ && a.base_ == b.base_ && a.added_ == b.added_ && a.merges_ == b.merges_;
}

std::size_t merge_ngram(TokenSequence& tokens, std::span<const TokenId> ngram, TokenId id) {
  const std::size_t n = ngram.size();
  if (n == 0 || tokens.size() < n) return 0;
  std::size_t replaced = 0;
  std::size_t write = 0;
  std::size_t read = 0;
  while (read < tokens.size()) {
    if (tokens[read] == ngram[0] && read + n <= tokens.size() &&
        std::equal(ngram.begin(), ngram.end(), tokens.begin() + static_cast<std::ptrdiff_t>(read))) {
      tokens[write++] = id;
      read += n;
      ++replaced;
    } else {
      tokens[write++] = tokens[read++];
    }
  }
  tokens.resize(write);
  return replaced;
}

}  // namespace tasc
