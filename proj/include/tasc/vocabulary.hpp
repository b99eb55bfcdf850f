#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tasc/types.hpp"

namespace tasc {

/// How text is split into base tokens before added n-gram tokens are applied.
enum class BaseScheme {
  Bytes,  // 256 single-byte tokens, id == byte value
  Words,  // byte tokens plus whole "whitespace-prefixed word" pieces
  Bpe,    // imported byte-pair-encoding vocabulary and ranked merges
};

std::string_view to_string(BaseScheme scheme);
BaseScheme parse_base_scheme(std::string_view name);

struct AddedToken {
  TokenId id = 0;
  TokenSequence constituents;  // at least two base-or-added ids, all < id
  std::string string;          // concatenation of the constituents' strings

  friend bool operator==(const AddedToken&, const AddedToken&) = default;
};

/// Base vocabulary plus an ordered list of added n-gram tokens.
///
/// Ids are contiguous from 0: base tokens first, then added tokens in
/// insertion order. Encoding runs the base tokenizer and then applies each
/// added token, in insertion order, as a left-to-right non-overlapping
/// replacement of its constituent sequence. Because constituents may be
/// earlier added tokens, nested tokens resolve naturally.
class Vocabulary {
 public:
  static Vocabulary bytes();

  /// Byte tokens plus the `max_words` most frequent multi-byte pieces of
  /// `texts` (frequency desc, then bytewise). 0 keeps every piece.
  static Vocabulary words(std::span<const std::string> texts, std::size_t max_words = 0);
  static Vocabulary words_from_pieces(std::vector<std::string> pieces);

  /// `merges` are ranked pairs of token ids; each pair's concatenation must
  /// itself be a token.
  static Vocabulary bpe(std::vector<std::string> tokens,
                        std::vector<std::pair<TokenId, TokenId>> merges);

  BaseScheme scheme() const { return scheme_; }
  std::size_t size() const { return base_.size() + added_.size(); }
  std::size_t base_size() const { return base_.size(); }
  std::size_t added_size() const { return added_.size(); }

  bool contains(TokenId id) const { return id < size(); }
  bool is_added(TokenId id) const { return id >= base_.size() && id < size(); }
  const std::string& token_string(TokenId id) const;

  std::span<const std::string> base_tokens() const { return base_; }
  std::span<const AddedToken> added_tokens() const { return added_; }
  const AddedToken& added(TokenId id) const;
  std::span<const std::pair<TokenId, TokenId>> merges() const { return merges_; }

  /// Appends a new token; returns its id. Throws std::invalid_argument when
  /// fewer than two constituents are given or one is unknown.
  TokenId add_token(TokenSequence constituents);

  /// Copy keeping only the first `n_added` added tokens.
  Vocabulary with_added_prefix(std::size_t n_added) const;

  TokenSequence base_encode(std::string_view text) const;
  TokenSequence encode(std::string_view text) const;
  std::string decode(std::span<const TokenId> tokens) const;

  /// Applies every added token in insertion order to a base encoding.
  void apply_added_tokens(TokenSequence& tokens) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b);

 private:
  Vocabulary() = default;
  void index_base();
  void encode_piece(std::string_view piece, TokenSequence& out) const;

  BaseScheme scheme_ = BaseScheme::Bytes;
  std::vector<std::string> base_;
  std::vector<AddedToken> added_;
  std::vector<std::pair<TokenId, TokenId>> merges_;
  std::unordered_map<std::string, TokenId> base_index_;
  std::unordered_map<std::uint64_t, std::size_t> merge_rank_;  // (left << 32 | right) -> rank
  std::vector<TokenId> byte_ids_;                              // byte -> id, or npos
};

/// Replaces non-overlapping occurrences of `ngram` in `tokens`, scanning left
/// to right, with `id`. Returns the number of replacements.
std::size_t merge_ngram(TokenSequence& tokens, std::span<const TokenId> ngram, TokenId id);

/// Splits text into pieces of the form (whitespace* non-whitespace+), with
/// any trailing whitespace as its own piece. Concatenation is the input.
std::vector<std::string_view> split_word_pieces(std::string_view text);

inline TokenSequence encode(std::string_view text, const Vocabulary& vocab) {
  return vocab.encode(text);
}
inline std::string decode(std::span<const TokenId> tokens, const Vocabulary& vocab) {
  return vocab.decode(tokens);
}

}  // namespace tasc
