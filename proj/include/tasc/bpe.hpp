#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tasc/vocabulary.hpp"

namespace tasc::bpe {

/// GPT-2 style printable-codepoint alias for a raw byte, UTF-8 encoded.
const std::string& byte_alias(unsigned char byte);

/// Inverse of byte_alias over a whole token. Throws InputError when a
/// codepoint is not a byte alias.
std::string unalias(std::string_view token);

/// Pre-tokenizer used for imported BPE vocabularies: an ASCII approximation
/// of the GPT-2 split (optional leading space + letter/digit/symbol run,
/// whitespace runs leave their last space to the following word).
std::vector<std::string_view> split_pieces(std::string_view text);

/// Loads the two-file layout: `vocab.json` ({"token": id, ...}, ids
/// contiguous from 0) and `merges.txt` (one "left right" rule per line,
/// lines starting with "#version" ignored). With `byte_level` the token
/// strings are GPT-2 byte aliases and are mapped back to raw bytes.
Vocabulary load(const std::filesystem::path& vocab_json, const std::filesystem::path& merges_txt,
                bool byte_level = true);

}  // namespace tasc::bpe
