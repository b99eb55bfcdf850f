#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "tasc/vocabulary.hpp"

namespace tasc {

/// Printable ASCII passes through, a backslash becomes "\\", every other
/// byte becomes "\xHH" (lowercase hex). The result is always valid UTF-8.
std::string escape_bytes(std::string_view raw);
std::string unescape_bytes(std::string_view escaped);

/// `tasc-vocab.v1`: a JSON document
///   {"format": "tasc-vocab.v1", "scheme": ..., "base_tokens": [...],
///    "merges": [[left, right], ...],
///    "added_tokens": [{"constituents": [...], "string": ...}, ...]}
/// with every token string passed through escape_bytes.
std::string write_vocabulary(const Vocabulary& vocab);
Vocabulary read_vocabulary(std::string_view text);

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary load_vocabulary(const std::filesystem::path& path);

}  // namespace tasc
