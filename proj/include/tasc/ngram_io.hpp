#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "tasc/drafter.hpp"

namespace tasc {

// tasc-ngrams.v1, all integers little-endian:
//   header  : "TASCNGR1", u32 n_max, u32 p_min, u32 vocab_size, u32 fallback
//   per order n = 2..n_max:
//             u32 n, u64 entry_count,
//             entry_count x ((n-1) x u32 context id, u32 next id, u64 count)
//   entries sorted lexicographically by (context, next).
std::string write_ngram_tables(const NGramDrafter& drafter);
NGramDrafter read_ngram_tables(std::string_view bytes);

void save_ngram_tables(const NGramDrafter& drafter, const std::filesystem::path& path);
NGramDrafter load_ngram_tables(const std::filesystem::path& path);

}  // namespace tasc
