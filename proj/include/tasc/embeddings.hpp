#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "tasc/vocabulary.hpp"

namespace tasc {

/// Row-major rows x dim matrix of finite doubles.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix(std::size_t rows, std::size_t dim);
  EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  std::span<double> row(std::size_t r);
  std::span<const double> row(std::size_t r) const;
  std::span<const double> data() const { return data_; }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t dim_;
  std::vector<double> data_;
};

/// One row per vocabulary token. Base rows are copied unchanged; each added
/// token's row is the mean of its constituents' rows, resolved in insertion
/// order so nested tokens see their already-initialized constituents.
/// Throws std::invalid_argument if the input lacks a base row.
EmbeddingMatrix init_embeddings(const EmbeddingMatrix& embeddings, const Vocabulary& vocab);

/// Binary layout: 8-byte magic "TASCEMB1", u32 rows, u32 dim (little
/// endian), then rows*dim little-endian IEEE-754 doubles.
void save_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path);
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);

}  // namespace tasc
