#include "tasc/embeddings.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace tasc {

static_assert(std::endian::native == std::endian::little, "embedding I/O assumes a little-endian host");

namespace {
constexpr char kMagic[8] = {'T', 'A', 'S', 'C', 'E', 'M', 'B', '1'};
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), data_(rows * dim, 0.0) {}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<double> data)
    : rows_(rows), dim_(dim), data_(std::move(data)) {
  if (data_.size() != rows_ * dim_) throw std::invalid_argument("embedding data size does not match rows x dim");
  if (!std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); })) {
    throw std::invalid_argument("embedding entries must be finite");
  }
}

std::span<double> EmbeddingMatrix::row(std::size_t r) {
  if (r >= rows_) throw std::out_of_range("embedding row out of range");
  return std::span<double>(data_).subspan(r * dim_, dim_);
}

std::span<const double> EmbeddingMatrix::row(std::size_t r) const {
  if (r >= rows_) throw std::out_of_range("embedding row out of range");
  return std::span<const double>(data_).subspan(r * dim_, dim_);
}

EmbeddingMatrix init_embeddings(const EmbeddingMatrix& embeddings, const Vocabulary& vocab) {
  if (embeddings.rows() < vocab.base_size()) {
    throw std::invalid_argument("embedding matrix has " + std::to_string(embeddings.rows()) + " rows, vocabulary has " +
                                std::to_string(vocab.base_size()) + " base tokens");
  }
  EmbeddingMatrix out(vocab.size(), embeddings.dim());
  for (std::size_t r = 0; r < vocab.base_size(); ++r) {
    std::copy_n(embeddings.row(r).begin(), embeddings.dim(), out.row(r).begin());
  }
  for (const auto& tok : vocab.added_tokens()) {
    auto dst = out.row(tok.id);
    for (TokenId c : tok.constituents) {
      if (c >= tok.id) throw std::invalid_argument("constituent row " + std::to_string(c) + " is not initialized yet");
      auto src = out.row(c);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    }
    const double n = static_cast<double>(tok.constituents.size());
    for (double& x : dst) x /= n;
  }
  return out;
}

void save_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write embeddings '" + path.string() + "'");
  const auto rows = static_cast<std::uint32_t>(m.rows());
  const auto dim = static_cast<std::uint32_t>(m.dim());
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&rows), 4);
  out.write(reinterpret_cast<const char*>(&dim), 4);
  out.write(reinterpret_cast<const char*>(m.data().data()), static_cast<std::streamsize>(m.data().size_bytes()));
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read embeddings '" + path.string() + "'");
  char magic[8];
  std::uint32_t rows = 0;
  std::uint32_t dim = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&dim), 4);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw InputError("not a TASCEMB1 embedding file");
  std::vector<double> data(static_cast<std::size_t>(rows) * dim);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!in) throw InputError("truncated embedding file");
  if (in.peek() != std::char_traits<char>::eof()) throw InputError("trailing bytes in embedding file");
  return EmbeddingMatrix(rows, dim, std::move(data));
}

}  // namespace tasc
