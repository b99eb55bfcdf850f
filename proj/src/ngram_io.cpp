#include "tasc/ngram_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tasc {

static_assert(std::endian::native == std::endian::little, "n-gram table I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'T', 'A', 'S', 'C', 'N', 'G', 'R', '1'};

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <class T>
  T get() {
    if (bytes_.size() - pos_ < sizeof(T)) throw InputError("truncated n-gram table file");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string_view take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw InputError("truncated n-gram table file");
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string write_ngram_tables(const NGramDrafter& drafter) {
  std::string out(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(drafter.n_max()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(drafter.p_min()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(drafter.vocab_size()));
  put<std::uint32_t>(out, drafter.fallback());
  for (const auto& m : drafter.models()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.order));
    put<std::uint64_t>(out, m.entries());
    // std::map iteration is already lexicographic over (context, next).
    for (const auto& [ctx, next] : m.table) {
      for (const auto& [t, c] : next) {
        for (TokenId id : ctx) put<std::uint32_t>(out, id);
        put<std::uint32_t>(out, t);
        put<std::uint64_t>(out, c);
      }
    }
  }
  return out;
}

NGramDrafter read_ngram_tables(std::string_view bytes) {
  Reader r(bytes);
  if (std::memcmp(r.take(sizeof kMagic).data(), kMagic, sizeof kMagic) != 0) {
    throw InputError("not a tasc-ngrams.v1 file");
  }
  const auto n_max = r.get<std::uint32_t>();
  const auto p_min = r.get<std::uint32_t>();
  const auto vocab_size = r.get<std::uint32_t>();
  const auto fallback = r.get<std::uint32_t>();
  if (n_max < 2 || p_min < 1) throw InputError("invalid n-gram table header");
  if (fallback >= vocab_size) throw InputError("fallback token outside the vocabulary");

  std::vector<NGramModel> models;
  for (std::uint32_t n = 2; n <= n_max; ++n) {
    if (r.get<std::uint32_t>() != n) throw InputError("n-gram orders out of sequence");
    const auto entries = r.get<std::uint64_t>();
    NGramModel m;
    m.order = n;
    m.pruned_below = p_min;
    TokenSequence prev;
    for (std::uint64_t e = 0; e < entries; ++e) {
      TokenSequence key(n);  // context ids followed by the next id
      for (auto& id : key) {
        id = r.get<std::uint32_t>();
        if (id >= vocab_size) throw InputError("token id outside the vocabulary");
      }
      const auto count = r.get<std::uint64_t>();
      if (count < p_min) throw InputError("count below the pruning threshold");
      if (e > 0 && !(prev < key)) throw InputError("n-gram entries not strictly sorted");
      m.table[TokenSequence(key.begin(), key.end() - 1)][key.back()] = count;
      prev = std::move(key);
    }
    models.push_back(std::move(m));
  }
  if (!r.done()) throw InputError("trailing bytes in n-gram table file");
  return NGramDrafter(std::move(models), fallback, p_min, vocab_size);
}

void save_ngram_tables(const NGramDrafter& drafter, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write n-gram table '" + path.string() + "'");
  const auto bytes = write_ngram_tables(drafter);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

NGramDrafter load_ngram_tables(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read n-gram table '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_ngram_tables(ss.str());
}

}  // namespace tasc
