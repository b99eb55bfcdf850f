#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tasc/types.hpp"

namespace tasc {

class Vocabulary;

struct Document {
  std::string input;
  std::string output;
};

/// An ordered, non-empty collection of (input, output) pairs. The multiset of
/// outputs is the task corpus every statistic is drawn from.
class TaskCorpus {
 public:
  TaskCorpus(std::string id, std::vector<Document> documents);

  const std::string& id() const { return id_; }
  std::span<const Document> documents() const { return documents_; }
  std::size_t size() const { return documents_.size(); }
  const Document& operator[](std::size_t i) const { return documents_[i]; }

  std::vector<std::string> outputs() const;
  std::vector<std::string> inputs() const;

 private:
  std::string id_;
  std::vector<Document> documents_;
};

enum class CorpusFormat {
  TascV1,     // JSON lines with string fields "input" and "output"
  PlainText,  // one output per line, inputs empty
};

CorpusFormat parse_corpus_format(std::string_view name);

/// Error raised while reading a corpus file. `line()` is 1-based, 0 when the
/// failure is not tied to a record.
class CorpusError : public InputError {
 public:
  CorpusError(const std::string& what, std::size_t line);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Blank lines are skipped in both formats. The corpus id is the file stem.
TaskCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format);

void save_corpus(const TaskCorpus& corpus, const std::filesystem::path& path);

enum class CorpusSide { Input, Output };

std::vector<TokenSequence> tokenize_corpus(const TaskCorpus& corpus, const Vocabulary& vocab,
                                           CorpusSide side);

/// Exact count table of contiguous n-token windows. Windows never cross
/// sequence boundaries.
struct NGramCounts {
  std::size_t order = 0;
  std::unordered_map<TokenSequence, std::uint64_t, TokenSequenceHash> table;
  std::uint64_t total = 0;

  std::uint64_t count(const TokenSequence& ngram) const {
    auto it = table.find(ngram);
    return it == table.end() ? 0 : it->second;
  }
};

/// `threads` > 1 partitions sequences across workers and merges the partial
/// tables; the result is identical to the sequential count.
NGramCounts count_ngrams(std::span<const TokenSequence> sequences, std::size_t n,
                         std::size_t threads = 1);

}  // namespace tasc
