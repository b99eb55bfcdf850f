#include "tasc/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "tasc/vocabulary.hpp"

namespace tasc {

using nlohmann::json;

TaskCorpus::TaskCorpus(std::string id, std::vector<Document> documents)
    : id_(std::move(id)), documents_(std::move(documents)) {
  if (documents_.empty()) throw std::invalid_argument("task corpus must hold at least one document");
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    if (documents_[i].output.empty()) {
      throw std::invalid_argument("document " + std::to_string(i) + " has an empty output");
    }
  }
}

std::vector<std::string> TaskCorpus::outputs() const {
  std::vector<std::string> out;
  out.reserve(documents_.size());
  for (const auto& d : documents_) out.push_back(d.output);
  return out;
}

std::vector<std::string> TaskCorpus::inputs() const {
  std::vector<std::string> out;
  out.reserve(documents_.size());
  for (const auto& d : documents_) out.push_back(d.input);
  return out;
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "tasc.v1" || name == "jsonl") return CorpusFormat::TascV1;
  if (name == "plain" || name == "text") return CorpusFormat::PlainText;
  throw InputError("unknown corpus format '" + std::string(name) + "' (expected tasc.v1 or plain)");
}

CorpusError::CorpusError(const std::string& what, std::size_t line)
    : InputError(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

Document parse_record(const std::string& line, std::size_t lineno) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::exception& e) {
    throw CorpusError(std::string("malformed record: ") + e.what(), lineno);
  }
  if (!rec.is_object()) throw CorpusError("record is not an object", lineno);
  auto field = [&](const char* name) -> std::string {
    auto it = rec.find(name);
    if (it == rec.end()) throw CorpusError(std::string("missing field '") + name + "'", lineno);
    if (!it->is_string()) throw CorpusError(std::string("field '") + name + "' is not a string", lineno);
    return it->get<std::string>();
  };
  Document doc{field("input"), field("output")};
  if (doc.output.empty()) throw CorpusError("empty output", lineno);
  return doc;
}

}  // namespace

TaskCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot read corpus file '" + path.string() + "'", 0);

  std::vector<Document> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    if (format == CorpusFormat::TascV1) {
      docs.push_back(parse_record(line, lineno));
    } else {
      docs.push_back(Document{"", line});
    }
  }
  if (in.bad()) throw CorpusError("read failure on '" + path.string() + "'", lineno);
  if (docs.empty()) throw CorpusError("corpus '" + path.string() + "' is empty", 0);
  return TaskCorpus(path.stem().string(), std::move(docs));
}

void save_corpus(const TaskCorpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write corpus file '" + path.string() + "'");
  for (const auto& d : corpus.documents()) {
    out << json{{"input", d.input}, {"output", d.output}}.dump() << '\n';
  }
}

std::vector<TokenSequence> tokenize_corpus(const TaskCorpus& corpus, const Vocabulary& vocab,
                                           CorpusSide side) {
  std::vector<TokenSequence> out;
  out.reserve(corpus.size());
  for (const auto& d : corpus.documents()) {
    out.push_back(vocab.encode(side == CorpusSide::Input ? d.input : d.output));
  }
  return out;
}

namespace {

void count_range(std::span<const TokenSequence> sequences, std::size_t n, NGramCounts& counts) {
  TokenSequence window(n);
  for (const auto& seq : sequences) {
    if (seq.size() < n) continue;
    for (std::size_t i = 0; i + n <= seq.size(); ++i) {
      std::copy_n(seq.begin() + static_cast<std::ptrdiff_t>(i), n, window.begin());
      ++counts.table[window];
      ++counts.total;
    }
  }
}

}  // namespace

NGramCounts count_ngrams(std::span<const TokenSequence> sequences, std::size_t n, std::size_t threads) {
  if (n == 0) throw std::invalid_argument("n-gram order must be >= 1");
  NGramCounts counts;
  counts.order = n;
  threads = std::max<std::size_t>(1, std::min(threads, sequences.size()));
  if (threads == 1) {
    count_range(sequences, n, counts);
    return counts;
  }

  std::vector<NGramCounts> partial(threads);
  std::vector<std::thread> workers;
  const std::size_t chunk = (sequences.size() + threads - 1) / threads;
  for (std::size_t w = 0; w < threads; ++w) {
    const std::size_t begin = std::min(sequences.size(), w * chunk);
    const std::size_t end = std::min(sequences.size(), begin + chunk);
    workers.emplace_back([&, w, begin, end] {
      partial[w].order = n;
      count_range(sequences.subspan(begin, end - begin), n, partial[w]);
    });
  }
  for (auto& t : workers) t.join();
  for (auto& p : partial) {
    for (auto& [k, v] : p.table) counts.table[k] += v;
    counts.total += p.total;
  }
  return counts;
}

}  // namespace tasc
