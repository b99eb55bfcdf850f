#include "tasc/targets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace tasc {

using nlohmann::json;

NGramTarget::NGramTarget(std::span<const TokenSequence> corpus, std::size_t order, std::size_t vocab_size)
    : model_(build_corpus_drafter(corpus, order, 1, vocab_size)), vocab_size_(model_.vocab_size()) {}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

RandomLogitTarget::RandomLogitTarget(std::size_t vocab_size, std::uint64_t seed, std::size_t window, double temperature)
    : vocab_size_(vocab_size), seed_(seed), window_(window), temperature_(temperature) {
  if (vocab_size_ < 2) throw std::invalid_argument("random-logit target needs at least two tokens");
  if (!(temperature_ > 0.0)) throw std::invalid_argument("temperature must be positive");
}

TokenDistribution RandomLogitTarget::next(std::span<const TokenId> context) const {
  std::uint64_t h = splitmix64(seed_);
  const std::size_t w = std::min(window_, context.size());
  for (TokenId t : context.last(w)) h = splitmix64(h ^ t);
  h = splitmix64(h ^ w);

  std::vector<double> logits(vocab_size_);
  double max_logit = -HUGE_VAL;
  for (std::size_t v = 0; v < vocab_size_; ++v) {
    // Uniform in [0, 1) from the top 53 bits, scaled to a logit range of 8.
    const double u = static_cast<double>(splitmix64(h + v) >> 11) * 0x1.0p-53;
    logits[v] = 8.0 * u / temperature_;
    max_logit = std::max(max_logit, logits[v]);
  }
  double z = 0.0;
  for (double& l : logits) {
    l = std::exp(l - max_logit);
    z += l;
  }
  TokenDistribution dist;
  dist.reserve(vocab_size_);
  for (std::size_t v = 0; v < vocab_size_; ++v) dist.emplace_back(static_cast<TokenId>(v), logits[v] / z);
  return dist;
}

MissingContextError::MissingContextError(TokenSequence context)
    : InputError("target response file has no entry for a context of length " + std::to_string(context.size())),
      context_(std::move(context)) {}

void write_target_requests(std::ostream& out, std::span<const TokenSequence> contexts) {
  for (const auto& c : contexts) out << json{{"context", c}}.dump() << '\n';
}

std::vector<TokenSequence> read_target_requests(std::istream& in) {
  std::vector<TokenSequence> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line).at("context").get<TokenSequence>());
    } catch (const json::exception& e) {
      throw InputError("request line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_target_responses(std::ostream& out, const TargetModel& target, std::span<const TokenSequence> contexts) {
  for (const auto& c : contexts) {
    const auto dist = target.next(c);
    nlohmann::ordered_json line;
    line["context"] = c;
    line["argmax"] = greedy_next(target, c);
    auto rows = nlohmann::ordered_json::array();
    for (const auto& [t, p] : dist) rows.push_back({t, p});
    line["distribution"] = std::move(rows);
    out << line.dump() << '\n';
  }
}

ReplayTarget::ReplayTarget(std::istream& responses, std::size_t vocab_size) : vocab_size_(vocab_size) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(responses, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto rec = json::parse(line);
      auto ctx = rec.at("context").get<TokenSequence>();
      const auto top = rec.at("argmax").get<TokenId>();
      TokenDistribution dist;
      if (auto it = rec.find("distribution"); it != rec.end()) {
        for (const auto& row : *it) dist.emplace_back(row.at(0).get<TokenId>(), row.at(1).get<double>());
        std::sort(dist.begin(), dist.end());
        if (dist.empty() || argmax(dist) != top) {
          throw InputError("response line " + std::to_string(lineno) + ": argmax disagrees with distribution");
        }
      } else {
        dist = {{top, 1.0}};
      }
      table_[std::move(ctx)] = std::move(dist);
    } catch (const json::exception& e) {
      throw InputError("response line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

ReplayTarget ReplayTarget::from_file(const std::filesystem::path& path, std::size_t vocab_size) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read target responses '" + path.string() + "'");
  return ReplayTarget(in, vocab_size);
}

TokenDistribution ReplayTarget::next(std::span<const TokenId> context) const {
  auto it = table_.find(TokenSequence(context.begin(), context.end()));
  if (it == table_.end()) throw MissingContextError(TokenSequence(context.begin(), context.end()));
  return it->second;
}

}  // namespace tasc
