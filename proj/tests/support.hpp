#pragma once

// Random generators and slow reference implementations shared by the unit
// tests and the acceptance runner. Nothing here calls into the code it is
// used to check, apart from reading Vocabulary token strings.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "tasc/specdec.hpp"
#include "tasc/vocabulary.hpp"

namespace tasc::testing {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline TokenSequence random_sequence(Rng& rng, std::size_t len, std::size_t alphabet) {
  TokenSequence s(len);
  for (auto& t : s) t = static_cast<TokenId>(uniform(rng, 0, alphabet - 1));
  return s;
}

inline std::vector<TokenSequence> random_sequences(Rng& rng, std::size_t count, std::size_t max_len,
                                                   std::size_t alphabet, std::size_t min_len = 0) {
  std::vector<TokenSequence> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_sequence(rng, uniform(rng, min_len, max_len), alphabet));
  return out;
}

inline std::string random_bytes(Rng& rng, std::size_t len) {
  std::string s(len, '\0');
  for (auto& c : s) c = static_cast<char>(uniform(rng, 0, 255));
  return s;
}

inline std::string random_text(Rng& rng, std::size_t words, const std::vector<std::string>& lexicon) {
  std::string s;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) s += ' ';
    s += lexicon[uniform(rng, 0, lexicon.size() - 1)];
  }
  return s;
}

/// Texts built from a Zipf-weighted pool of fixed phrases.
inline std::vector<std::string> zipf_phrase_corpus(Rng& rng, std::size_t docs, std::size_t phrases_per_doc) {
  const std::vector<std::string> pool = {
      "the commission shall",  "in accordance with article", "of the european union", "member states shall",
      "this regulation",       "shall enter into force",     "on the day following",  "its publication",
      "the official journal",  "having regard to",           "the council",           "whereas",
      "annex i",               "the provisions of",          "directive",             "customs tariff",
  };
  std::vector<double> w;
  for (std::size_t i = 0; i < pool.size(); ++i) w.push_back(1.0 / static_cast<double>(i + 1));
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  std::vector<std::string> out;
  for (std::size_t d = 0; d < docs; ++d) {
    std::string s;
    for (std::size_t p = 0; p < phrases_per_doc; ++p) {
      if (p) s += ' ';
      s += pool[pick(rng)];
    }
    out.push_back(std::move(s));
  }
  return out;
}

// ---- counting -------------------------------------------------------------

inline std::map<TokenSequence, std::uint64_t> brute_count(const std::vector<TokenSequence>& seqs, std::size_t n) {
  std::map<TokenSequence, std::uint64_t> out;
  for (const auto& s : seqs) {
    if (s.size() < n) continue;
    for (std::size_t i = 0; i + n <= s.size(); ++i) {
      TokenSequence w;
      for (std::size_t j = 0; j < n; ++j) w.push_back(s[i + j]);
      ++out[w];
    }
  }
  return out;
}

// ---- enrichment -----------------------------------------------------------

/// Replace non-overlapping occurrences of `pat`, scanning from the left.
inline TokenSequence brute_replace(const TokenSequence& s, const TokenSequence& pat, TokenId id) {
  TokenSequence out;
  std::size_t i = 0;
  while (i < s.size()) {
    bool hit = i + pat.size() <= s.size();
    for (std::size_t j = 0; hit && j < pat.size(); ++j) hit = s[i + j] == pat[j];
    if (hit) {
      out.push_back(id);
      i += pat.size();
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

struct BruteMerge {
  TokenSequence ngram;
  std::uint64_t freq;
  double pcs;
  bool accepted;
};

/// Literal greedy enrichment: recount every iteration, scan every candidate,
/// recompute PCS from token strings.
inline std::vector<BruteMerge> brute_enrich(std::vector<TokenSequence> seqs, std::vector<std::string> strings,
                                            std::size_t budget, std::size_t n_max, double threshold) {
  std::vector<BruteMerge> log;
  std::set<TokenSequence> used;
  std::size_t added = 0;
  while (added < budget) {
    bool found = false;
    TokenSequence best;
    std::uint64_t best_freq = 0;
    std::uint64_t best_reward = 0;
    for (std::size_t n = 2; n <= n_max; ++n) {
      for (const auto& [g, f] : brute_count(seqs, n)) {
        if (used.count(g)) continue;
        const std::uint64_t r = f * (n - 1);
        bool better = !found || r > best_reward ||
                      (r == best_reward && (g.size() > best.size() || (g.size() == best.size() && g < best)));
        if (better) {
          found = true;
          best = g;
          best_freq = f;
          best_reward = r;
        }
      }
    }
    if (!found) break;
    used.insert(best);

    const std::string& s = strings[best.back()];
    std::uint64_t num = 0;
    std::uint64_t den = 0;
    for (const auto& [g, f] : brute_count(seqs, 1)) {
      const std::string& t = strings[g[0]];
      if (t.compare(0, s.size(), s) != 0) continue;
      den += f;
      if (g[0] != best.back() && t.size() > s.size()) num += f;
    }
    const double pcs = den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    const bool ok = pcs < threshold;
    log.push_back({best, best_freq, pcs, ok});
    if (!ok) continue;
    const TokenId id = static_cast<TokenId>(strings.size());
    std::string joined;
    for (TokenId t : best) joined += strings[t];
    strings.push_back(joined);
    for (auto& q : seqs) q = brute_replace(q, best, id);
    ++added;
  }
  return log;
}

/// Every way to write `seq` as a concatenation of token expansions, where
/// `expand[id]` is the base sequence an id stands for.
inline void enumerate_segmentations(const TokenSequence& seq, const std::vector<TokenSequence>& expand,
                                    std::size_t pos, TokenSequence& cur, std::vector<TokenSequence>& out) {
  if (pos == seq.size()) {
    out.push_back(cur);
    return;
  }
  for (std::size_t id = 0; id < expand.size(); ++id) {
    const auto& e = expand[id];
    if (e.empty() || pos + e.size() > seq.size()) continue;
    if (!std::equal(e.begin(), e.end(), seq.begin() + static_cast<std::ptrdiff_t>(pos))) continue;
    cur.push_back(static_cast<TokenId>(id));
    enumerate_segmentations(seq, expand, pos + e.size(), cur, out);
    cur.pop_back();
  }
}

// ---- rank statistics ------------------------------------------------------

struct PairCount {
  double tau;
  long concordant;
  long discordant;
};

inline PairCount brute_kendall(const std::vector<double>& x, const std::vector<double>& y) {
  long c = 0, d = 0, tx = 0, ty = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = x[i] - x[j];
      const double b = y[i] - y[j];
      if (a == 0 && b == 0) continue;
      if (a == 0) {
        ++tx;
      } else if (b == 0) {
        ++ty;
      } else if ((a > 0) == (b > 0)) {
        ++c;
      } else {
        ++d;
      }
    }
  }
  const double den = std::sqrt(static_cast<double>(c + d + tx) * static_cast<double>(c + d + ty));
  return {den == 0 ? NAN : static_cast<double>(c - d) / den, c, d};
}

/// Two-sided exact p-value of Kendall's S by enumerating every permutation.
inline double brute_kendall_p(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  auto s_of = [&](const std::vector<double>& yy) {
    long s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += ((x[i] - x[j]) * (yy[i] - yy[j]) > 0) ? 1 : -1;
    return s;
  };
  const long obs = std::labs(s_of(y));
  std::vector<double> perm = y;
  std::sort(perm.begin(), perm.end());
  long hits = 0, total = 0;
  do {
    ++total;
    if (std::labs(s_of(perm)) >= obs) ++hits;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

// ---- decoding -------------------------------------------------------------

inline TokenSequence brute_greedy(const TargetModel& target, const TokenSequence& prompt, std::size_t max_tokens,
                                  std::optional<TokenId> stop = std::nullopt) {
  TokenSequence ctx = prompt;
  TokenSequence out;
  while (out.size() < max_tokens) {
    const auto dist = target.next(ctx);
    TokenId best = dist.front().first;
    double bp = dist.front().second;
    for (const auto& [t, p] : dist) {
      if (p > bp || (p == bp && t < best)) {
        best = t;
        bp = p;
      }
    }
    out.push_back(best);
    ctx.push_back(best);
    if (stop && best == *stop) break;
  }
  return out;
}

// ---- files ----------------------------------------------------------------

class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("tasc-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path file(const std::string& name) const { return path_ / name; }
  std::filesystem::path write(const std::string& name, const std::string& content) const {
    std::ofstream(path_ / name, std::ios::binary) << content;
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace tasc::testing
