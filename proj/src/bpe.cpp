#include "tasc/bpe.hpp"

#include <array>
#include <fstream>
#include <map>
#include <unordered_map>

#include "json.hpp"

namespace tasc::bpe {

namespace {

std::string utf8(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

struct AliasTables {
  std::array<std::string, 256> forward;
  std::unordered_map<char32_t, unsigned char> inverse;

  AliasTables() {
    std::array<bool, 256> printable{};
    auto mark = [&](int lo, int hi) {
      for (int b = lo; b <= hi; ++b) printable[b] = true;
    };
    mark('!', '~');
    mark(0xA1, 0xAC);
    mark(0xAE, 0xFF);
    char32_t next = 256;
    for (int b = 0; b < 256; ++b) {
      const char32_t cp = printable[b] ? static_cast<char32_t>(b) : next++;
      forward[b] = utf8(cp);
      inverse[cp] = static_cast<unsigned char>(b);
    }
  }
};

const AliasTables& tables() {
  static const AliasTables t;
  return t;
}

enum class CharClass { Space, Letter, Digit, Other };

CharClass classify(unsigned char c) {
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') return CharClass::Space;
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80) return CharClass::Letter;
  if (c >= '0' && c <= '9') return CharClass::Digit;
  return CharClass::Other;
}

}  // namespace

const std::string& byte_alias(unsigned char byte) { return tables().forward[byte]; }

std::string unalias(std::string_view token) {
  const auto& inv = tables().inverse;
  std::string out;
  std::size_t i = 0;
  while (i < token.size()) {
    const auto c = static_cast<unsigned char>(token[i]);
    char32_t cp;
    std::size_t len;
    if (c < 0x80) {
      cp = c;
      len = 1;
    } else if ((c & 0xE0) == 0xC0 && i + 1 < token.size()) {
      cp = ((c & 0x1F) << 6) | (static_cast<unsigned char>(token[i + 1]) & 0x3F);
      len = 2;
    } else if ((c & 0xF0) == 0xE0 && i + 2 < token.size()) {
      cp = ((c & 0x0F) << 12) | ((static_cast<unsigned char>(token[i + 1]) & 0x3F) << 6) |
           (static_cast<unsigned char>(token[i + 2]) & 0x3F);
      len = 3;
    } else {
      throw InputError("invalid UTF-8 in byte-level BPE token");
    }
    auto it = inv.find(cp);
    if (it == inv.end()) throw InputError("codepoint in BPE token is not a byte alias");
    out += static_cast<char>(it->second);
    i += len;
  }
  return out;
}

std::vector<std::string_view> split_pieces(std::string_view text) {
  std::vector<std::string_view> pieces;
  const std::size_t n = text.size();
  std::size_t i = 0;
  auto run_end = [&](std::size_t from) {
    const CharClass cls = classify(static_cast<unsigned char>(text[from]));
    std::size_t j = from + 1;
    while (j < n && classify(static_cast<unsigned char>(text[j])) == cls) ++j;
    return j;
  };
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c == ' ' && i + 1 < n && classify(static_cast<unsigned char>(text[i + 1])) != CharClass::Space) {
      const std::size_t j = run_end(i + 1);
      pieces.push_back(text.substr(i, j - i));
      i = j;
    } else if (classify(c) != CharClass::Space) {
      const std::size_t j = run_end(i);
      pieces.push_back(text.substr(i, j - i));
      i = j;
    } else {
      std::size_t j = i;
      while (j < n && classify(static_cast<unsigned char>(text[j])) == CharClass::Space) ++j;
      if (j < n && j - i > 1) --j;  // leave the last whitespace char for the next word
      pieces.push_back(text.substr(i, j - i));
      i = j;
    }
  }
  return pieces;
}

Vocabulary load(const std::filesystem::path& vocab_json, const std::filesystem::path& merges_txt,
                bool byte_level) {
  std::ifstream vin(vocab_json, std::ios::binary);
  if (!vin) throw InputError("cannot read BPE vocab '" + vocab_json.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(vin);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed BPE vocab: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw InputError("BPE vocab must be a JSON object of token -> id");

  std::vector<std::string> tokens(doc.size());
  std::vector<bool> seen(doc.size(), false);
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_number_unsigned()) throw InputError("BPE vocab id for '" + it.key() + "' is not a non-negative integer");
    const auto id = it.value().get<std::size_t>();
    if (id >= tokens.size() || seen[id]) throw InputError("BPE vocab ids must be unique and contiguous from 0");
    seen[id] = true;
    tokens[id] = byte_level ? unalias(it.key()) : it.key();
  }

  std::unordered_map<std::string, TokenId> index;
  for (TokenId id = 0; id < tokens.size(); ++id) index.emplace(tokens[id], id);

  std::ifstream min(merges_txt, std::ios::binary);
  if (!min) throw InputError("cannot read BPE merges '" + merges_txt.string() + "'");
  std::vector<std::pair<TokenId, TokenId>> merges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(min, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("#version", 0) == 0) continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos || sp == 0 || sp + 1 >= line.size()) {
      throw InputError("merges line " + std::to_string(lineno) + ": expected 'left right'");
    }
    std::string left = line.substr(0, sp);
    std::string right = line.substr(sp + 1);
    if (byte_level) {
      left = unalias(left);
      right = unalias(right);
    }
    auto l = index.find(left);
    auto r = index.find(right);
    if (l == index.end() || r == index.end() || !index.contains(left + right)) {
      throw InputError("merges line " + std::to_string(lineno) + ": rule refers to unknown tokens");
    }
    merges.emplace_back(l->second, r->second);
  }
  return Vocabulary::bpe(std::move(tokens), std::move(merges));
}

}  // namespace tasc::bpe
