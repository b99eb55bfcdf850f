#include "tasc/vocab_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tasc {

using nlohmann::ordered_json;

namespace {

constexpr std::string_view kFormat = "tasc-vocab.v1";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string escape_bytes(std::string_view raw) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(raw.size());
  for (char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (c == '\\') {
      out += "\\\\";
    } else if (c >= 0x20 && c <= 0x7e) {
      out += ch;
    } else {
      out += "\\x";
      out += kHex[c >> 4];
      out += kHex[c & 0xf];
    }
  }
  return out;
}

std::string unescape_bytes(std::string_view escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    if (escaped[i] != '\\') {
      out += escaped[i];
      continue;
    }
    if (i + 1 < escaped.size() && escaped[i + 1] == '\\') {
      out += '\\';
      ++i;
      continue;
    }
    if (i + 3 < escaped.size() && escaped[i + 1] == 'x') {
      const int hi = hex_value(escaped[i + 2]);
      const int lo = hex_value(escaped[i + 3]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>((hi << 4) | lo);
        i += 3;
        continue;
      }
    }
    throw InputError("bad escape sequence in token string");
  }
  return out;
}

std::string write_vocabulary(const Vocabulary& vocab) {
  ordered_json doc;
  doc["format"] = kFormat;
  doc["scheme"] = to_string(vocab.scheme());
  auto base = ordered_json::array();
  for (const auto& s : vocab.base_tokens()) base.push_back(escape_bytes(s));
  doc["base_tokens"] = std::move(base);
  auto merges = ordered_json::array();
  for (const auto& [a, b] : vocab.merges()) merges.push_back({a, b});
  doc["merges"] = std::move(merges);
  auto added = ordered_json::array();
  for (const auto& t : vocab.added_tokens()) {
    ordered_json entry;
    entry["constituents"] = t.constituents;
    entry["string"] = escape_bytes(t.string);
    added.push_back(std::move(entry));
  }
  doc["added_tokens"] = std::move(added);
  return doc.dump(1) + "\n";
}

Vocabulary read_vocabulary(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw InputError(std::string("malformed vocabulary file: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormat) throw InputError("vocabulary file is not tasc-vocab.v1");
    const BaseScheme scheme = parse_base_scheme(doc.at("scheme").get<std::string>());
    std::vector<std::string> base;
    for (const auto& s : doc.at("base_tokens")) base.push_back(unescape_bytes(s.get<std::string>()));

    Vocabulary vocab = Vocabulary::bytes();
    if (scheme == BaseScheme::Bpe) {
      std::vector<std::pair<TokenId, TokenId>> merges;
      for (const auto& m : doc.at("merges")) merges.emplace_back(m.at(0).get<TokenId>(), m.at(1).get<TokenId>());
      vocab = Vocabulary::bpe(std::move(base), std::move(merges));
    } else {
      const Vocabulary bytes = Vocabulary::bytes();
      if (base.size() < 256 || !std::equal(bytes.base_tokens().begin(), bytes.base_tokens().end(), base.begin())) {
        throw InputError("byte-complete vocabularies must start with the 256 byte tokens");
      }
      if (scheme == BaseScheme::Words) {
        vocab = Vocabulary::words_from_pieces(std::vector<std::string>(base.begin() + 256, base.end()));
        if (vocab.base_size() != base.size()) throw InputError("word pieces must be longer than one byte");
      } else if (base.size() != 256) {
        throw InputError("byte vocabulary must have exactly 256 base tokens");
      }
    }
    for (const auto& entry : doc.at("added_tokens")) {
      const TokenId id = vocab.add_token(entry.at("constituents").get<TokenSequence>());
      if (vocab.token_string(id) != unescape_bytes(entry.at("string").get<std::string>())) {
        throw InputError("added token " + std::to_string(id) + " string does not match its constituents");
      }
    }
    return vocab;
  } catch (const ordered_json::exception& e) {
    throw InputError(std::string("invalid vocabulary file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("invalid vocabulary file: ") + e.what());
  }
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write vocabulary file '" + path.string() + "'");
  out << write_vocabulary(vocab);
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read vocabulary file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_vocabulary(ss.str());
}

}  // namespace tasc
