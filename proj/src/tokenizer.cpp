// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#include "tokengraph/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <span>

#include "tokengraph/error.hpp"

namespace tokengraph {
namespace {

struct CodeRange {
  char32_t first;
  char32_t last;
};
struct CasePair {
  char32_t upper;
  char32_t lower;
};

#include "unicode_tables.inc"

bool in_ranges(std::span<const CodeRange> table, char32_t cp) {
  auto it = std::upper_bound(table.begin(), table.end(), cp,
                             [](char32_t c, const CodeRange& r) { return c < r.first; });
  return it != table.begin() && cp <= std::prev(it)->last;
}

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  }
  const auto* end = std::end(kLowercase);
  auto it = std::lower_bound(std::begin(kLowercase), end, cp,
                             [](const CasePair& p, char32_t c) { return p.upper < c; });
  return (it != end && it->upper == cp) ? it->lower : cp;
}

// Invalid UTF-8 bytes decode to U+FFFD, which is then dropped like a control character.
std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    int len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 >> 5) == 0x6) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 >> 4) == 0xE) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 >> 3) == 0x1E) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len > 0 && i + len <= s.size();
    for (int k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      ok = (b >> 6) == 0x2;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode_utf8(std::span<const char32_t> cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

}  // namespace

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty()) throw ValidationError("vocabulary is empty");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    auto [it, inserted] = index_.emplace(tokens_[i], static_cast<TokenId>(i));
    if (!inserted) {
      throw ValidationError("duplicate vocabulary token '" + tokens_[i] + "' at lines " +
                            std::to_string(it->second + 1) + " and " + std::to_string(i + 1));
    }
  }
  auto unk = find(kUnk);
  if (!unk) throw ValidationError("vocabulary lacks the required [UNK] token");
  unk_ = *unk;
  cls_ = find(kCls);
  sep_ = find(kSep);
  pad_ = find(kPad);
}

std::optional<TokenId> Vocab::find(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocab::cls_id() const {
  if (!cls_) throw ValidationError("vocabulary lacks [CLS]");
  return *cls_;
}

TokenId Vocab::sep_id() const {
  if (!sep_) throw ValidationError("vocabulary lacks [SEP]");
  return *sep_;
}

Vocab load_vocab(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open vocabulary file " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(std::move(line));
  }
  return Vocab(std::move(tokens));
}

std::vector<TokenId> TokenSequence::ids() const {
  std::vector<TokenId> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.id);
  return out;
}

std::vector<std::string> basic_tokenize(std::string_view text) {
  std::vector<std::string> words;
  std::vector<char32_t> current;
  auto flush = [&] {
    if (!current.empty()) {
      words.push_back(encode_utf8(current));
      current.clear();
    }
  };
  for (char32_t cp : decode_utf8(text)) {
    if (cp == 0 || cp == 0xFFFD || in_ranges(kControl, cp)) continue;
    if (in_ranges(kWhitespace, cp)) {
      flush();
    } else if (in_ranges(kPunctuation, cp)) {
      flush();
      const char32_t lone[] = {cp};
      words.push_back(encode_utf8(lone));
    } else {
      current.push_back(to_lower(cp));
    }
  }
  flush();
  return words;
}

std::vector<Token> wordpiece(std::string_view word, const Vocab& vocab, std::size_t max_chars) {
  const std::vector<char32_t> chars = decode_utf8(word);
  const Token unk{vocab.unk_id(), std::string(Vocab::kUnk)};
  if (chars.size() > max_chars) return {unk};

  std::vector<Token> pieces;
  std::size_t start = 0;
  while (start < chars.size()) {
    std::optional<Token> match;
    for (std::size_t end = chars.size(); end > start; --end) {
      std::string candidate = start > 0 ? "##" : "";
      candidate += encode_utf8(std::span(chars).subspan(start, end - start));
      if (auto id = vocab.find(candidate)) {
        match = Token{*id, std::move(candidate)};
        start = end;
        break;
      }
    }
    if (!match) return {unk};
    pieces.push_back(std::move(*match));
  }
  return pieces;
}

TokenSequence tokenize(std::string_view text, const Vocab& vocab, const TokenizeOptions& options) {
  TokenSequence seq;
  seq.sample_id = options.sample_id;
  seq.includes_special = options.add_special;

  const std::size_t reserved = options.add_special ? 2 : 0;
  if (options.max_len < std::max<std::size_t>(reserved, 1)) {
    throw ValidationError("max_len " + std::to_string(options.max_len) + " is too small");
  }
  const std::size_t budget = options.max_len - reserved;

  if (options.add_special) seq.tokens.push_back({vocab.cls_id(), std::string(Vocab::kCls)});
  std::size_t body = 0;
  for (const auto& word : basic_tokenize(text)) {
    for (auto& piece : wordpiece(word, vocab)) {
      if (body == budget) break;
      seq.tokens.push_back(std::move(piece));
      ++body;
    }
    if (body == budget) break;
  }
  if (options.add_special) seq.tokens.push_back({vocab.sep_id(), std::string(Vocab::kSep)});

  if (seq.tokens.empty()) {
    throw ValidationError("text produced no tokens; a graph needs at least one node");
  }
  return seq;
}

}  // namespace tokengraph
