// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#pragma once

// Lowercased WordPiece tokenization driven by a plain vocab.txt file.
//
// Basic tokenization lowercases, splits on whitespace and isolates every
// punctuation character. Accent stripping and CJK character splitting are not
// performed, so non-English text can diverge from reference BERT tokenizers.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tokengraph {

using TokenId = std::uint32_t;
using SampleId = std::uint64_t;

class Vocab {
 public:
  static constexpr std::string_view kUnk = "[UNK]";
  static constexpr std::string_view kCls = "[CLS]";
  static constexpr std::string_view kSep = "[SEP]";
  static constexpr std::string_view kPad = "[PAD]";

  /// Builds a vocabulary where tokens[i] has id i.
  /// Throws ValidationError on duplicates, a missing [UNK] or an empty list.
  explicit Vocab(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  std::optional<TokenId> find(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  bool contains(TokenId id) const { return id < tokens_.size(); }

  TokenId unk_id() const { return unk_; }
  /// [CLS]/[SEP]/[PAD] are optional in the file; accessing a missing one throws.
  TokenId cls_id() const;
  TokenId sep_id() const;
  std::optional<TokenId> pad_id() const { return pad_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId, Hash, std::equal_to<>> index_;
  TokenId unk_ = 0;
  std::optional<TokenId> cls_, sep_, pad_;
};

Vocab load_vocab(const std::filesystem::path& path);

struct Token {
  TokenId id;
  std::string surface;
  bool operator==(const Token&) const = default;
};

struct TokenSequence {
  SampleId sample_id = 0;
  std::vector<Token> tokens;
  bool includes_special = false;

  std::size_t size() const { return tokens.size(); }
  std::vector<TokenId> ids() const;
  bool operator==(const TokenSequence&) const = default;
};

std::vector<std::string> basic_tokenize(std::string_view text);

inline constexpr std::size_t kDefaultMaxWordChars = 100;
inline constexpr std::size_t kDefaultMaxLen = 512;

/// Greedy longest-match-first split of one lowercased word. Any unmatched
/// position, or a word longer than max_chars code points, yields a lone [UNK].
std::vector<Token> wordpiece(std::string_view word, const Vocab& vocab,
                             std::size_t max_chars = kDefaultMaxWordChars);

struct TokenizeOptions {
  bool add_special = true;
  std::size_t max_len = kDefaultMaxLen;
  SampleId sample_id = 0;
};

/// Throws ValidationError when the result would be empty (empty text without
/// special tokens) or when max_len cannot hold [CLS] and [SEP].
TokenSequence tokenize(std::string_view text, const Vocab& vocab, const TokenizeOptions& options = {});

}  // namespace tokengraph
