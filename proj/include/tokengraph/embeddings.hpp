// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#pragma once

// Precomputed per-token embeddings and the files that carry them.
//
// Shard layout, little-endian throughout:
//
//   "TGEB" | version u32 (=1) | record count u64
//   per record:
//     sample_id u64 | token_count u32 | dim u32
//     token_ids u32 x token_count
//     values f32 x (token_count * dim), row-major
//
// The manifest is JSON-lines: a header object carrying label_names, followed
// by one {"id", "label", "n_tokens"} object per sample.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tokengraph/tokenizer.hpp"

namespace tokengraph {

using FloatMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr char kShardMagic[4] = {'T', 'G', 'E', 'B'};
inline constexpr std::uint32_t kShardVersion = 1;
inline constexpr std::size_t kShardHeaderBytes = 16;

struct ShardRecord {
  SampleId sample_id = 0;
  std::vector<TokenId> token_ids;
  FloatMatrix values;  // token_ids.size() x dim

  std::size_t dim() const { return static_cast<std::size_t>(values.cols()); }
};

/// Bitwise equality, so NaN payloads and signed zeros count.
bool bitwise_equal(const ShardRecord& a, const ShardRecord& b);

class EmbeddingShard {
 public:
  EmbeddingShard() = default;

  /// Throws ShapeError for dim 0 or inconsistent dims, ValidationError for
  /// duplicate sample ids.
  void add(ShardRecord record);

  const std::vector<ShardRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  /// Width shared by all records; 0 for an empty shard.
  std::size_t dim() const { return records_.empty() ? 0 : records_.front().dim(); }
  const ShardRecord* find(SampleId id) const;

  friend bool operator==(const EmbeddingShard& a, const EmbeddingShard& b);

 private:
  std::vector<ShardRecord> records_;
  std::unordered_map<SampleId, std::size_t> index_;
};

/// Exact file size write_shard produces for the given record shapes.
std::size_t shard_file_size(const EmbeddingShard& shard);

/// Rejects non-finite values. Output bytes depend only on the shard contents.
void write_shard(const EmbeddingShard& shard, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_shard(const EmbeddingShard& shard);

/// Throws ValidationError if the file is missing and FormatError for bad
/// magic, unsupported versions, truncation or trailing bytes.
EmbeddingShard read_shard(const std::filesystem::path& path);
EmbeddingShard decode_shard(std::span<const std::uint8_t> bytes);

struct ManifestEntry {
  SampleId id = 0;
  std::string label;
  std::size_t n_tokens = 0;
  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::vector<std::string> label_names;
  std::vector<ManifestEntry> entries;
  bool includes_special = true;
  std::string source;  // free-form origin of the vectors, e.g. "fallback" or a checkpoint name

  /// Index into label_names; throws ValidationError for unknown labels.
  int label_index(const std::string& label) const;
  /// Checks id uniqueness and label membership.
  void validate() const;
  bool operator==(const Manifest&) const = default;
};

void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

/// Every manifest entry must have a shard record with matching token count.
void check_consistency(const Manifest& manifest, const EmbeddingShard& shard);

/// Static stand-in for contextual embeddings: row i depends only on
/// (seed, token_ids[i], dim). Rows are standard-normal draws from a SplitMix64
/// stream seeded with seed ^ token_id, Box-Muller transformed in double
/// precision, L2-normalized and stored as float.
FloatMatrix fallback_embed(std::span<const TokenId> token_ids, std::size_t dim, std::uint64_t seed);
FloatMatrix fallback_embed(const TokenSequence& seq, std::size_t dim, std::uint64_t seed);

}  // namespace tokengraph
