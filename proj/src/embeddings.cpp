// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#include "tokengraph/embeddings.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "byte_io.hpp"
#include "tokengraph/error.hpp"
#include "tokengraph/rng.hpp"

namespace tokengraph {

using nlohmann::json;

bool bitwise_equal(const ShardRecord& a, const ShardRecord& b) {
  return a.sample_id == b.sample_id && a.token_ids == b.token_ids && a.values.rows() == b.values.rows() &&
         a.values.cols() == b.values.cols() &&
         std::memcmp(a.values.data(), b.values.data(), sizeof(float) * a.values.size()) == 0;
}

void EmbeddingShard::add(ShardRecord record) {
  if (record.values.cols() == 0) {
    throw ShapeError("shard record " + std::to_string(record.sample_id) + " has dim 0");
  }
  if (static_cast<std::size_t>(record.values.rows()) != record.token_ids.size()) {
    throw ShapeError("shard record " + std::to_string(record.sample_id) + " has " +
                     std::to_string(record.token_ids.size()) + " tokens but " +
                     std::to_string(record.values.rows()) + " rows");
  }
  if (!records_.empty() && record.dim() != dim()) {
    throw ShapeError("shard record " + std::to_string(record.sample_id) + " has dim " +
                     std::to_string(record.dim()) + ", shard dim is " + std::to_string(dim()));
  }
  if (find(record.sample_id) != nullptr) {
    throw ValidationError("duplicate sample id " + std::to_string(record.sample_id) + " in shard");
  }
  index_.emplace(record.sample_id, records_.size());
  records_.push_back(std::move(record));
}

const ShardRecord* EmbeddingShard::find(SampleId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

bool operator==(const EmbeddingShard& a, const EmbeddingShard& b) {
  if (a.records_.size() != b.records_.size()) return false;
  for (std::size_t i = 0; i < a.records_.size(); ++i) {
    if (!bitwise_equal(a.records_[i], b.records_[i])) return false;
  }
  return true;
}

std::size_t shard_file_size(const EmbeddingShard& shard) {
  std::size_t total = kShardHeaderBytes;
  for (const auto& r : shard.records()) {
    total += 8 + 4 + 4 + 4 * r.token_ids.size() + 4 * static_cast<std::size_t>(r.values.size());
  }
  return total;
}

std::vector<std::uint8_t> encode_shard(const EmbeddingShard& shard) {
  detail::ByteWriter w;
  w.reserve(shard_file_size(shard));
  w.put_raw(kShardMagic, 4);
  w.put<std::uint32_t>(kShardVersion);
  w.put<std::uint64_t>(shard.size());
  for (const auto& r : shard.records()) {
    if (!r.values.allFinite()) {
      throw ValidationError("shard record " + std::to_string(r.sample_id) + " contains non-finite values");
    }
    w.put<std::uint64_t>(r.sample_id);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(r.token_ids.size()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(r.dim()));
    w.put_all(std::span<const TokenId>(r.token_ids));
    w.put_all(std::span<const float>(r.values.data(), static_cast<std::size_t>(r.values.size())));
  }
  return std::move(w.bytes());
}

void write_shard(const EmbeddingShard& shard, const std::filesystem::path& path) {
  const auto bytes = encode_shard(shard);
  detail::write_file_bytes(path, bytes);
}

EmbeddingShard decode_shard(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "embedding shard");
  const std::uint8_t* magic = r.take(4, "magic");
  if (std::memcmp(magic, kShardMagic, 4) != 0) {
    throw FormatError("embedding shard: bad magic (expected \"TGEB\")");
  }
  const auto version = r.get<std::uint32_t>("version");
  if (version != kShardVersion) {
    throw FormatError("embedding shard: unsupported version " + std::to_string(version));
  }
  const auto count = r.get<std::uint64_t>("record count");
  EmbeddingShard shard;
  for (std::uint64_t i = 0; i < count; ++i) {
    ShardRecord rec;
    rec.sample_id = r.get<std::uint64_t>("sample_id");
    const auto n = r.get<std::uint32_t>("token_count");
    const auto dim = r.get<std::uint32_t>("dim");
    // Bound the allocation by what the file can actually hold.
    const std::uint64_t need = 4ULL * n + 4ULL * n * dim;
    if (need > r.remaining()) {
      throw FormatError("embedding shard: truncated in record " + std::to_string(i) + " (sample " +
                        std::to_string(rec.sample_id) + ")");
    }
    rec.token_ids.resize(n);
    r.get_all(std::span<TokenId>(rec.token_ids), "token_ids");
    rec.values.resize(n, dim);
    r.get_all(std::span<float>(rec.values.data(), static_cast<std::size_t>(rec.values.size())), "values");
    try {
      shard.add(std::move(rec));
    } catch (const ValidationError& e) {
      throw FormatError(std::string("embedding shard: ") + e.what());
    }
  }
  if (r.remaining() != 0) {
    throw FormatError("embedding shard: " + std::to_string(r.remaining()) + " trailing bytes");
  }
  return shard;
}

EmbeddingShard read_shard(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path, "embedding shard");
  return decode_shard(bytes);
}

int Manifest::label_index(const std::string& label) const {
  for (std::size_t i = 0; i < label_names.size(); ++i) {
    if (label_names[i] == label) return static_cast<int>(i);
  }
  throw ValidationError("label '" + label + "' is not in the manifest label_names");
}

void Manifest::validate() const {
  if (label_names.empty()) throw ValidationError("manifest has no label_names");
  std::set<std::string> names(label_names.begin(), label_names.end());
  if (names.size() != label_names.size()) throw ValidationError("manifest label_names contain duplicates");
  std::unordered_set<SampleId> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.id).second) throw ValidationError("duplicate manifest id " + std::to_string(e.id));
    if (!names.contains(e.label)) {
      throw ValidationError("manifest id " + std::to_string(e.id) + " has unknown label '" + e.label + "'");
    }
  }
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  manifest.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  json header = {{"label_names", manifest.label_names},
                 {"includes_special", manifest.includes_special},
                 {"source", manifest.source}};
  out << header.dump() << '\n';
  for (const auto& e : manifest.entries) {
    out << json{{"id", e.id}, {"label", e.label}, {"n_tokens", e.n_tokens}}.dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open manifest " + path.string());
  Manifest m;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError("manifest line " + std::to_string(lineno) + ": " + e.what());
    }
    try {
      if (obj.contains("label_names")) {
        if (have_header) throw FormatError("manifest has more than one header line");
        have_header = true;
        m.label_names = obj.at("label_names").get<std::vector<std::string>>();
        m.includes_special = obj.value("includes_special", true);
        m.source = obj.value("source", std::string());
      } else {
        m.entries.push_back({obj.at("id").get<SampleId>(), obj.at("label").get<std::string>(),
                             obj.at("n_tokens").get<std::size_t>()});
      }
    } catch (const json::exception& e) {
      throw FormatError("manifest line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw FormatError("manifest " + path.string() + " lacks a label_names header line");
  m.validate();
  return m;
}

void check_consistency(const Manifest& manifest, const EmbeddingShard& shard) {
  std::unordered_map<SampleId, const ShardRecord*> index;
  index.reserve(shard.size());
  for (const auto& r : shard.records()) index.emplace(r.sample_id, &r);
  for (const auto& e : manifest.entries) {
    auto it = index.find(e.id);
    if (it == index.end()) {
      throw ValidationError("manifest id " + std::to_string(e.id) + " has no shard record");
    }
    if (it->second->token_ids.size() != e.n_tokens) {
      throw ValidationError("manifest id " + std::to_string(e.id) + " lists " + std::to_string(e.n_tokens) +
                            " tokens, shard has " + std::to_string(it->second->token_ids.size()));
    }
  }
}

FloatMatrix fallback_embed(std::span<const TokenId> token_ids, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw ValidationError("fallback_embed: dim must be >= 1");
  FloatMatrix out(static_cast<Eigen::Index>(token_ids.size()), static_cast<Eigen::Index>(dim));
  std::vector<double> row(dim);
  for (std::size_t i = 0; i < token_ids.size(); ++i) {
    std::uint64_t state = seed ^ static_cast<std::uint64_t>(token_ids[i]);
    for (std::size_t k = 0; k < dim; k += 2) {
      const double u1 = 1.0 - unit_double(splitmix64(state));  // (0, 1]
      const double u2 = unit_double(splitmix64(state));
      const double radius = std::sqrt(-2.0 * std::log(u1));
      const double angle = 2.0 * std::numbers::pi * u2;
      row[k] = radius * std::cos(angle);
      if (k + 1 < dim) row[k + 1] = radius * std::sin(angle);
    }
    double norm_sq = 0.0;
    for (double v : row) norm_sq += v * v;
    // A zero vector needs every draw to hit radius 0; treat it as the first basis vector.
    const double norm = std::sqrt(norm_sq);
    for (std::size_t k = 0; k < dim; ++k) {
      const double v = norm > 0.0 ? row[k] / norm : (k == 0 ? 1.0 : 0.0);
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = static_cast<float>(v);
    }
  }
  return out;
}

FloatMatrix fallback_embed(const TokenSequence& seq, std::size_t dim, std::uint64_t seed) {
  const auto ids = seq.ids();
  return fallback_embed(ids, dim, seed);
}

}  // namespace tokengraph
