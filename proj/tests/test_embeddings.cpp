// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "test_util.hpp"
#include "tokengraph/embeddings.hpp"
#include "tokengraph/error.hpp"

using namespace tokengraph;
using tokengraph::testing::read_bytes;
using tokengraph::testing::TempDir;
using tokengraph::testing::write_text;

namespace {

ShardRecord make_record(SampleId id, std::vector<TokenId> ids, std::size_t dim, Rng& rng) {
  ShardRecord r;
  r.sample_id = id;
  r.values.resize(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < r.values.size(); ++i) r.values.data()[i] = static_cast<float>(rng.uniform(-3, 3));
  r.token_ids = std::move(ids);
  return r;
}

EmbeddingShard random_shard(Rng& rng) {
  EmbeddingShard shard;
  const std::size_t records = rng.below(6);
  const std::size_t dim = 1 + rng.below(9);
  for (std::size_t i = 0; i < records; ++i) {
    std::vector<TokenId> ids(1 + rng.below(7));
    for (auto& id : ids) id = static_cast<TokenId>(rng.below(50000));
    shard.add(make_record(rng.below(1ULL << 40) * 2 + i, std::move(ids), dim, rng));
  }
  return shard;
}

template <typename T>
void append_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(T));
    out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
}

}  // namespace

TEST_CASE("write_shard file sizes follow the layout") {
  TempDir dir;
  Rng rng(1);
  EmbeddingShard shard;
  shard.add(make_record(9, {4, 5}, 3, rng));
  write_shard(shard, dir / "one.bin");
  CHECK(std::filesystem::file_size(dir / "one.bin") == 64);
  CHECK(shard_file_size(shard) == 64);

  write_shard(EmbeddingShard{}, dir / "empty.bin");
  CHECK(std::filesystem::file_size(dir / "empty.bin") == 16);
}

TEST_CASE("shard bytes match a hand-assembled little-endian layout") {
  EmbeddingShard shard;
  ShardRecord r;
  r.sample_id = 0x0102030405060708ULL;
  r.token_ids = {101, 7};
  r.values.resize(2, 2);
  r.values << 1.0f, -2.5f, 0.25f, 3.0f;
  shard.add(r);

  std::vector<std::uint8_t> expected = {'T', 'G', 'E', 'B'};
  append_le<std::uint32_t>(expected, 1);
  append_le<std::uint64_t>(expected, 1);
  append_le<std::uint64_t>(expected, 0x0102030405060708ULL);
  append_le<std::uint32_t>(expected, 2);
  append_le<std::uint32_t>(expected, 2);
  append_le<std::uint32_t>(expected, 101);
  append_le<std::uint32_t>(expected, 7);
  for (float f : {1.0f, -2.5f, 0.25f, 3.0f}) append_le<float>(expected, f);
  CHECK(encode_shard(shard) == expected);
}

TEST_CASE("shard validation") {
  Rng rng(2);
  EmbeddingShard shard;
  CHECK_THROWS_AS(shard.add(make_record(1, {1, 2}, 0, rng)), ShapeError);
  shard.add(make_record(1, {1, 2}, 4, rng));
  CHECK_THROWS_AS(shard.add(make_record(2, {1}, 5, rng)), ShapeError);
  CHECK_THROWS_AS(shard.add(make_record(1, {1}, 4, rng)), ValidationError);
  ShardRecord mismatched = make_record(3, {1, 2, 3}, 4, rng);
  mismatched.token_ids.pop_back();
  CHECK_THROWS_AS(shard.add(mismatched), ShapeError);

  ShardRecord nan = make_record(4, {1}, 4, rng);
  nan.values(0, 2) = std::numeric_limits<float>::quiet_NaN();
  shard.add(nan);
  CHECK_THROWS_AS(encode_shard(shard), ValidationError);
}

TEST_CASE("property: shard round-trip is bit-exact and deterministic") {
  TempDir dir;
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const EmbeddingShard shard = random_shard(rng);
    write_shard(shard, dir / "s.bin");
    const EmbeddingShard back = read_shard(dir / "s.bin");
    REQUIRE(back == shard);
    REQUIRE(back.dim() == shard.dim());
    REQUIRE(encode_shard(back) == read_bytes(dir / "s.bin"));
  }
}

TEST_CASE("read_shard rejects malformed files") {
  TempDir dir;
  Rng rng(4);
  EmbeddingShard shard;
  shard.add(make_record(1, {1, 2, 3}, 4, rng));
  auto bytes = encode_shard(shard);
  auto dump = [&](const std::vector<std::uint8_t>& b) {
    std::ofstream out(dir / "bad.bin", std::ios::binary);
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  };

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  dump(bad_magic);
  CHECK_THROWS_WITH_AS(read_shard(dir / "bad.bin"), doctest::Contains("magic"), FormatError);

  auto bad_version = bytes;
  bad_version[4] = 2;
  dump(bad_version);
  CHECK_THROWS_WITH_AS(read_shard(dir / "bad.bin"), doctest::Contains("version"), FormatError);

  for (std::size_t cut : {std::size_t{3}, std::size_t{10}, std::size_t{20}, bytes.size() - 1}) {
    dump(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut)));
    CHECK_THROWS_WITH_AS(read_shard(dir / "bad.bin"), doctest::Contains("truncated"), FormatError);
  }

  auto trailing = bytes;
  trailing.push_back(0);
  dump(trailing);
  CHECK_THROWS_AS(read_shard(dir / "bad.bin"), FormatError);

  CHECK_THROWS_AS(read_shard(dir / "does_not_exist.bin"), ValidationError);
}

TEST_CASE("manifest round-trip and validation") {
  TempDir dir;
  Manifest m;
  m.label_names = {"neg", "pos"};
  m.entries = {{1, "pos", 5}, {2, "neg", 3}};
  m.includes_special = false;
  m.source = "unit";
  write_manifest(m, dir / "m.jsonl");
  CHECK(read_manifest(dir / "m.jsonl") == m);
  CHECK(m.label_index("pos") == 1);
  CHECK_THROWS_AS(m.label_index("other"), ValidationError);

  Manifest dup = m;
  dup.entries.push_back({1, "neg", 2});
  CHECK_THROWS_AS(dup.validate(), ValidationError);
  Manifest unknown = m;
  unknown.entries.push_back({3, "meh", 2});
  CHECK_THROWS_AS(unknown.validate(), ValidationError);

  write_text(dir / "noheader.jsonl", "{\"id\": 1, \"label\": \"pos\", \"n_tokens\": 2}\n");
  CHECK_THROWS_AS(read_manifest(dir / "noheader.jsonl"), FormatError);
  write_text(dir / "garbage.jsonl", "{\"label_names\": [\"a\"]}\nnot json\n");
  CHECK_THROWS_AS(read_manifest(dir / "garbage.jsonl"), FormatError);
}

TEST_CASE("manifest and shard consistency") {
  Rng rng(5);
  EmbeddingShard shard;
  shard.add(make_record(1, {1, 2, 3}, 2, rng));
  Manifest m;
  m.label_names = {"a"};
  m.entries = {{1, "a", 3}};
  CHECK_NOTHROW(check_consistency(m, shard));
  m.entries[0].n_tokens = 4;
  CHECK_THROWS_WITH_AS(check_consistency(m, shard), doctest::Contains("tokens"), ValidationError);
  m.entries[0] = {2, "a", 3};
  CHECK_THROWS_AS(check_consistency(m, shard), ValidationError);
}

TEST_CASE("fallback_embed") {
  const std::vector<TokenId> ids = {17, 4, 17, 99};
  const FloatMatrix e = fallback_embed(ids, 768, 12345);
  REQUIRE(e.rows() == 4);
  REQUIRE(e.cols() == 768);
  CHECK(e.row(0) == e.row(2));
  for (Eigen::Index r = 0; r < e.rows(); ++r) {
    CHECK(std::abs(e.row(r).cast<double>().norm() - 1.0) < 1e-6);
  }
  const double cosine = e.row(0).cast<double>().dot(e.row(1).cast<double>());
  CHECK(std::abs(cosine) < 0.2);

  CHECK(fallback_embed(ids, 768, 12345) == e);
  CHECK(fallback_embed(ids, 768, 12346) != e);
  CHECK_THROWS_AS(fallback_embed(ids, 0, 1), ValidationError);

  SUBCASE("rows depend only on (seed, token id, dim)") {
    const std::vector<TokenId> single = {99};
    CHECK(fallback_embed(single, 768, 12345).row(0) == e.row(3));
  }
  SUBCASE("odd widths") {
    const FloatMatrix odd = fallback_embed(ids, 5, 1);
    CHECK(odd.cols() == 5);
    CHECK(std::abs(odd.row(1).cast<double>().norm() - 1.0) < 1e-6);
    const FloatMatrix one = fallback_embed(ids, 1, 1);
    CHECK(std::abs(std::abs(one(0, 0)) - 1.0f) < 1e-6f);
  }
  SUBCASE("near-orthogonality holds broadly") {
    std::vector<TokenId> many(64);
    for (std::size_t i = 0; i < many.size(); ++i) many[i] = static_cast<TokenId>(i * 7 + 1);
    const FloatMatrix m = fallback_embed(many, 768, 3);
    const Eigen::MatrixXd gram = m.cast<double>() * m.cast<double>().transpose();
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
      for (Eigen::Index j = 0; j < i; ++j) REQUIRE(std::abs(gram(i, j)) < 0.2);
    }
  }
}
