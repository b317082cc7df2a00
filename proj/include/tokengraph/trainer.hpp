// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#pragma once

// Few-shot training protocol: a fixed per-class train/validation split, shuffled
// mini-batches, Adam, per-epoch validation with best-model retention, and
// repeats over several training seeds on the same split.

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tokengraph/dataset.hpp"
#include "tokengraph/embeddings.hpp"
#include "tokengraph/gnn.hpp"

namespace tokengraph {

struct TrainConfig {
  std::size_t n_hop = 1;
  std::size_t hidden_dim = 128;
  double lr = 5e-5;
  std::size_t epochs = 200;
  std::size_t batch_size = 8;
  bool add_special = true;
  std::vector<std::uint64_t> train_seeds = {1, 2, 3, 4, 5};
  bool strict_determinism = true;
  std::size_t shots = 20;
  std::uint64_t split_seed = 0;

  /// Throws ValidationError for zero-valued counts, non-positive lr or no seeds.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// Flat JSON object; missing keys keep their defaults, unknown keys are rejected.
TrainConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const TrainConfig& config);
TrainConfig load_config(const std::filesystem::path& path);

struct FewShotSplit {
  std::vector<SampleId> train_ids;  // each list ascending
  std::vector<SampleId> val_ids;
  std::vector<SampleId> test_ids;
  std::size_t shots = 0;
  std::uint64_t split_seed = 0;
};

/// Per class (label_names order): sort ids, shuffle with a generator seeded by
/// split_seed, then take `shots` for train, `shots` for validation and the rest
/// for test. Throws ValidationError naming any class with fewer than 2 * shots samples.
FewShotSplit make_split(const Manifest& manifest, std::size_t shots, std::uint64_t split_seed);

/// Labeled graphs for every manifest entry, built once and shared read-only.
class GraphSet {
 public:
  /// Drops the leading and trailing special-token rows when the manifest says
  /// the shard stores them but add_special is off.
  GraphSet(const EmbeddingShard& shard, const Manifest& manifest, std::size_t n_hop, bool add_special);

  const TokenGraph& at(SampleId id) const;
  std::vector<const TokenGraph*> select(const std::vector<SampleId>& ids) const;
  std::size_t dim() const { return dim_; }
  std::size_t classes() const { return classes_; }
  std::size_t size() const { return graphs_.size(); }

 private:
  std::vector<TokenGraph> graphs_;
  std::unordered_map<SampleId, std::size_t> index_;
  std::size_t dim_ = 0;
  std::size_t classes_ = 0;
};

struct EvalResult {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<int> predictions;
};

inline constexpr std::size_t kEvalBatchSize = 64;

/// Predictions over `graphs` in order, in fixed chunks of kEvalBatchSize.
EvalResult evaluate(const std::vector<const TokenGraph*>& graphs, const ModelParams& params, std::size_t classes);

struct SeedRecord {
  std::uint64_t seed = 0;
  std::size_t best_epoch = 0;  // 1-based; 0 means the initial parameters were kept
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  double test_macro_f1 = 0.0;
  std::vector<double> epoch_losses;  // mean training loss per epoch
};

struct TrainOutcome {
  ModelParams best_params;
  SeedRecord record;
};

TrainOutcome train_one(const GraphSet& graphs, const FewShotSplit& split, const TrainConfig& config,
                       std::uint64_t seed);

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for one seed
};

struct RunReport {
  TrainConfig config;
  std::vector<std::string> label_names;
  std::size_t n_train = 0;
  std::size_t n_val = 0;
  std::size_t n_test = 0;
  std::vector<SeedRecord> seeds;
  Aggregate val_accuracy;
  Aggregate test_accuracy;
  Aggregate test_macro_f1;
  std::uint64_t model_seed = 0;  // seed whose parameters are exported
};

/// Recomputes the aggregates from report.seeds.
void aggregate(RunReport& report);

nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

struct ExperimentResult {
  RunReport report;
  ModelParams model;  // retained parameters of report.model_seed
};

/// One split, one train_one per seed. Seeds run on up to `workers` threads
/// unless strict_determinism is set; the result is identical either way.
ExperimentResult run_experiment(const EmbeddingShard& shard, const Manifest& manifest, const TrainConfig& config,
                                std::size_t workers = 0);

struct AblationGrid {
  std::vector<std::size_t> n_hops = {1, 2, 3};
  std::vector<std::size_t> hidden_dims = {64, 128, 256};
};

/// "n_hop=1,2,3;hidden_dim=64,128" -- either key may be omitted, in which case
/// that axis takes the base config's value. Throws ValidationError when malformed.
AblationGrid parse_grid(const std::string& text, const TrainConfig& base);

struct AblationRow {
  std::size_t n_hop = 0;
  std::size_t hidden_dim = 0;
  RunReport report;
};

/// Every grid cell, sorted by mean test accuracy (descending, grid order on ties).
std::vector<AblationRow> ablate(const EmbeddingShard& shard, const Manifest& manifest, const TrainConfig& base,
                                const AblationGrid& grid, std::size_t workers = 0);

nlohmann::json ablation_to_json(const std::vector<AblationRow>& rows);

struct SyntheticConfig {
  std::size_t classes = 2;
  std::size_t per_class = 200;
  std::size_t vocab_size = 1000;
  std::size_t markers_per_class = 5;
  std::size_t text_len = 12;
  std::size_t min_markers = 1;  // marker words inserted per sample, drawn uniformly
  std::size_t max_markers = 3;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  std::vector<Sample> samples;
  std::vector<std::string> vocab;  // vocab.txt lines
  std::vector<std::vector<std::string>> markers;  // per class
};

/// Each sample is text_len filler words plus [min_markers, max_markers] marker
/// words from its own class's disjoint marker set, at random positions.
SyntheticData generate_synthetic(const SyntheticConfig& config);

/// Tokenizes every sample and embeds it with fallback_embed.
struct EmbeddedDataset {
  EmbeddingShard shard;
  Manifest manifest;
};
EmbeddedDataset embed_dataset(const std::vector<Sample>& samples, const Vocab& vocab, std::size_t dim,
                              std::uint64_t seed, bool add_special = true);

}  // namespace tokengraph
