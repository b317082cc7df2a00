// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#include "tokengraph/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "tokengraph/error.hpp"
#include "tokengraph/metrics.hpp"
#include "tokengraph/rng.hpp"

namespace tokengraph {

using nlohmann::json;

void TrainConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ValidationError(std::string("config: ") + name + " must be >= 1");
  };
  positive(n_hop, "n_hop");
  positive(hidden_dim, "hidden_dim");
  positive(batch_size, "batch_size");
  positive(shots, "shots");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ValidationError("config: lr must be a positive finite number");
  if (train_seeds.empty()) throw ValidationError("config: train_seeds must contain at least one seed");
}

TrainConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  static const std::set<std::string> known = {"n_hop",      "hidden_dim",  "lr",
                                              "epochs",     "batch_size",  "add_special",
                                              "train_seeds", "strict_determinism", "shots",
                                              "split_seed"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ValidationError("config: unknown key '" + key + "'");
  }
  TrainConfig c;
  try {
    auto count = [&](const char* key, std::size_t& field) {
      if (!j.contains(key)) return;
      const json& v = j.at(key);
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ValidationError(std::string("config: ") + key + " must be a non-negative integer");
      }
      field = v.get<std::size_t>();
    };
    count("n_hop", c.n_hop);
    count("hidden_dim", c.hidden_dim);
    count("epochs", c.epochs);
    count("batch_size", c.batch_size);
    count("shots", c.shots);
    if (j.contains("lr")) c.lr = j.at("lr").get<double>();
    if (j.contains("add_special")) c.add_special = j.at("add_special").get<bool>();
    if (j.contains("strict_determinism")) c.strict_determinism = j.at("strict_determinism").get<bool>();
    if (j.contains("train_seeds")) c.train_seeds = j.at("train_seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("split_seed")) c.split_seed = j.at("split_seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

json config_to_json(const TrainConfig& c) {
  return {{"n_hop", c.n_hop},
          {"hidden_dim", c.hidden_dim},
          {"lr", c.lr},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"add_special", c.add_special},
          {"train_seeds", c.train_seeds},
          {"strict_determinism", c.strict_determinism},
          {"shots", c.shots},
          {"split_seed", c.split_seed}};
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

FewShotSplit make_split(const Manifest& manifest, std::size_t shots, std::uint64_t split_seed) {
  if (shots == 0) throw ValidationError("make_split: shots must be >= 1");
  std::vector<std::vector<SampleId>> by_class(manifest.label_names.size());
  for (const auto& e : manifest.entries) {
    by_class[static_cast<std::size_t>(manifest.label_index(e.label))].push_back(e.id);
  }
  FewShotSplit split;
  split.shots = shots;
  split.split_seed = split_seed;
  Rng rng(split_seed);
  for (std::size_t k = 0; k < by_class.size(); ++k) {
    auto& ids = by_class[k];
    if (ids.size() < 2 * shots) {
      throw ValidationError("class '" + manifest.label_names[k] + "' has " + std::to_string(ids.size()) +
                            " samples; a " + std::to_string(shots) + "-shot split needs at least " +
                            std::to_string(2 * shots));
    }
    std::sort(ids.begin(), ids.end());
    rng.shuffle(ids);
    split.train_ids.insert(split.train_ids.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(shots));
    split.val_ids.insert(split.val_ids.end(), ids.begin() + static_cast<std::ptrdiff_t>(shots),
                         ids.begin() + static_cast<std::ptrdiff_t>(2 * shots));
    split.test_ids.insert(split.test_ids.end(), ids.begin() + static_cast<std::ptrdiff_t>(2 * shots), ids.end());
  }
  std::sort(split.train_ids.begin(), split.train_ids.end());
  std::sort(split.val_ids.begin(), split.val_ids.end());
  std::sort(split.test_ids.begin(), split.test_ids.end());
  return split;
}

GraphSet::GraphSet(const EmbeddingShard& shard, const Manifest& manifest, std::size_t n_hop, bool add_special) {
  manifest.validate();
  check_consistency(manifest, shard);
  if (add_special && !manifest.includes_special) {
    throw ValidationError("config asks for special-token nodes but the shard was written without them");
  }
  const bool strip = manifest.includes_special && !add_special;
  std::unordered_map<SampleId, const ShardRecord*> records;
  for (const auto& r : shard.records()) records.emplace(r.sample_id, &r);

  dim_ = shard.dim();
  classes_ = manifest.label_names.size();
  graphs_.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    const ShardRecord& rec = *records.at(e.id);
    const auto n = static_cast<Eigen::Index>(rec.token_ids.size());
    const Eigen::Index skip = strip ? 1 : 0;
    const Eigen::Index keep = n - 2 * skip;
    if (keep < 1) {
      throw ValidationError("sample " + std::to_string(e.id) + " has no tokens left after dropping [CLS]/[SEP]");
    }
    Matrix features = rec.values.middleRows(skip, keep).cast<double>();
    std::span<const TokenId> ids(rec.token_ids.data() + skip, static_cast<std::size_t>(keep));
    index_.emplace(e.id, graphs_.size());
    graphs_.push_back(build_graph(e.id, ids, std::move(features), n_hop, manifest.label_index(e.label)));
  }
}

const TokenGraph& GraphSet::at(SampleId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ValidationError("sample " + std::to_string(id) + " is not in the graph set");
  return graphs_[it->second];
}

std::vector<const TokenGraph*> GraphSet::select(const std::vector<SampleId>& ids) const {
  std::vector<const TokenGraph*> out;
  out.reserve(ids.size());
  for (SampleId id : ids) out.push_back(&at(id));
  return out;
}

EvalResult evaluate(const std::vector<const TokenGraph*>& graphs, const ModelParams& params, std::size_t classes) {
  if (graphs.empty()) throw ValidationError("evaluate: no graphs");
  EvalResult r;
  std::vector<int> golds;
  golds.reserve(graphs.size());
  for (std::size_t begin = 0; begin < graphs.size(); begin += kEvalBatchSize) {
    const std::size_t end = std::min(graphs.size(), begin + kEvalBatchSize);
    std::span<const TokenGraph* const> chunk(graphs.data() + begin, end - begin);
    const GraphBatch batch = collate(chunk);
    const auto preds = predict(batch, params);
    r.predictions.insert(r.predictions.end(), preds.begin(), preds.end());
  }
  for (const TokenGraph* g : graphs) {
    if (!g->label) throw ValidationError("evaluate: graph " + std::to_string(g->sample_id) + " has no label");
    golds.push_back(*g->label);
  }
  r.accuracy = accuracy(r.predictions, golds);
  r.macro_f1 = macro_f1(r.predictions, golds, classes);
  return r;
}

TrainOutcome train_one(const GraphSet& graphs, const FewShotSplit& split, const TrainConfig& config,
                       std::uint64_t seed) {
  config.validate();
  const auto train = graphs.select(split.train_ids);
  const auto val = graphs.select(split.val_ids);
  const auto test = graphs.select(split.test_ids);
  if (train.empty() || val.empty() || test.empty()) throw ValidationError("train_one: a split partition is empty");

  ModelParams params = ModelParams::glorot(graphs.dim(), config.hidden_dim, graphs.classes(), seed);
  AdamState adam = AdamState::for_params(params);
  const AdamConfig adam_config{.learning_rate = config.lr};
  Rng shuffler(seed ^ 0xA5A5A5A5DEADBEEFULL);

  TrainOutcome out;
  out.record.seed = seed;
  out.best_params = params;
  double best_val = -1.0;
  if (config.epochs == 0) best_val = evaluate(val, params, graphs.classes()).accuracy;

  std::vector<std::size_t> order(train.size());
  std::vector<const TokenGraph*> chunk;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffler.shuffle(order);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      chunk.clear();
      for (std::size_t i = begin; i < std::min(order.size(), begin + config.batch_size); ++i) {
        chunk.push_back(train[order[i]]);
      }
      const GraphBatch batch = collate(std::span<const TokenGraph* const>(chunk));
      const auto fwd = model_forward(batch, params);
      const auto loss = softmax_cross_entropy(fwd.logits, batch.labels);
      const std::string where =
          "seed " + std::to_string(seed) + ", epoch " + std::to_string(epoch) + ", batch " + std::to_string(batches);
      if (!std::isfinite(loss.loss)) throw NumericError("non-finite training loss at " + where);
      const ModelParams grads = backward(fwd.cache, loss.grad_logits, params);
      try {
        adam_step(params, grads, adam, adam_config);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " at " + where);
      }
      loss_sum += loss.loss;
      ++batches;
    }
    out.record.epoch_losses.push_back(loss_sum / static_cast<double>(batches));

    const double val_acc = evaluate(val, params, graphs.classes()).accuracy;
    if (val_acc > best_val) {
      best_val = val_acc;
      out.best_params = params;
      out.record.best_epoch = epoch;
    }
  }

  const EvalResult test_eval = evaluate(test, out.best_params, graphs.classes());
  out.record.val_accuracy = best_val;
  out.record.test_accuracy = test_eval.accuracy;
  out.record.test_macro_f1 = test_eval.macro_f1;
  return out;
}

void aggregate(RunReport& report) {
  std::vector<double> val, acc, f1;
  for (const auto& s : report.seeds) {
    val.push_back(s.val_accuracy);
    acc.push_back(s.test_accuracy);
    f1.push_back(s.test_macro_f1);
  }
  report.val_accuracy = {mean_of(val), sample_std(val)};
  report.test_accuracy = {mean_of(acc), sample_std(acc)};
  report.test_macro_f1 = {mean_of(f1), sample_std(f1)};
  // Exported model: best validation accuracy, earliest seed on ties.
  std::size_t best = 0;
  for (std::size_t i = 1; i < val.size(); ++i)
    if (val[i] > val[best]) best = i;
  report.model_seed = report.seeds.empty() ? 0 : report.seeds[best].seed;
}

namespace {

json aggregate_to_json(const Aggregate& a) { return {{"mean", a.mean}, {"std", a.std}}; }
Aggregate aggregate_from_json(const json& j) { return {j.at("mean").get<double>(), j.at("std").get<double>()}; }

}  // namespace

json report_to_json(const RunReport& r) {
  json seeds = json::array();
  for (const auto& s : r.seeds) {
    seeds.push_back({{"seed", s.seed},
                     {"best_epoch", s.best_epoch},
                     {"val_accuracy", s.val_accuracy},
                     {"test_accuracy", s.test_accuracy},
                     {"test_macro_f1", s.test_macro_f1},
                     {"epoch_losses", s.epoch_losses}});
  }
  return {{"config", config_to_json(r.config)},
          {"label_names", r.label_names},
          {"n_train", r.n_train},
          {"n_val", r.n_val},
          {"n_test", r.n_test},
          {"seeds", seeds},
          {"aggregate",
           {{"val_accuracy", aggregate_to_json(r.val_accuracy)},
            {"test_accuracy", aggregate_to_json(r.test_accuracy)},
            {"test_macro_f1", aggregate_to_json(r.test_macro_f1)}}},
          {"model_seed", r.model_seed}};
}

RunReport report_from_json(const json& j) {
  RunReport r;
  try {
    r.config = config_from_json(j.at("config"));
    r.label_names = j.at("label_names").get<std::vector<std::string>>();
    r.n_train = j.at("n_train").get<std::size_t>();
    r.n_val = j.at("n_val").get<std::size_t>();
    r.n_test = j.at("n_test").get<std::size_t>();
    for (const auto& s : j.at("seeds")) {
      SeedRecord rec;
      rec.seed = s.at("seed").get<std::uint64_t>();
      rec.best_epoch = s.at("best_epoch").get<std::size_t>();
      rec.val_accuracy = s.at("val_accuracy").get<double>();
      rec.test_accuracy = s.at("test_accuracy").get<double>();
      rec.test_macro_f1 = s.at("test_macro_f1").get<double>();
      rec.epoch_losses = s.value("epoch_losses", std::vector<double>{});
      r.seeds.push_back(std::move(rec));
    }
    const json& agg = j.at("aggregate");
    r.val_accuracy = aggregate_from_json(agg.at("val_accuracy"));
    r.test_accuracy = aggregate_from_json(agg.at("test_accuracy"));
    r.test_macro_f1 = aggregate_from_json(agg.at("test_macro_f1"));
    r.model_seed = j.at("model_seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("run report: ") + e.what());
  }
  return r;
}

ExperimentResult run_experiment(const EmbeddingShard& shard, const Manifest& manifest, const TrainConfig& config,
                                std::size_t workers) {
  config.validate();
  const FewShotSplit split = make_split(manifest, config.shots, config.split_seed);
  const GraphSet graphs(shard, manifest, config.n_hop, config.add_special);

  const std::size_t n = config.train_seeds.size();
  std::vector<std::optional<TrainOutcome>> outcomes(n);
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t i) {
    try {
      outcomes[i] = train_one(graphs, split, config, config.train_seeds[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const std::size_t threads = config.strict_determinism ? 1 : std::clamp<std::size_t>(workers, 1, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run(i);
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult result;
  RunReport& report = result.report;
  report.config = config;
  report.label_names = manifest.label_names;
  report.n_train = split.train_ids.size();
  report.n_val = split.val_ids.size();
  report.n_test = split.test_ids.size();
  std::size_t best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    report.seeds.push_back(outcomes[i]->record);
    if (outcomes[i]->record.val_accuracy > outcomes[best]->record.val_accuracy) best = i;
  }
  aggregate(report);
  result.model = std::move(outcomes[best]->best_params);
  return result;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

}  // namespace

AblationGrid parse_grid(const std::string& text, const TrainConfig& base) {
  AblationGrid grid{{base.n_hop}, {base.hidden_dim}};
  std::set<std::string> seen;
  std::stringstream axes(text);
  std::string axis;
  bool any = false;
  while (std::getline(axes, axis, ';')) {
    axis = trim(axis);
    if (axis.empty()) continue;
    const auto eq = axis.find('=');
    if (eq == std::string::npos) throw ValidationError("grid: expected key=values in '" + axis + "'");
    const std::string key = trim(axis.substr(0, eq));
    if (!seen.insert(key).second) throw ValidationError("grid: key '" + key + "' given twice");
    std::vector<std::size_t> values;
    std::stringstream list(axis.substr(eq + 1));
    std::string item;
    while (std::getline(list, item, ',')) {
      item = trim(item);
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size() || v == 0 || item.front() == '-') {
        throw ValidationError("grid: '" + item + "' is not a positive integer");
      }
      values.push_back(static_cast<std::size_t>(v));
    }
    if (values.empty()) throw ValidationError("grid: no values for '" + key + "'");
    if (key == "n_hop") {
      grid.n_hops = values;
    } else if (key == "hidden_dim") {
      grid.hidden_dims = values;
    } else {
      throw ValidationError("grid: unknown key '" + key + "' (expected n_hop or hidden_dim)");
    }
    any = true;
  }
  if (!any) throw ValidationError("grid: empty specification");
  return grid;
}

std::vector<AblationRow> ablate(const EmbeddingShard& shard, const Manifest& manifest, const TrainConfig& base,
                                const AblationGrid& grid, std::size_t workers) {
  std::vector<AblationRow> rows;
  for (std::size_t n_hop : grid.n_hops) {
    for (std::size_t hidden : grid.hidden_dims) {
      TrainConfig cell = base;
      cell.n_hop = n_hop;
      cell.hidden_dim = hidden;
      rows.push_back({n_hop, hidden, run_experiment(shard, manifest, cell, workers).report});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const AblationRow& a, const AblationRow& b) {
    return a.report.test_accuracy.mean > b.report.test_accuracy.mean;
  });
  return rows;
}

json ablation_to_json(const std::vector<AblationRow>& rows) {
  json out = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.push_back({{"rank", i + 1},
                   {"n_hop", rows[i].n_hop},
                   {"hidden_dim", rows[i].hidden_dim},
                   {"report", report_to_json(rows[i].report)}});
  }
  return out;
}

SyntheticData generate_synthetic(const SyntheticConfig& c) {
  if (c.classes < 2) throw ValidationError("synthetic: need at least 2 classes");
  if (c.per_class == 0 || c.markers_per_class == 0) throw ValidationError("synthetic: counts must be >= 1");
  if (c.min_markers == 0 || c.max_markers < c.min_markers) {
    throw ValidationError("synthetic: need 1 <= min_markers <= max_markers");
  }
  if (c.vocab_size <= c.classes * c.markers_per_class) {
    throw ValidationError("synthetic: vocab_size must exceed classes * markers_per_class");
  }
  Rng rng(c.seed);
  SyntheticData data;
  data.vocab = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
  std::vector<std::string> words;
  for (std::size_t i = 0; i < c.vocab_size; ++i) words.push_back("w" + std::to_string(i));
  data.vocab.insert(data.vocab.end(), words.begin(), words.end());

  std::vector<std::string> pool = words;
  rng.shuffle(pool);
  data.markers.resize(c.classes);
  for (std::size_t k = 0; k < c.classes; ++k) {
    data.markers[k].assign(pool.begin() + static_cast<std::ptrdiff_t>(k * c.markers_per_class),
                           pool.begin() + static_cast<std::ptrdiff_t>((k + 1) * c.markers_per_class));
  }
  const std::vector<std::string> fillers(pool.begin() + static_cast<std::ptrdiff_t>(c.classes * c.markers_per_class),
                                         pool.end());

  std::vector<std::size_t> labels;
  for (std::size_t k = 0; k < c.classes; ++k) labels.insert(labels.end(), c.per_class, k);
  rng.shuffle(labels);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::size_t k = labels[i];
    std::vector<std::string> text;
    for (std::size_t w = 0; w < c.text_len; ++w) text.push_back(fillers[rng.below(fillers.size())]);
    const std::size_t marker_count = c.min_markers + rng.below(c.max_markers - c.min_markers + 1);
    for (std::size_t m = 0; m < marker_count; ++m) {
      const auto pos = static_cast<std::ptrdiff_t>(rng.below(text.size() + 1));
      text.insert(text.begin() + pos, data.markers[k][rng.below(c.markers_per_class)]);
    }
    std::string joined;
    for (const auto& w : text) {
      if (!joined.empty()) joined += ' ';
      joined += w;
    }
    data.samples.push_back({i, std::move(joined), "class" + std::to_string(k)});
  }
  return data;
}

EmbeddedDataset embed_dataset(const std::vector<Sample>& samples, const Vocab& vocab, std::size_t dim,
                              std::uint64_t seed, bool add_special) {
  if (samples.empty()) throw ValidationError("embed_dataset: no samples");
  if (dim == 0) throw ValidationError("embed_dataset: dim must be >= 1");
  EmbeddedDataset out;
  out.manifest.label_names = label_names_of(samples);
  out.manifest.includes_special = add_special;
  out.manifest.source = "fallback:seed=" + std::to_string(seed);
  for (const auto& s : samples) {
    const TokenSequence seq = tokenize(s.text, vocab, {.add_special = add_special, .sample_id = s.id});
    ShardRecord rec;
    rec.sample_id = s.id;
    rec.token_ids = seq.ids();
    rec.values = fallback_embed(rec.token_ids, dim, seed);
    out.manifest.entries.push_back({s.id, s.label, seq.size()});
    out.shard.add(std::move(rec));
  }
  return out;
}

}  // namespace tokengraph
