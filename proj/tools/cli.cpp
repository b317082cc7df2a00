// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "tokengraph/dataset.hpp"
#include "tokengraph/embeddings.hpp"
#include "tokengraph/error.hpp"
#include "tokengraph/gnn.hpp"
#include "tokengraph/metrics.hpp"
#include "tokengraph/tokenizer.hpp"
#include "tokengraph/trainer.hpp"

namespace tokengraph::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void write_json(const json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path);
}

json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ValidationError(std::string("cannot open ") + what + " " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string(what) + " " + path + ": " + e.what());
  }
}

std::size_t worker_count() {
  const char* env = std::getenv("TOKENGRAPH_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw ValidationError(std::string("TOKENGRAPH_THREADS is not a count: ") + env);
  return static_cast<std::size_t>(v);
}

TrainConfig config_or_default(const std::string& path) {
  return path.empty() ? TrainConfig{} : load_config(path);
}

struct TokenizeArgs {
  std::string data, vocab, out;
  bool add_special = true;
  std::size_t max_len = kDefaultMaxLen;
};

int cmd_tokenize(const TokenizeArgs& a, std::ostream& out) {
  const Vocab vocab = load_vocab(a.vocab);
  const auto samples = read_dataset(a.data);
  json per_sample = json::array();
  std::size_t total = 0, unknown = 0, content = 0, longest = 0;
  for (const auto& s : samples) {
    const auto seq = tokenize(s.text, vocab, {.add_special = a.add_special, .max_len = a.max_len, .sample_id = s.id});
    std::size_t unk = 0;
    for (const auto& t : seq.tokens) unk += t.id == vocab.unk_id() ? 1 : 0;
    const std::size_t specials = seq.includes_special ? 2 : 0;
    per_sample.push_back({{"id", s.id}, {"n_tokens", seq.size()}, {"n_unk", unk}});
    total += seq.size();
    content += seq.size() - specials;
    unknown += unk;
    longest = std::max(longest, seq.size());
  }
  const json report = {
      {"vocab_size", vocab.size()},
      {"add_special", a.add_special},
      {"max_len", a.max_len},
      {"n_samples", samples.size()},
      {"total_tokens", total},
      {"unk_tokens", unknown},
      {"max_tokens", longest},
      {"mean_tokens", static_cast<double>(total) / static_cast<double>(samples.size())},
      {"coverage", content == 0 ? 1.0 : 1.0 - static_cast<double>(unknown) / static_cast<double>(content)},
      {"samples", per_sample}};
  write_json(report, a.out, out);
  return kExitOk;
}

struct EmbedArgs {
  std::string data, vocab, out_shard, out_manifest;
  std::size_t dim = 768;
  std::uint64_t seed = 0;
  bool add_special = true;
};

int cmd_embed_fallback(const EmbedArgs& a) {
  if (a.dim == 0) throw ValidationError("--dim must be >= 1");
  const Vocab vocab = load_vocab(a.vocab);
  const auto samples = read_dataset(a.data);
  const EmbeddedDataset ds = embed_dataset(samples, vocab, a.dim, a.seed, a.add_special);
  write_shard(ds.shard, a.out_shard);
  write_manifest(ds.manifest, a.out_manifest);
  return kExitOk;
}

struct TrainArgs {
  std::string shard, manifest, config, out_report, out_model;
};

json checkpoint_metadata(const RunReport& report) {
  return {{"label_names", report.label_names},
          {"n_hop", report.config.n_hop},
          {"add_special", report.config.add_special},
          {"shots", report.config.shots},
          {"split_seed", report.config.split_seed},
          {"seed", report.model_seed}};
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const TrainConfig config = config_or_default(a.config);
  const Manifest manifest = read_manifest(a.manifest);
  const EmbeddingShard shard = read_shard(a.shard);
  const auto result = run_experiment(shard, manifest, config, worker_count());
  write_json(report_to_json(result.report), a.out_report, out);
  if (!a.out_model.empty()) {
    write_checkpoint({result.model, checkpoint_metadata(result.report).dump()}, a.out_model);
  }
  return kExitOk;
}

struct EvaluateArgs {
  std::string model, shard, manifest, split = "test", out;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const Checkpoint ckpt = read_checkpoint(a.model);
  json meta;
  try {
    meta = json::parse(ckpt.metadata);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("model checkpoint metadata: ") + e.what());
  }
  const Manifest manifest = read_manifest(a.manifest);
  const auto labels = meta.at("label_names").get<std::vector<std::string>>();
  if (labels != manifest.label_names) {
    throw ValidationError("label set mismatch: model was trained on " + json(labels).dump() + ", manifest has " +
                          json(manifest.label_names).dump());
  }
  if (labels.size() != ckpt.params.classes()) throw FormatError("model checkpoint: label count != class count");
  const EmbeddingShard shard = read_shard(a.shard);
  if (shard.dim() != ckpt.params.in_dim()) {
    throw ShapeError("shard dim " + std::to_string(shard.dim()) + " != model input dim " +
                     std::to_string(ckpt.params.in_dim()));
  }
  const auto n_hop = meta.at("n_hop").get<std::size_t>();
  const auto shots = meta.at("shots").get<std::size_t>();
  const auto split_seed = meta.at("split_seed").get<std::uint64_t>();
  const GraphSet graphs(shard, manifest, n_hop, meta.at("add_special").get<bool>());

  std::vector<SampleId> ids;
  if (a.split == "all") {
    for (const auto& e : manifest.entries) ids.push_back(e.id);
    std::sort(ids.begin(), ids.end());
  } else {
    const FewShotSplit split = make_split(manifest, shots, split_seed);
    if (a.split == "train") {
      ids = split.train_ids;
    } else if (a.split == "val") {
      ids = split.val_ids;
    } else {
      ids = split.test_ids;
    }
  }
  const EvalResult r = evaluate(graphs.select(ids), ckpt.params, graphs.classes());
  write_json({{"split", a.split},
              {"n_samples", ids.size()},
              {"accuracy", r.accuracy},
              {"macro_f1", r.macro_f1},
              {"model_seed", meta.at("seed")}},
             a.out, out);
  return kExitOk;
}

struct AblateArgs {
  std::string shard, manifest, config, grid, out;
};

int cmd_ablate(const AblateArgs& a, std::ostream& out) {
  const TrainConfig base = config_or_default(a.config);
  const AblationGrid grid = parse_grid(a.grid, base);
  const Manifest manifest = read_manifest(a.manifest);
  const EmbeddingShard shard = read_shard(a.shard);
  const auto rows = ablate(shard, manifest, base, grid, worker_count());
  write_json(ablation_to_json(rows), a.out, out);
  return kExitOk;
}

struct SignificanceArgs {
  std::string report_a, report_b, out;
  std::size_t m = 1;
  double alpha = 0.05;
};

json significance_json(const std::vector<double>& a, const std::vector<double>& b, double alpha, std::size_t m) {
  const WelchResult r = welch_t_test(a, b, alpha, m);
  return {{"inputs", {{"a", a}, {"b", b}}},
          {"t", r.t},
          {"df", r.df},
          {"p", r.p},
          {"alpha", r.alpha},
          {"m", r.comparisons},
          {"threshold", r.alpha / static_cast<double>(r.comparisons)},
          {"variance_floor", kVarianceFloor},
          {"variance_floored", r.variance_floored},
          {"verdict", r.significant ? "significant" : "not significant"},
          {"significant", r.significant}};
}

int cmd_significance(const SignificanceArgs& a, std::ostream& out) {
  const RunReport ra = report_from_json(read_json_file(a.report_a, "report"));
  const RunReport rb = report_from_json(read_json_file(a.report_b, "report"));
  for (const auto* r : {&ra, &rb}) {
    if (r->seeds.size() < 2) {
      throw ValidationError("significance testing needs at least 2 seeds per report (got " +
                            std::to_string(r->seeds.size()) + ")");
    }
  }
  auto column = [](const RunReport& r, double SeedRecord::*field) {
    std::vector<double> v;
    for (const auto& s : r.seeds) v.push_back(s.*field);
    return v;
  };
  const json report = {
      {"test", "welch"},
      {"accuracy", significance_json(column(ra, &SeedRecord::test_accuracy), column(rb, &SeedRecord::test_accuracy),
                                     a.alpha, a.m)},
      {"macro_f1", significance_json(column(ra, &SeedRecord::test_macro_f1), column(rb, &SeedRecord::test_macro_f1),
                                     a.alpha, a.m)}};
  write_json(report, a.out, out);
  return kExitOk;
}

struct SynthArgs {
  SyntheticConfig config;
  std::string out_data, out_vocab;
};

int cmd_synth(const SynthArgs& a) {
  const SyntheticData data = generate_synthetic(a.config);
  write_dataset(data.samples, a.out_data);
  std::ofstream vocab(a.out_vocab, std::ios::binary | std::ios::trunc);
  if (!vocab) throw std::runtime_error("cannot open " + a.out_vocab + " for writing");
  for (const auto& t : data.vocab) vocab << t << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Token-level graph attention classifier for few-shot short-text classification", "tokengraph"};
  app.require_subcommand(1);

  TokenizeArgs tok;
  auto* tokenize_cmd = app.add_subcommand("tokenize", "Tokenize a dataset and report token statistics");
  tokenize_cmd->add_option("--data", tok.data, "Dataset JSON-lines")->required();
  tokenize_cmd->add_option("--vocab", tok.vocab, "vocab.txt")->required();
  tokenize_cmd->add_option("--add-special", tok.add_special, "Wrap with [CLS]/[SEP] (true/false)");
  tokenize_cmd->add_option("--max-len", tok.max_len, "Maximum sequence length");
  tokenize_cmd->add_option("--out", tok.out, "Report path (default stdout)");

  EmbedArgs emb;
  auto* embed_cmd = app.add_subcommand("embed-fallback", "Write a shard of deterministic static token embeddings");
  embed_cmd->add_option("--data", emb.data, "Dataset JSON-lines")->required();
  embed_cmd->add_option("--vocab", emb.vocab, "vocab.txt")->required();
  embed_cmd->add_option("--dim", emb.dim, "Embedding width");
  embed_cmd->add_option("--seed", emb.seed, "Embedding seed");
  embed_cmd->add_option("--add-special", emb.add_special, "Store [CLS]/[SEP] rows (true/false)");
  embed_cmd->add_option("--out-shard", emb.out_shard, "Shard output path")->required();
  embed_cmd->add_option("--out-manifest", emb.out_manifest, "Manifest output path")->required();

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Run the few-shot protocol over all configured seeds");
  train_cmd->add_option("--shard", tr.shard, "Embedding shard")->required();
  train_cmd->add_option("--manifest", tr.manifest, "Manifest JSON-lines")->required();
  train_cmd->add_option("--config", tr.config, "Flat JSON training config");
  train_cmd->add_option("--out-report", tr.out_report, "Run report path (default stdout)");
  train_cmd->add_option("--out-model", tr.out_model, "Checkpoint of the best seed's retained model");

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a checkpoint on a split of the dataset");
  evaluate_cmd->add_option("--model", ev.model, "Checkpoint written by train")->required();
  evaluate_cmd->add_option("--shard", ev.shard, "Embedding shard")->required();
  evaluate_cmd->add_option("--manifest", ev.manifest, "Manifest JSON-lines")->required();
  evaluate_cmd->add_option("--split", ev.split, "train, val, test or all")
      ->check(CLI::IsMember({"train", "val", "test", "all"}));
  evaluate_cmd->add_option("--out", ev.out, "Metrics path (default stdout)");

  AblateArgs ab;
  auto* ablate_cmd = app.add_subcommand("ablate", "Run the n-hop x hidden-dim grid");
  ablate_cmd->add_option("--shard", ab.shard, "Embedding shard")->required();
  ablate_cmd->add_option("--manifest", ab.manifest, "Manifest JSON-lines")->required();
  ablate_cmd->add_option("--config", ab.config, "Base training config");
  ablate_cmd->add_option("--grid", ab.grid, "e.g. \"n_hop=1,2,3;hidden_dim=64,128,256\"")->required();
  ablate_cmd->add_option("--out", ab.out, "Table path (default stdout)");

  SignificanceArgs sig;
  auto* significance_cmd = app.add_subcommand("significance", "Welch t-test between two run reports");
  significance_cmd->add_option("--report-a", sig.report_a, "First run report")->required();
  significance_cmd->add_option("--report-b", sig.report_b, "Second run report")->required();
  significance_cmd->add_option("--m", sig.m, "Bonferroni comparison count")->check(CLI::PositiveNumber);
  significance_cmd->add_option("--alpha", sig.alpha, "Family-wise significance level");
  significance_cmd->add_option("--out", sig.out, "Output path (default stdout)");

  SynthArgs syn;
  auto* synth_cmd = app.add_subcommand("synth", "Generate the synthetic separable dataset and its vocabulary");
  synth_cmd->add_option("--classes", syn.config.classes);
  synth_cmd->add_option("--per-class", syn.config.per_class);
  synth_cmd->add_option("--vocab-size", syn.config.vocab_size);
  synth_cmd->add_option("--markers-per-class", syn.config.markers_per_class);
  synth_cmd->add_option("--text-len", syn.config.text_len);
  synth_cmd->add_option("--min-markers", syn.config.min_markers);
  synth_cmd->add_option("--max-markers", syn.config.max_markers);
  synth_cmd->add_option("--seed", syn.config.seed);
  synth_cmd->add_option("--out-data", syn.out_data, "Dataset output path")->required();
  synth_cmd->add_option("--out-vocab", syn.out_vocab, "vocab.txt output path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*tokenize_cmd) return cmd_tokenize(tok, out);
    if (*embed_cmd) return cmd_embed_fallback(emb);
    if (*train_cmd) return cmd_train(tr, out);
    if (*evaluate_cmd) return cmd_evaluate(ev, out);
    if (*ablate_cmd) return cmd_ablate(ab, out);
    if (*significance_cmd) return cmd_significance(sig, out);
    if (*synth_cmd) return cmd_synth(syn);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace tokengraph::cli
