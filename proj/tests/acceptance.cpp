// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
//
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include "cli.hpp"
#include "test_util.hpp"
#include "tokengraph/embeddings.hpp"
#include "tokengraph/error.hpp"
#include "tokengraph/metrics.hpp"
#include "tokengraph/trainer.hpp"
#include "welch_oracle.hpp"

using namespace tokengraph;
using namespace tokengraph::testing;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

Outcome gradient_correctness() {
  const auto start = Clock::now();
  Rng rng(101);
  double worst = 0.0;
  std::size_t batches = 0, checked = 0;
  for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{7}})
    for (std::size_t f : {std::size_t{4}, std::size_t{768}})
      for (std::size_t hop : {std::size_t{1}, std::size_t{2}})
        for (int rep = 0; rep < 2; ++rep) {
          const ModelParams p = random_params(f, 16, 3, rng);
          std::vector<TokenGraph> gs = {random_graph(n, f, hop, 0, rng), random_graph(n, f, hop, 1, rng),
                                        random_graph(1 + rng.below(7), f, hop, 2, rng)};
          const auto r = grad_check(collate(gs), p, {.seed = rng.below(1u << 20)});
          worst = std::max(worst, r.max_relative_error);
          checked += r.checked;
          ++batches;
        }
  const double secs = seconds_since(start);
  return {worst < 1e-4 && batches >= 20 && secs < 10.0,
          "max rel err " + fmt(worst) + " over " + std::to_string(batches) + " batches (" + std::to_string(checked) +
              " coords), " + fmt(secs) + " s"};
}

Outcome edge_oracle() {
  const auto start = Clock::now();
  std::size_t cases = 0;
  for (std::size_t len = 1; len <= 64; ++len)
    for (std::size_t hop = 1; hop <= 4; ++hop) {
      const auto edges = build_edges(len, hop);
      std::size_t count = 0;
      for (std::size_t k = 1; k <= hop; ++k) count += 2 * (len > k ? len - k : 0);
      if (edges != brute_force_edges(len, hop) || edges.size() != count || edge_count(len, hop) != count) {
        return {false, "mismatch at L=" + std::to_string(len) + " n=" + std::to_string(hop)};
      }
      ++cases;
    }
  const double secs = seconds_since(start);
  return {secs < 1.0, std::to_string(cases) + " (L, n) pairs, " + fmt(secs) + " s"};
}

Outcome attention_normalization() {
  Rng rng(102);
  double worst = 0.0;
  bool nonneg = true;
  std::size_t isolated = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const std::size_t in = 1 + rng.below(10);
    const ModelParams p = random_params(in, 1 + rng.below(8), 2, rng);
    // Random directed edge sets leave some nodes without neighbours.
    std::vector<Edge> edges;
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t j = 0; j < n; ++j)
        if (i != j && rng.uniform() < 0.25) edges.push_back({i, j});
    const auto fwd = gat_forward(random_matrix(n, in, rng, 3.0), edges, p.layer1);
    const auto& c = fwd.cache;
    for (std::size_t i = 0; i < n; ++i) {
      if (c.row_ptr[i + 1] - c.row_ptr[i] == 1) ++isolated;
      double sum = 0.0;
      for (std::size_t k = c.row_ptr[i]; k < c.row_ptr[i + 1]; ++k) {
        nonneg = nonneg && c.alpha[k] >= 0.0;
        sum += c.alpha[k];
      }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  return {worst <= 1e-12 && nonneg && isolated > 0,
          "max |sum-1| " + fmt(worst) + ", " + std::to_string(isolated) + " isolated nodes"};
}

Outcome permutation_invariance() {
  Rng rng(103);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 1 + rng.below(32);
    const ModelParams p = random_params(dim, 1 + rng.below(16), 2 + rng.below(3), rng);
    const TokenGraph g = random_graph(1 + rng.below(20), dim, 1 + rng.below(4), 0, rng);
    std::vector<std::uint32_t> perm(g.num_nodes());
    std::iota(perm.begin(), perm.end(), 0u);
    rng.shuffle(perm);
    std::vector<TokenGraph> a = {g}, b = {permute_graph(g, perm)};
    worst = std::max(worst, (model_forward(collate(a), p).logits - model_forward(collate(b), p).logits)
                                .cwiseAbs()
                                .maxCoeff());
  }
  return {worst < 1e-9, "max |dlogit| " + fmt(worst) + " over 100 relabelings"};
}

Outcome loss_anchors() {
  double worst = 0.0;
  for (int c : {2, 4, 8}) {
    const std::vector<int> labels = {0, c - 1};
    const double loss = softmax_cross_entropy(Matrix::Constant(2, c, -3.25), labels).loss;
    worst = std::max(worst, std::abs(loss - std::log(static_cast<double>(c))));
  }
  Matrix extreme(2, 2);
  extreme << 1000, -1000, 1000, -1000;
  const std::vector<int> labels = {0, 1};
  const auto r = softmax_cross_entropy(extreme, labels);
  const bool finite = std::isfinite(r.loss) && r.grad_logits.allFinite();
  return {worst <= 1e-12 && finite, "max |loss-lnC| " + fmt(worst) + ", extreme loss " + fmt(r.loss)};
}

Outcome shard_round_trip() {
  TempDir dir;
  Rng rng(104);
  std::size_t shards = 0;
  for (int trial = 0; trial < 40; ++trial) {
    EmbeddingShard shard;
    const std::size_t records = trial == 0 ? 0 : rng.below(12);
    const std::size_t dim = 1 + rng.below(40);
    for (std::size_t r = 0; r < records; ++r) {
      const std::size_t len = rng.below(6);  // zero-token records included
      std::vector<TokenId> ids(len);
      for (auto& t : ids) t = static_cast<TokenId>(rng.below(1ULL << 32));
      FloatMatrix values(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(dim));
      for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double u = rng.uniform();
        // Mix in signed zeros and subnormals to exercise bit-exactness.
        values.data()[i] = u < 0.05   ? -0.0f
                           : u < 0.1  ? std::numeric_limits<float>::denorm_min() * static_cast<float>(1 + rng.below(9))
                                      : static_cast<float>(rng.uniform(-5.0, 5.0));
      }
      shard.add({rng.below(1ULL << 63), std::move(ids), std::move(values)});
    }
    const auto path = dir / ("s" + std::to_string(trial) + ".tgeb");
    write_shard(shard, path);
    const EmbeddingShard back = read_shard(path);
    if (!(back == shard) || encode_shard(back) != read_bytes(path)) {
      return {false, "shard " + std::to_string(trial) + " differs after round-trip"};
    }
    ++shards;
  }
  return {true, std::to_string(shards) + " shards (incl. empty) bit-identical"};
}

Outcome determinism() {
  TempDir dir;
  auto run = [](std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (code != 0) throw std::runtime_error(err.str());
  };
  const std::string data = (dir / "d.jsonl").string(), vocab = (dir / "v.txt").string(),
                    shard = (dir / "e.tgeb").string(), manifest = (dir / "m.jsonl").string(),
                    config = (dir / "c.json").string();
  run({"synth", "--per-class", "60", "--seed", "5", "--out-data", data, "--out-vocab", vocab});
  run({"embed-fallback", "--data", data, "--vocab", vocab, "--dim", "64", "--out-shard", shard, "--out-manifest",
       manifest});
  write_text(config, R"({"epochs": 15, "hidden_dim": 32, "strict_determinism": true})");
  for (const char* name : {"r1.json", "r2.json"}) {
    run({"train", "--shard", shard, "--manifest", manifest, "--config", config, "--out-report", (dir / name).string(),
         "--out-model", (dir / (std::string(name) + ".tgmp")).string()});
  }
  const bool same_report = read_bytes(dir / "r1.json") == read_bytes(dir / "r2.json");
  const bool same_model = read_bytes(dir / "r1.json.tgmp") == read_bytes(dir / "r2.json.tgmp");
  return {same_report && same_model,
          std::string("reports ") + (same_report ? "identical" : "differ") + ", checkpoints " +
              (same_model ? "identical" : "differ") + " (5 seeds, 15 epochs)"};
}

Outcome end_to_end() {
  const auto start = Clock::now();
  const SyntheticData synth = generate_synthetic({});
  const EmbeddedDataset data = embed_dataset(synth.samples, Vocab(synth.vocab), 768, 0);
  const TrainConfig config;  // defaults throughout
  const RunReport report = run_experiment(data.shard, data.manifest, config).report;
  const double secs = seconds_since(start);
  const bool ok = report.seeds.size() == 5 && report.test_accuracy.mean >= 0.90 && report.test_accuracy.std <= 0.05 &&
                  secs < 300.0;
  return {ok, "mean acc " + fmt(report.test_accuracy.mean) + ", std " + fmt(report.test_accuracy.std) +
                  ", macro-F1 " + fmt(report.test_macro_f1.mean) + ", " + fmt(secs) + " s"};
}

Outcome metrics_oracle() {
  const std::vector<int> preds = {0, 0, 1, 1}, golds = {0, 1, 1, 1};
  const double f1 = macro_f1(preds, golds, 2);
  const bool f1_ok = std::abs(f1 - 11.0 / 15.0) <= 1e-9;
  double worst = 0.0;
  for (const auto& c : welch_oracles()) worst = std::max(worst, std::abs(welch_t_test(c.a, c.b).p - c.p));
  return {f1_ok && worst <= 1e-6 && welch_oracles().size() == 10,
          "macro-F1 " + fmt(f1) + ", max |dp| " + fmt(worst) + " over " + std::to_string(welch_oracles().size()) +
              " pairs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient-correctness", gradient_correctness},
      {"edge-rule-oracle", edge_oracle},
      {"attention-normalization", attention_normalization},
      {"permutation-invariance", permutation_invariance},
      {"loss-anchors", loss_anchors},
      {"shard-round-trip", shard_round_trip},
      {"determinism", determinism},
      {"end-to-end-learning", end_to_end},
      {"metrics-oracle", metrics_oracle},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.ok ? 0 : 1;
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
