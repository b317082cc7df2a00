// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#include "tokengraph/graph.hpp"

#include <string>

#include "tokengraph/error.hpp"

namespace tokengraph {

std::vector<Edge> build_edges(std::size_t seq_len, std::size_t n_hop) {
  if (seq_len == 0) throw ValidationError("build_edges: seq_len must be >= 1");
  if (n_hop == 0) throw ValidationError("build_edges: n_hop must be >= 1");
  std::vector<Edge> edges;
  edges.reserve(edge_count(seq_len, n_hop));
  for (std::size_t u = 0; u < seq_len; ++u) {
    const std::size_t lo = u > n_hop ? u - n_hop : 0;
    const std::size_t hi = std::min(seq_len - 1, u + n_hop);
    for (std::size_t v = lo; v <= hi; ++v) {
      if (v != u) edges.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)});
    }
  }
  return edges;
}

std::size_t edge_count(std::size_t seq_len, std::size_t n_hop) {
  std::size_t total = 0;
  for (std::size_t k = 1; k <= n_hop && k < seq_len; ++k) total += seq_len - k;
  return 2 * total;
}

TokenGraph build_graph(SampleId sample_id, std::span<const TokenId> token_ids, Matrix features,
                       std::size_t n_hop, std::optional<int> label) {
  if (token_ids.empty()) throw ValidationError("build_graph: empty token sequence");
  if (static_cast<std::size_t>(features.rows()) != token_ids.size()) {
    throw ShapeError("build_graph: sample " + std::to_string(sample_id) + " has " +
                     std::to_string(token_ids.size()) + " tokens but " +
                     std::to_string(features.rows()) + " feature rows");
  }
  if (features.cols() == 0) throw ShapeError("build_graph: feature dimension is zero");
  TokenGraph g;
  g.sample_id = sample_id;
  g.node_token_ids.assign(token_ids.begin(), token_ids.end());
  g.features = std::move(features);
  g.edges = build_edges(token_ids.size(), n_hop);
  g.label = label;
  return g;
}

TokenGraph build_graph(const TokenSequence& seq, Matrix features, std::size_t n_hop,
                       std::optional<int> label) {
  const auto ids = seq.ids();
  return build_graph(seq.sample_id, ids, std::move(features), n_hop, label);
}

GraphBatch collate(std::span<const TokenGraph* const> graphs) {
  if (graphs.empty()) throw ValidationError("collate: empty batch");
  const auto dim = graphs.front()->features.cols();
  std::size_t total_nodes = 0;
  std::size_t total_edges = 0;
  bool all_labeled = true;
  for (const TokenGraph* g : graphs) {
    if (g->features.cols() != dim) {
      throw ShapeError("collate: mixed feature dimensions " + std::to_string(dim) + " and " +
                       std::to_string(g->features.cols()));
    }
    total_nodes += g->num_nodes();
    total_edges += g->edges.size();
    all_labeled = all_labeled && g->label.has_value();
  }

  GraphBatch batch;
  batch.features.resize(static_cast<Eigen::Index>(total_nodes), dim);
  batch.edges.reserve(total_edges);
  batch.membership.reserve(total_nodes);
  batch.offsets.reserve(graphs.size() + 1);
  batch.offsets.push_back(0);
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const TokenGraph& g = *graphs[gi];
    const std::size_t offset = batch.offsets.back();
    batch.features.middleRows(static_cast<Eigen::Index>(offset), g.features.rows()) = g.features;
    for (const Edge& e : g.edges) {
      batch.edges.push_back({static_cast<std::uint32_t>(e.src + offset),
                             static_cast<std::uint32_t>(e.dst + offset)});
    }
    batch.membership.insert(batch.membership.end(), g.num_nodes(), static_cast<std::uint32_t>(gi));
    batch.offsets.push_back(offset + g.num_nodes());
    if (all_labeled) batch.labels.push_back(*g.label);
  }
  return batch;
}

GraphBatch collate(std::span<const TokenGraph> graphs) {
  std::vector<const TokenGraph*> ptrs;
  ptrs.reserve(graphs.size());
  for (const auto& g : graphs) ptrs.push_back(&g);
  return collate(std::span<const TokenGraph* const>(ptrs));
}

std::vector<Matrix> split_features(const GraphBatch& batch) {
  std::vector<Matrix> out;
  out.reserve(batch.num_graphs());
  for (std::size_t g = 0; g < batch.num_graphs(); ++g) {
    const auto begin = static_cast<Eigen::Index>(batch.offsets[g]);
    const auto rows = static_cast<Eigen::Index>(batch.offsets[g + 1]) - begin;
    out.emplace_back(batch.features.middleRows(begin, rows));
  }
  return out;
}

}  // namespace tokengraph
