// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tokengraph/tokenizer.hpp"

namespace tokengraph {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct Edge {
  std::uint32_t src;
  std::uint32_t dst;
  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

/// All ordered pairs (u, v) with 1 <= |u - v| <= n_hop over a linear chain,
/// sorted by (src, dst). No wrap-around and no self-loops.
std::vector<Edge> build_edges(std::size_t seq_len, std::size_t n_hop);

/// Closed-form count 2 * sum_{k=1..n_hop} max(0, seq_len - k).
std::size_t edge_count(std::size_t seq_len, std::size_t n_hop);

/// One text sample as a graph: a node per token, n-hop sequential edges.
struct TokenGraph {
  SampleId sample_id = 0;
  std::vector<TokenId> node_token_ids;
  Matrix features;  // N x d
  std::vector<Edge> edges;
  std::optional<int> label;

  std::size_t num_nodes() const { return node_token_ids.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
};

TokenGraph build_graph(SampleId sample_id, std::span<const TokenId> token_ids, Matrix features,
                       std::size_t n_hop = 1, std::optional<int> label = std::nullopt);

TokenGraph build_graph(const TokenSequence& seq, Matrix features, std::size_t n_hop = 1,
                       std::optional<int> label = std::nullopt);

/// Disjoint union of graphs with nodes stacked in input order.
struct GraphBatch {
  Matrix features;                       // total_nodes x d
  std::vector<Edge> edges;               // indices into the stacked node set
  std::vector<std::uint32_t> membership; // node -> graph index
  std::vector<std::size_t> offsets;      // graph g owns rows [offsets[g], offsets[g + 1])
  std::vector<int> labels;               // empty unless every graph is labeled

  std::size_t num_graphs() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::size_t num_nodes() const { return membership.size(); }
};

GraphBatch collate(std::span<const TokenGraph* const> graphs);
GraphBatch collate(std::span<const TokenGraph> graphs);

/// Inverse of collate for node features.
std::vector<Matrix> split_features(const GraphBatch& batch);

}  // namespace tokengraph
