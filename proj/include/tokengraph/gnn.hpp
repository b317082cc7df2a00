// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#pragma once

// Two-layer single-head graph attention classifier with hand-derived gradients.
//
//   H1     = gat1(X)            in_dim -> hidden
//   A1     = elu(H1)
//   H2     = gat2(A1)           hidden -> hidden
//   P      = mean_pool(H2)      one row per graph
//   logits = P * out_W^T + out_b
//
// A GAT layer computes z_i = W x_i, scores every j in N(i) + {i} with
// e_ij = leaky_relu(att_center . z_i + att_neighbor . z_j, 0.2), normalizes
// with a softmax over j and returns h_i = sum_j alpha_ij z_j + bias. The
// self-loop is added here; stored graphs never contain one.
//
// All arithmetic is double precision and single-threaded.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tokengraph/graph.hpp"

namespace tokengraph {

inline constexpr double kLeakySlope = 0.2;

struct GatLayerParams {
  Matrix weight;        // out x in
  Vector att_center;    // out, scores the aggregating node
  Vector att_neighbor;  // out, scores the neighbor being aggregated
  Vector bias;          // out

  std::size_t in_dim() const { return static_cast<std::size_t>(weight.cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(weight.rows()); }
};

/// A named, contiguous view of one parameter tensor.
struct ParamBlock {
  std::string_view name;
  std::span<double> values;
};
struct ConstParamBlock {
  std::string_view name;
  std::span<const double> values;
};

struct ModelParams {
  GatLayerParams layer1;
  GatLayerParams layer2;
  Matrix out_weight;  // classes x hidden
  Vector out_bias;    // classes

  /// Glorot-uniform weights and attention vectors, zero biases.
  static ModelParams glorot(std::size_t in_dim, std::size_t hidden, std::size_t classes, std::uint64_t seed);
  static ModelParams zeros(std::size_t in_dim, std::size_t hidden, std::size_t classes);
  /// Same shapes, every entry zero.
  static ModelParams zeros_like(const ModelParams& other);

  std::size_t in_dim() const { return layer1.in_dim(); }
  std::size_t hidden() const { return layer1.out_dim(); }
  std::size_t classes() const { return static_cast<std::size_t>(out_weight.rows()); }
  std::size_t parameter_count() const;

  /// Blocks in checkpoint order: layer1 {weight, att_center, att_neighbor, bias},
  /// layer2 {same}, out_weight, out_bias.
  std::vector<ParamBlock> blocks();
  std::vector<ConstParamBlock> blocks() const;

  /// Throws ShapeError when the blocks disagree with each other.
  void check_shapes() const;
  bool all_finite() const;
};

bool bitwise_equal(const ModelParams& a, const ModelParams& b);

/// Per-layer intermediates kept for the backward pass. Attention entries are
/// stored in CSR order: node i owns [row_ptr[i], row_ptr[i + 1]), the last of
/// which is its self-loop.
struct GatCache {
  Matrix input;                       // N x in
  Matrix projected;                   // N x out (z)
  std::vector<std::size_t> row_ptr;   // N + 1
  std::vector<std::uint32_t> col;     // neighbor index per entry
  std::vector<double> raw_score;      // pre-LeakyReLU score per entry
  std::vector<double> alpha;          // attention weight per entry
};

struct GatForward {
  Matrix output;
  GatCache cache;
};

/// Throws ShapeError on dimension mismatches or out-of-range edges and
/// ValidationError on non-finite input.
GatForward gat_forward(const Matrix& x, std::span<const Edge> edges, const GatLayerParams& params);

struct GatGradients {
  GatLayerParams params;
  Matrix input;  // dL/dX, empty unless requested
};

struct BackwardOptions {
  bool input_gradient = false;
  /// Drops the attention-softmax term from the gradient. Only for exercising
  /// the gradient checker; never set in training.
  bool drop_attention_gradient = false;
};

GatGradients gat_backward(const GatCache& cache, const Matrix& grad_output, const GatLayerParams& params,
                          const BackwardOptions& options = {});

double elu(double x);
Matrix elu(const Matrix& x);

/// Mean of each graph's rows. Throws ValidationError for a graph with no rows.
Matrix mean_pool(const Matrix& h, std::span<const std::size_t> offsets);

struct ModelCache {
  GatCache layer1;
  Matrix hidden1;  // pre-ELU output of layer 1
  GatCache layer2;
  Matrix pooled;
  std::vector<std::size_t> offsets;
};

struct ModelForward {
  Matrix logits;  // graphs x classes
  ModelCache cache;
};

ModelForward model_forward(const GraphBatch& batch, const ModelParams& params);

/// Argmax per row, lowest index on ties.
std::vector<int> predict(const GraphBatch& batch, const ModelParams& params);

struct LossAndGradient {
  double loss = 0.0;
  Matrix grad_logits;
};

/// Mean over rows of -log softmax(logits)[label], stabilized with log-sum-exp.
LossAndGradient softmax_cross_entropy(const Matrix& logits, std::span<const int> labels);

/// Gradient of the loss behind grad_logits with respect to every parameter.
ModelParams backward(const ModelCache& cache, const Matrix& grad_logits, const ModelParams& params,
                     const BackwardOptions& options = {});

struct AdamConfig {
  double learning_rate = 5e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  ModelParams first_moment;
  ModelParams second_moment;
  std::uint64_t step = 0;

  static AdamState for_params(const ModelParams& params);
};

/// One bias-corrected Adam update in place. Throws NumericError, leaving
/// params and state untouched, when any gradient is non-finite.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, const AdamConfig& config = {});

// Denominator floor for relative error; central differences at h=1e-5 carry
// ~1e-11 absolute roundoff, so smaller gradients are compared absolutely.
inline constexpr double kGradCheckFloor = 1e-6;

struct GradCheckOptions {
  double step = 1e-5;
  std::size_t samples_per_block = 32;
  std::uint64_t seed = 0;
  BackwardOptions backward;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  /// Coordinates whose perturbation flipped a LeakyReLU or ELU input across zero.
  std::size_t excluded = 0;
};

/// Compares analytic gradients of the mean cross-entropy against central
/// differences on a seeded sample of coordinates from every block. Relative
/// error is |a - n| / max(|a|, |n|, 1e-8).
GradCheckResult grad_check(const GraphBatch& batch, const ModelParams& params, const GradCheckOptions& options = {});

// Checkpoint layout, little-endian:
//
//   "TGMP" | version u32 (=1) | in_dim u32 | hidden u32 | classes u32
//   f64 blocks in ModelParams::blocks() order (matrices row-major)
//   metadata byte length u32 | metadata UTF-8 JSON
inline constexpr char kCheckpointMagic[4] = {'T', 'G', 'M', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelParams params;
  std::string metadata;  // JSON text owned by the caller
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);
void write_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
/// ValidationError when the file is missing, FormatError when malformed.
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace tokengraph
