// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#include "tokengraph/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "byte_io.hpp"
#include "tokengraph/error.hpp"
#include "tokengraph/rng.hpp"

namespace tokengraph {
namespace {

using Index = Eigen::Index;

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void glorot_fill(std::span<double> values, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : values) v = rng.uniform(-limit, limit);
}

std::span<double> span_of(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> span_of(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const double> span_of(const Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<const double> span_of(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

double leaky(double x) { return x > 0.0 ? x : kLeakySlope * x; }
double leaky_slope(double x) { return x > 0.0 ? 1.0 : kLeakySlope; }

void check_layer(const GatLayerParams& p, const char* name) {
  const auto out = p.weight.rows();
  if (p.att_center.size() != out || p.att_neighbor.size() != out || p.bias.size() != out) {
    throw ShapeError(std::string(name) + ": attention/bias length disagrees with weight rows " +
                     std::to_string(out));
  }
}

}  // namespace

ModelParams ModelParams::zeros(std::size_t in_dim, std::size_t hidden, std::size_t classes) {
  if (in_dim == 0 || hidden == 0 || classes == 0) {
    throw ValidationError("model dimensions must be positive");
  }
  ModelParams p;
  auto shape_layer = [](GatLayerParams& l, std::size_t in, std::size_t out) {
    l.weight = Matrix::Zero(static_cast<Index>(out), static_cast<Index>(in));
    l.att_center = Vector::Zero(static_cast<Index>(out));
    l.att_neighbor = Vector::Zero(static_cast<Index>(out));
    l.bias = Vector::Zero(static_cast<Index>(out));
  };
  shape_layer(p.layer1, in_dim, hidden);
  shape_layer(p.layer2, hidden, hidden);
  p.out_weight = Matrix::Zero(static_cast<Index>(classes), static_cast<Index>(hidden));
  p.out_bias = Vector::Zero(static_cast<Index>(classes));
  return p;
}

ModelParams ModelParams::glorot(std::size_t in_dim, std::size_t hidden, std::size_t classes, std::uint64_t seed) {
  ModelParams p = zeros(in_dim, hidden, classes);
  Rng rng(seed);
  for (GatLayerParams* l : {&p.layer1, &p.layer2}) {
    glorot_fill(span_of(l->weight), l->in_dim(), l->out_dim(), rng);
    // The attention vector is treated as a 1 x out matrix per half.
    glorot_fill(span_of(l->att_center), 1, l->out_dim(), rng);
    glorot_fill(span_of(l->att_neighbor), 1, l->out_dim(), rng);
  }
  glorot_fill(span_of(p.out_weight), hidden, classes, rng);
  return p;
}

ModelParams ModelParams::zeros_like(const ModelParams& other) {
  ModelParams p = other;
  for (auto& b : p.blocks()) std::fill(b.values.begin(), b.values.end(), 0.0);
  return p;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks()) n += b.values.size();
  return n;
}

std::vector<ParamBlock> ModelParams::blocks() {
  return {{"layer1.weight", span_of(layer1.weight)},
          {"layer1.att_center", span_of(layer1.att_center)},
          {"layer1.att_neighbor", span_of(layer1.att_neighbor)},
          {"layer1.bias", span_of(layer1.bias)},
          {"layer2.weight", span_of(layer2.weight)},
          {"layer2.att_center", span_of(layer2.att_center)},
          {"layer2.att_neighbor", span_of(layer2.att_neighbor)},
          {"layer2.bias", span_of(layer2.bias)},
          {"out.weight", span_of(out_weight)},
          {"out.bias", span_of(out_bias)}};
}

std::vector<ConstParamBlock> ModelParams::blocks() const {
  return {{"layer1.weight", span_of(layer1.weight)},
          {"layer1.att_center", span_of(layer1.att_center)},
          {"layer1.att_neighbor", span_of(layer1.att_neighbor)},
          {"layer1.bias", span_of(layer1.bias)},
          {"layer2.weight", span_of(layer2.weight)},
          {"layer2.att_center", span_of(layer2.att_center)},
          {"layer2.att_neighbor", span_of(layer2.att_neighbor)},
          {"layer2.bias", span_of(layer2.bias)},
          {"out.weight", span_of(out_weight)},
          {"out.bias", span_of(out_bias)}};
}

void ModelParams::check_shapes() const {
  check_layer(layer1, "layer1");
  check_layer(layer2, "layer2");
  if (layer2.in_dim() != layer1.out_dim()) {
    throw ShapeError("layer2 input " + std::to_string(layer2.in_dim()) + " != layer1 output " +
                     std::to_string(layer1.out_dim()));
  }
  if (static_cast<std::size_t>(out_weight.cols()) != layer2.out_dim() || out_bias.size() != out_weight.rows()) {
    throw ShapeError("output layer shape " + shape_str(out_weight) + " disagrees with hidden " +
                     std::to_string(layer2.out_dim()));
  }
}

bool ModelParams::all_finite() const {
  for (const auto& b : blocks()) {
    for (double v : b.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

bool bitwise_equal(const ModelParams& a, const ModelParams& b) {
  const auto ba = a.blocks();
  const auto bb = b.blocks();
  if (ba.size() != bb.size()) return false;
  for (std::size_t i = 0; i < ba.size(); ++i) {
    if (ba[i].values.size() != bb[i].values.size()) return false;
    if (std::memcmp(ba[i].values.data(), bb[i].values.data(), ba[i].values.size_bytes()) != 0) return false;
  }
  return a.layer1.weight.rows() == b.layer1.weight.rows() && a.out_weight.rows() == b.out_weight.rows();
}

GatForward gat_forward(const Matrix& x, std::span<const Edge> edges, const GatLayerParams& params) {
  check_layer(params, "gat_forward");
  if (x.cols() != params.weight.cols()) {
    throw ShapeError("gat_forward: input " + shape_str(x) + " does not match weight " + shape_str(params.weight));
  }
  if (!x.allFinite()) throw ValidationError("gat_forward: non-finite input features");
  const auto n = static_cast<std::size_t>(x.rows());

  GatForward fwd;
  GatCache& c = fwd.cache;
  c.input = x;
  c.projected = x * params.weight.transpose();

  // CSR adjacency; the self-loop goes last in each row.
  c.row_ptr.assign(n + 1, 0);
  for (const Edge& e : edges) {
    if (e.src >= n || e.dst >= n) {
      throw ShapeError("gat_forward: edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                       ") out of range for " + std::to_string(n) + " nodes");
    }
    if (e.src == e.dst) throw ValidationError("gat_forward: stored self-loop at node " + std::to_string(e.src));
    ++c.row_ptr[e.src + 1];
  }
  for (std::size_t i = 0; i < n; ++i) c.row_ptr[i + 1] += c.row_ptr[i] + 1;
  c.col.assign(c.row_ptr[n], 0);
  std::vector<std::size_t> fill(c.row_ptr.begin(), c.row_ptr.end() - 1);
  for (const Edge& e : edges) c.col[fill[e.src]++] = e.dst;
  for (std::size_t i = 0; i < n; ++i) c.col[c.row_ptr[i + 1] - 1] = static_cast<std::uint32_t>(i);

  const Vector center = c.projected * params.att_center;
  const Vector neighbor = c.projected * params.att_neighbor;
  c.raw_score.resize(c.col.size());
  c.alpha.resize(c.col.size());
  fwd.output.resize(x.rows(), params.weight.rows());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t begin = c.row_ptr[i];
    const std::size_t end = c.row_ptr[i + 1];
    double max_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k = begin; k < end; ++k) {
      c.raw_score[k] = center(static_cast<Index>(i)) + neighbor(c.col[k]);
      max_score = std::max(max_score, leaky(c.raw_score[k]));
    }
    double total = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      c.alpha[k] = std::exp(leaky(c.raw_score[k]) - max_score);
      total += c.alpha[k];
    }
    auto out_row = fwd.output.row(static_cast<Index>(i));
    out_row = params.bias.transpose();
    for (std::size_t k = begin; k < end; ++k) {
      c.alpha[k] /= total;
      out_row += c.alpha[k] * c.projected.row(c.col[k]);
    }
  }
  return fwd;
}

GatGradients gat_backward(const GatCache& c, const Matrix& grad_output, const GatLayerParams& params,
                          const BackwardOptions& options) {
  if (grad_output.rows() != c.projected.rows() || grad_output.cols() != c.projected.cols()) {
    throw ShapeError("gat_backward: gradient " + shape_str(grad_output) + " does not match cached output " +
                     shape_str(c.projected));
  }
  const auto n = static_cast<std::size_t>(c.projected.rows());

  GatGradients g;
  g.params.bias = grad_output.colwise().sum().transpose();

  Matrix grad_z = Matrix::Zero(c.projected.rows(), c.projected.cols());
  Vector grad_center = Vector::Zero(static_cast<Index>(n));
  Vector grad_neighbor = Vector::Zero(static_cast<Index>(n));
  std::vector<double> grad_alpha;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t begin = c.row_ptr[i];
    const std::size_t end = c.row_ptr[i + 1];
    const auto gi = grad_output.row(static_cast<Index>(i));
    grad_alpha.assign(end - begin, 0.0);
    double weighted = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      const auto j = static_cast<Index>(c.col[k]);
      grad_z.row(j) += c.alpha[k] * gi;
      grad_alpha[k - begin] = gi.dot(c.projected.row(j));
      weighted += c.alpha[k] * grad_alpha[k - begin];
    }
    if (options.drop_attention_gradient) continue;
    for (std::size_t k = begin; k < end; ++k) {
      const double grad_score = c.alpha[k] * (grad_alpha[k - begin] - weighted);
      const double grad_raw = grad_score * leaky_slope(c.raw_score[k]);
      grad_center(static_cast<Index>(i)) += grad_raw;
      grad_neighbor(c.col[k]) += grad_raw;
    }
  }
  g.params.att_center = c.projected.transpose() * grad_center;
  g.params.att_neighbor = c.projected.transpose() * grad_neighbor;
  grad_z.noalias() += grad_center * params.att_center.transpose();
  grad_z.noalias() += grad_neighbor * params.att_neighbor.transpose();

  g.params.weight = grad_z.transpose() * c.input;
  if (options.input_gradient) g.input = grad_z * params.weight;
  return g;
}

double elu(double x) { return x > 0.0 ? x : std::expm1(x); }

Matrix elu(const Matrix& x) {
  return x.unaryExpr([](double v) { return elu(v); });
}

Matrix mean_pool(const Matrix& h, std::span<const std::size_t> offsets) {
  if (offsets.size() < 2) throw ValidationError("mean_pool: no graphs");
  if (offsets.back() != static_cast<std::size_t>(h.rows())) {
    throw ShapeError("mean_pool: membership covers " + std::to_string(offsets.back()) + " rows, input has " +
                     std::to_string(h.rows()));
  }
  const std::size_t graphs = offsets.size() - 1;
  Matrix pooled(static_cast<Index>(graphs), h.cols());
  for (std::size_t g = 0; g < graphs; ++g) {
    if (offsets[g + 1] <= offsets[g]) throw ValidationError("mean_pool: graph " + std::to_string(g) + " is empty");
    const auto rows = static_cast<Index>(offsets[g + 1] - offsets[g]);
    pooled.row(static_cast<Index>(g)) =
        h.middleRows(static_cast<Index>(offsets[g]), rows).colwise().sum() / static_cast<double>(rows);
  }
  return pooled;
}

ModelForward model_forward(const GraphBatch& batch, const ModelParams& params) {
  params.check_shapes();
  if (static_cast<std::size_t>(batch.features.cols()) != params.in_dim()) {
    throw ShapeError("model_forward: batch feature dim " + std::to_string(batch.features.cols()) +
                     " != model input dim " + std::to_string(params.in_dim()));
  }
  ModelForward fwd;
  ModelCache& c = fwd.cache;
  auto first = gat_forward(batch.features, batch.edges, params.layer1);
  c.layer1 = std::move(first.cache);
  c.hidden1 = std::move(first.output);
  auto second = gat_forward(elu(c.hidden1), batch.edges, params.layer2);
  c.layer2 = std::move(second.cache);
  c.offsets = batch.offsets;
  c.pooled = mean_pool(second.output, c.offsets);
  fwd.logits = c.pooled * params.out_weight.transpose();
  fwd.logits.rowwise() += params.out_bias.transpose();
  return fwd;
}

std::vector<int> predict(const GraphBatch& batch, const ModelParams& params) {
  const Matrix logits = model_forward(batch, params).logits;
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Index r = 0; r < logits.rows(); ++r) {
    Index best = 0;
    for (Index k = 1; k < logits.cols(); ++k) {
      if (logits(r, k) > logits(r, best)) best = k;
    }
    out[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return out;
}

LossAndGradient softmax_cross_entropy(const Matrix& logits, std::span<const int> labels) {
  if (static_cast<std::size_t>(logits.rows()) != labels.size()) {
    throw ShapeError("softmax_cross_entropy: " + std::to_string(logits.rows()) + " rows but " +
                     std::to_string(labels.size()) + " labels");
  }
  if (logits.rows() == 0) throw ValidationError("softmax_cross_entropy: empty batch");
  const auto classes = logits.cols();
  const double rows = static_cast<double>(logits.rows());
  LossAndGradient out;
  out.grad_logits.resize(logits.rows(), classes);
  double total = 0.0;
  for (Index r = 0; r < logits.rows(); ++r) {
    const int label = labels[static_cast<std::size_t>(r)];
    if (label < 0 || label >= classes) {
      throw ValidationError("softmax_cross_entropy: label " + std::to_string(label) + " outside [0, " +
                            std::to_string(classes) + ")");
    }
    const double max_logit = logits.row(r).maxCoeff();
    double sum = 0.0;
    for (Index k = 0; k < classes; ++k) sum += std::exp(logits(r, k) - max_logit);
    const double log_norm = max_logit + std::log(sum);
    total += log_norm - logits(r, label);
    for (Index k = 0; k < classes; ++k) {
      const double prob = std::exp(logits(r, k) - log_norm);
      out.grad_logits(r, k) = (prob - (k == label ? 1.0 : 0.0)) / rows;
    }
  }
  out.loss = total / rows;
  return out;
}

ModelParams backward(const ModelCache& c, const Matrix& grad_logits, const ModelParams& params,
                     const BackwardOptions& options) {
  if (grad_logits.rows() != c.pooled.rows() || static_cast<std::size_t>(grad_logits.cols()) != params.classes()) {
    throw ShapeError("backward: gradient " + shape_str(grad_logits) + " does not match the cached batch");
  }
  ModelParams grads;
  grads.out_weight = grad_logits.transpose() * c.pooled;
  grads.out_bias = grad_logits.colwise().sum().transpose();

  const Matrix grad_pooled = grad_logits * params.out_weight;
  Matrix grad_h2(static_cast<Index>(c.offsets.back()), grad_pooled.cols());
  for (std::size_t g = 0; g + 1 < c.offsets.size(); ++g) {
    const auto rows = static_cast<Index>(c.offsets[g + 1] - c.offsets[g]);
    const auto scaled = (grad_pooled.row(static_cast<Index>(g)) / static_cast<double>(rows)).eval();
    grad_h2.middleRows(static_cast<Index>(c.offsets[g]), rows).rowwise() = scaled;
  }

  BackwardOptions second_options = options;
  second_options.input_gradient = true;
  GatGradients second = gat_backward(c.layer2, grad_h2, params.layer2, second_options);
  grads.layer2 = std::move(second.params);

  const Matrix grad_h1 = second.input.cwiseProduct(
      c.hidden1.unaryExpr([](double v) { return v > 0.0 ? 1.0 : std::exp(v); }));
  BackwardOptions first_options = options;
  first_options.input_gradient = false;
  grads.layer1 = gat_backward(c.layer1, grad_h1, params.layer1, first_options).params;
  return grads;
}

AdamState AdamState::for_params(const ModelParams& params) {
  return {ModelParams::zeros_like(params), ModelParams::zeros_like(params), 0};
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, const AdamConfig& config) {
  auto p_blocks = params.blocks();
  const auto g_blocks = grads.blocks();
  auto m_blocks = state.first_moment.blocks();
  auto v_blocks = state.second_moment.blocks();
  if (g_blocks.size() != p_blocks.size()) throw ShapeError("adam_step: gradient block count mismatch");
  for (std::size_t b = 0; b < p_blocks.size(); ++b) {
    if (g_blocks[b].values.size() != p_blocks[b].values.size() ||
        m_blocks[b].values.size() != p_blocks[b].values.size()) {
      throw ShapeError("adam_step: shape mismatch in " + std::string(p_blocks[b].name));
    }
    for (std::size_t i = 0; i < g_blocks[b].values.size(); ++i) {
      if (!std::isfinite(g_blocks[b].values[i])) {
        throw NumericError("adam_step: non-finite gradient in " + std::string(g_blocks[b].name) + "[" +
                           std::to_string(i) + "]");
      }
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t b = 0; b < p_blocks.size(); ++b) {
    auto p = p_blocks[b].values;
    auto g = g_blocks[b].values;
    auto m = m_blocks[b].values;
    auto v = v_blocks[b].values;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

namespace {

// Sign pattern of every LeakyReLU and ELU input seen by one forward pass.
std::vector<bool> kink_pattern(const ModelCache& c) {
  std::vector<bool> out;
  out.reserve(c.layer1.raw_score.size() + c.layer2.raw_score.size() + static_cast<std::size_t>(c.hidden1.size()));
  for (double s : c.layer1.raw_score) out.push_back(s > 0.0);
  for (double s : c.layer2.raw_score) out.push_back(s > 0.0);
  for (Index i = 0; i < c.hidden1.size(); ++i) out.push_back(c.hidden1.data()[i] > 0.0);
  return out;
}

}  // namespace

GradCheckResult grad_check(const GraphBatch& batch, const ModelParams& params, const GradCheckOptions& options) {
  if (batch.labels.size() != batch.num_graphs()) throw ValidationError("grad_check: batch must be fully labeled");
  const auto base = model_forward(batch, params);
  const auto loss = softmax_cross_entropy(base.logits, batch.labels);
  const ModelParams analytic = backward(base.cache, loss.grad_logits, params, options.backward);
  const auto base_pattern = kink_pattern(base.cache);

  ModelParams probe = params;
  auto probe_blocks = probe.blocks();
  const auto analytic_blocks = analytic.blocks();
  Rng rng(options.seed);
  GradCheckResult result;

  auto evaluate = [&](std::vector<bool>& pattern) {
    auto fwd = model_forward(batch, probe);
    pattern = kink_pattern(fwd.cache);
    return softmax_cross_entropy(fwd.logits, batch.labels).loss;
  };

  for (std::size_t b = 0; b < probe_blocks.size(); ++b) {
    auto values = probe_blocks[b].values;
    std::vector<std::size_t> coords(values.size());
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
    if (coords.size() > options.samples_per_block) {
      rng.shuffle(coords);
      coords.resize(options.samples_per_block);
    }
    for (std::size_t i : coords) {
      const double original = values[i];
      std::vector<bool> plus_pattern, minus_pattern;
      values[i] = original + options.step;
      const double plus = evaluate(plus_pattern);
      values[i] = original - options.step;
      const double minus = evaluate(minus_pattern);
      values[i] = original;
      if (plus_pattern != base_pattern || minus_pattern != base_pattern) {
        ++result.excluded;
        continue;
      }
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double exact = analytic_blocks[b].values[i];
      const double denom = std::max({std::abs(exact), std::abs(numeric), kGradCheckFloor});
      result.max_relative_error = std::max(result.max_relative_error, std::abs(exact - numeric) / denom);
      ++result.checked;
    }
  }
  return result;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint) {
  const ModelParams& p = checkpoint.params;
  p.check_shapes();
  if (!p.all_finite()) throw ValidationError("checkpoint: parameters contain non-finite values");
  detail::ByteWriter w;
  w.reserve(24 + 8 * p.parameter_count() + checkpoint.metadata.size());
  w.put_raw(kCheckpointMagic, 4);
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(p.in_dim()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(p.hidden()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(p.classes()));
  for (const auto& b : p.blocks()) w.put_all(b.values);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(checkpoint.metadata.size()));
  w.put_raw(checkpoint.metadata.data(), checkpoint.metadata.size());
  return std::move(w.bytes());
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "model checkpoint");
  if (std::memcmp(r.take(4, "magic"), kCheckpointMagic, 4) != 0) {
    throw FormatError("model checkpoint: bad magic (expected \"TGMP\")");
  }
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw FormatError("model checkpoint: unsupported version " + std::to_string(version));
  }
  const auto in_dim = r.get<std::uint32_t>("in_dim");
  const auto hidden = r.get<std::uint32_t>("hidden");
  const auto classes = r.get<std::uint32_t>("classes");
  if (in_dim == 0 || hidden == 0 || classes == 0) throw FormatError("model checkpoint: zero dimension");
  const std::uint64_t expected =
      8ULL * ((static_cast<std::uint64_t>(in_dim) + 3) * hidden + (hidden + 3ULL) * hidden +
              static_cast<std::uint64_t>(classes) * (hidden + 1));
  if (expected > r.remaining()) throw FormatError("model checkpoint: truncated parameter blocks");

  Checkpoint out;
  out.params = ModelParams::zeros(in_dim, hidden, classes);
  for (auto& b : out.params.blocks()) r.get_all(b.values, "parameters");
  const auto meta_len = r.get<std::uint32_t>("metadata length");
  const std::uint8_t* meta = r.take(meta_len, "metadata");
  out.metadata.assign(reinterpret_cast<const char*>(meta), meta_len);
  if (r.remaining() != 0) throw FormatError("model checkpoint: trailing bytes");
  return out;
}

void write_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  detail::write_file_bytes(path, encode_checkpoint(checkpoint));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(detail::read_file_bytes(path, "model checkpoint"));
}

}  // namespace tokengraph
