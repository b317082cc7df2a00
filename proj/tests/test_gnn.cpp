// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "test_util.hpp"
#include "tokengraph/error.hpp"
#include "tokengraph/gnn.hpp"

using namespace tokengraph;
using namespace tokengraph::testing;

namespace {

// Dense adjacency, explicit loops, textbook formulas.
std::vector<std::vector<double>> reference_gat(const Matrix& x, const std::vector<Edge>& edges,
                                               const GatLayerParams& p) {
  const std::size_t n = static_cast<std::size_t>(x.rows());
  const std::size_t in = static_cast<std::size_t>(x.cols());
  const std::size_t out = p.out_dim();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (const Edge& e : edges) adj[e.src][e.dst] = true;
  for (std::size_t i = 0; i < n; ++i) adj[i][i] = true;

  std::vector<std::vector<double>> z(n, std::vector<double>(out, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t o = 0; o < out; ++o)
      for (std::size_t k = 0; k < in; ++k) z[i][o] += p.weight(o, k) * x(i, k);

  std::vector<std::vector<double>> h(n, std::vector<double>(out, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n, -std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < n; ++j) {
      if (!adj[i][j]) continue;
      double s = 0.0;
      for (std::size_t o = 0; o < out; ++o) s += p.att_center(o) * z[i][o] + p.att_neighbor(o) * z[j][o];
      e[j] = s > 0 ? s : 0.2 * s;
    }
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (adj[i][j]) denom += std::exp(e[j]);
    for (std::size_t j = 0; j < n; ++j) {
      if (!adj[i][j]) continue;
      const double a = std::exp(e[j]) / denom;
      for (std::size_t o = 0; o < out; ++o) h[i][o] += a * z[j][o];
    }
    for (std::size_t o = 0; o < out; ++o) h[i][o] += p.bias(o);
  }
  return h;
}

GraphBatch random_batch(std::size_t graphs, std::size_t max_nodes, std::size_t dim, std::size_t n_hop,
                        std::size_t classes, Rng& rng) {
  std::vector<TokenGraph> gs;
  for (std::size_t g = 0; g < graphs; ++g) {
    gs.push_back(random_graph(1 + rng.below(max_nodes), dim, n_hop, static_cast<int>(rng.below(classes)), rng));
  }
  return collate(gs);
}

}  // namespace

TEST_CASE("gat_forward matches a dense reference implementation") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    const std::size_t in = 1 + rng.below(6);
    const std::size_t out = 1 + rng.below(5);
    const ModelParams mp = random_params(in, out, 2, rng);
    const Matrix x = random_matrix(n, in, rng);
    const auto edges = build_edges(n, 1 + rng.below(3));
    const auto fwd = gat_forward(x, edges, mp.layer1);
    const auto ref = reference_gat(x, edges, mp.layer1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t o = 0; o < out; ++o) REQUIRE(std::abs(fwd.output(i, o) - ref[i][o]) < 1e-12);
  }
}

TEST_CASE("gat_forward edge cases") {
  Rng rng(12);
  const ModelParams mp = random_params(4, 3, 2, rng);
  const GatLayerParams& layer = mp.layer1;

  SUBCASE("isolated node attends only to itself") {
    const Matrix x = random_matrix(1, 4, rng);
    const auto fwd = gat_forward(x, {}, layer);
    REQUIRE(fwd.cache.alpha.size() == 1);
    CHECK(fwd.cache.alpha[0] == 1.0);
    const Matrix expected = x * layer.weight.transpose() + layer.bias.transpose();
    CHECK((fwd.output - expected).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("identical connected nodes give identical rows") {
    Matrix x(2, 4);
    x.row(0) = random_matrix(1, 4, rng);
    x.row(1) = x.row(0);
    const auto fwd = gat_forward(x, build_edges(2, 1), layer);
    CHECK(fwd.output.row(0) == fwd.output.row(1));
  }
  SUBCASE("attention rows are normalized on a chain") {
    const auto fwd = gat_forward(random_matrix(5, 4, rng), build_edges(5, 1), layer);
    const auto& c = fwd.cache;
    for (std::size_t i = 0; i < 5; ++i) {
      double sum = 0.0;
      for (std::size_t k = c.row_ptr[i]; k < c.row_ptr[i + 1]; ++k) {
        CHECK(c.alpha[k] >= 0.0);
        sum += c.alpha[k];
      }
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(gat_forward(random_matrix(2, 5, rng), {}, layer), ShapeError);
    CHECK_THROWS_AS(gat_forward(random_matrix(2, 4, rng), std::vector<Edge>{{0, 2}}, layer), ShapeError);
    CHECK_THROWS_AS(gat_forward(random_matrix(2, 4, rng), std::vector<Edge>{{1, 1}}, layer), ValidationError);
    Matrix bad = random_matrix(2, 4, rng);
    bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(gat_forward(bad, {}, layer), ValidationError);
  }
  SUBCASE("softmax stays finite for huge scores") {
    ModelParams big = mp;
    big.layer1.att_center *= 1e6;
    big.layer1.att_neighbor *= 1e6;
    const auto fwd = gat_forward(random_matrix(4, 4, rng, 10.0), build_edges(4, 2), big.layer1);
    CHECK(fwd.output.allFinite());
  }
}

TEST_CASE("elu") {
  CHECK(elu(0.0) == 0.0);
  CHECK(elu(1.0) == 1.0);
  CHECK(elu(-std::log(2.0)) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(elu(-50.0) == doctest::Approx(-1.0));
}

TEST_CASE("mean_pool") {
  Matrix h(3, 2);
  h << 1, 3, 5, 7, 2, -4;
  const std::vector<std::size_t> two_graphs = {0, 2, 3};
  const Matrix pooled = mean_pool(h, two_graphs);
  CHECK(pooled(0, 0) == 3.0);
  CHECK(pooled(0, 1) == 5.0);
  CHECK(pooled.row(1) == h.row(2));

  Matrix sym(2, 3);
  sym << 1, -2, 3, -1, 2, -3;
  const std::vector<std::size_t> one_graph = {0, 2};
  CHECK(mean_pool(sym, one_graph).isZero(0.0));

  const std::vector<std::size_t> empty_graph = {0, 2, 2, 3};
  CHECK_THROWS_AS(mean_pool(h, empty_graph), ValidationError);
  const std::vector<std::size_t> short_cover = {0, 2};
  CHECK_THROWS_AS(mean_pool(h, short_cover), ShapeError);
}

TEST_CASE("model_forward") {
  Rng rng(13);
  SUBCASE("zeros propagate") {
    ModelParams p = ModelParams::glorot(6, 4, 3, 1);
    p.layer1.bias.setZero();
    p.layer2.bias.setZero();
    p.out_bias.setZero();
    const std::vector<TokenId> id = {1};
    std::vector<TokenGraph> g = {build_graph(0, id, Matrix::Zero(1, 6), 1, 0)};
    const auto fwd = model_forward(collate(g), p);
    CHECK(fwd.logits.rows() == 1);
    CHECK(fwd.logits.cols() == 3);
    CHECK(fwd.logits.isZero(0.0));
  }
  SUBCASE("shape contract") {
    const ModelParams p = random_params(5, 4, 3, rng);
    const GraphBatch batch = random_batch(6, 7, 5, 2, 3, rng);
    const auto fwd = model_forward(batch, p);
    CHECK(fwd.logits.rows() == 6);
    CHECK(fwd.logits.cols() == 3);
    CHECK(fwd.logits.allFinite());
    CHECK(predict(batch, p).size() == 6);
    CHECK_THROWS_AS(model_forward(random_batch(2, 3, 4, 1, 3, rng), p), ShapeError);
  }
  SUBCASE("property: permutation invariance") {
    for (int trial = 0; trial < 25; ++trial) {
      const std::size_t dim = 1 + rng.below(8);
      const ModelParams p = random_params(dim, 1 + rng.below(6), 3, rng);
      const TokenGraph g = random_graph(1 + rng.below(9), dim, 1 + rng.below(3), 0, rng);
      std::vector<std::uint32_t> perm(g.num_nodes());
      std::iota(perm.begin(), perm.end(), 0u);
      rng.shuffle(perm);
      std::vector<TokenGraph> a = {g};
      std::vector<TokenGraph> b = {permute_graph(g, perm)};
      const Matrix la = model_forward(collate(a), p).logits;
      const Matrix lb = model_forward(collate(b), p).logits;
      REQUIRE((la - lb).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("softmax_cross_entropy") {
  for (int classes : {2, 4, 8}) {
    const Matrix logits = Matrix::Constant(3, classes, 0.7);
    const std::vector<int> labels = {0, classes - 1, 1};
    const auto r = softmax_cross_entropy(logits, labels);
    CHECK(std::abs(r.loss - std::log(static_cast<double>(classes))) < 1e-12);
  }
  Matrix extreme(1, 2);
  extreme << 1000, -1000;
  const std::vector<int> zero = {0};
  const auto e = softmax_cross_entropy(extreme, zero);
  CHECK(std::isfinite(e.loss));
  CHECK(e.loss < 1e-12);
  CHECK(e.grad_logits.allFinite());

  Matrix worked(1, 2);
  worked << 0.0, std::log(3.0);
  const std::vector<int> one = {1};
  const auto w = softmax_cross_entropy(worked, one);
  CHECK(w.loss == doctest::Approx(-std::log(0.75)).epsilon(1e-14));
  CHECK(w.loss == doctest::Approx(0.287682).epsilon(1e-6));
  CHECK(w.grad_logits(0, 0) == doctest::Approx(0.25));
  CHECK(w.grad_logits(0, 1) == doctest::Approx(-0.25));

  const std::vector<int> bad = {2};
  CHECK_THROWS_AS(softmax_cross_entropy(worked, bad), ValidationError);
  const std::vector<int> negative = {-1};
  CHECK_THROWS_AS(softmax_cross_entropy(worked, negative), ValidationError);
  const std::vector<int> too_many = {0, 1};
  CHECK_THROWS_AS(softmax_cross_entropy(worked, too_many), ShapeError);
}

TEST_CASE("backward") {
  Rng rng(14);
  const ModelParams p = random_params(4, 3, 2, rng);

  SUBCASE("zero upstream gradient gives zero gradients") {
    const GraphBatch batch = random_batch(3, 5, 4, 1, 2, rng);
    const auto fwd = model_forward(batch, p);
    const ModelParams g = backward(fwd.cache, Matrix::Zero(3, 2), p);
    for (const auto& b : g.blocks()) {
      for (double v : b.values) REQUIRE(v == 0.0);
    }
  }
  SUBCASE("duplicating a graph leaves the mean-loss gradient unchanged") {
    std::vector<TokenGraph> one = {random_graph(4, 4, 1, 1, rng)};
    std::vector<TokenGraph> twice = {one[0], one[0]};
    auto grads_of = [&](const std::vector<TokenGraph>& gs) {
      const GraphBatch batch = collate(gs);
      const auto fwd = model_forward(batch, p);
      return backward(fwd.cache, softmax_cross_entropy(fwd.logits, batch.labels).grad_logits, p);
    };
    const ModelParams a = grads_of(one);
    const ModelParams b = grads_of(twice);
    const auto ba = a.blocks();
    const auto bb = b.blocks();
    for (std::size_t k = 0; k < ba.size(); ++k) {
      for (std::size_t i = 0; i < ba[k].values.size(); ++i) {
        REQUIRE(std::abs(ba[k].values[i] - bb[k].values[i]) <= 1e-14 * (1.0 + std::abs(ba[k].values[i])));
      }
    }
  }
  SUBCASE("mismatched gradient shape") {
    const GraphBatch batch = random_batch(2, 3, 4, 1, 2, rng);
    const auto fwd = model_forward(batch, p);
    CHECK_THROWS_AS(backward(fwd.cache, Matrix::Zero(3, 2), p), ShapeError);
  }
}

TEST_CASE("grad_check agrees with central differences") {
  Rng rng(15);
  for (std::size_t dim : {std::size_t{4}, std::size_t{768}}) {
    for (std::size_t nodes : {std::size_t{1}, std::size_t{2}, std::size_t{7}}) {
      for (std::size_t hop : {std::size_t{1}, std::size_t{2}}) {
        const ModelParams p = random_params(dim, 6, 3, rng);
        std::vector<TokenGraph> gs = {random_graph(nodes, dim, hop, 0, rng),
                                      random_graph(1 + rng.below(nodes), dim, hop, 2, rng)};
        const auto r = grad_check(collate(gs), p, {.samples_per_block = 16, .seed = rng.below(1000)});
        CAPTURE(dim);
        CAPTURE(nodes);
        CAPTURE(hop);
        CHECK(r.max_relative_error < 1e-4);
        CHECK(r.checked > 0);
      }
    }
  }
}

TEST_CASE("grad_check covers a lone isolated node") {
  Rng rng(16);
  const ModelParams p = random_params(5, 4, 2, rng);
  std::vector<TokenGraph> gs = {random_graph(1, 5, 1, 1, rng)};
  const auto r = grad_check(collate(gs), p);
  CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("grad_check detects a dropped attention-softmax gradient") {
  Rng rng(17);
  const ModelParams p = random_params(4, 5, 3, rng);
  std::vector<TokenGraph> gs = {random_graph(6, 4, 2, 0, rng), random_graph(5, 4, 1, 1, rng)};
  const GraphBatch batch = collate(gs);
  GradCheckOptions options;
  options.backward.drop_attention_gradient = true;
  CHECK(grad_check(batch, p, options).max_relative_error > 1e-2);
  CHECK(grad_check(batch, p).max_relative_error < 1e-4);
}

TEST_CASE("adam_step") {
  SUBCASE("zero gradients leave everything unchanged") {
    ModelParams p = ModelParams::glorot(3, 2, 2, 5);
    const ModelParams before = p;
    AdamState state = AdamState::for_params(p);
    adam_step(p, ModelParams::zeros_like(p), state, {.learning_rate = 0.1});
    CHECK(bitwise_equal(p, before));
    for (const auto& b : state.first_moment.blocks())
      for (double v : b.values) CHECK(v == 0.0);
    for (const auto& b : state.second_moment.blocks())
      for (double v : b.values) CHECK(v == 0.0);
    CHECK(state.step == 1);
  }
  SUBCASE("first step on a unit gradient") {
    ModelParams p = ModelParams::zeros(1, 1, 1);
    ModelParams g = ModelParams::zeros(1, 1, 1);
    g.out_bias(0) = 1.0;
    AdamState state = AdamState::for_params(p);
    adam_step(p, g, state, {.learning_rate = 0.001});
    // m_hat = v_hat = 1, so the step is lr / (1 + eps).
    CHECK(p.out_bias(0) == doctest::Approx(-0.000999999990).epsilon(1e-12));
    CHECK(p.out_bias(0) == -0.001 / (1.0 + 1e-8));
    CHECK(state.first_moment.out_bias(0) == doctest::Approx(0.1));
    CHECK(state.second_moment.out_bias(0) == doctest::Approx(0.001));
  }
  SUBCASE("non-finite gradients abort without touching state") {
    ModelParams p = ModelParams::glorot(3, 2, 2, 5);
    const ModelParams before = p;
    ModelParams g = ModelParams::zeros_like(p);
    g.layer2.att_center(1) = std::numeric_limits<double>::quiet_NaN();
    AdamState state = AdamState::for_params(p);
    CHECK_THROWS_WITH_AS(adam_step(p, g, state), doctest::Contains("layer2.att_center"), NumericError);
    CHECK(bitwise_equal(p, before));
    CHECK(state.step == 0);
  }
}

TEST_CASE("glorot initialization") {
  const ModelParams p = ModelParams::glorot(768, 128, 2, 9);
  const double limit = std::sqrt(6.0 / (768 + 128));
  CHECK(p.layer1.weight.cwiseAbs().maxCoeff() <= limit);
  CHECK(p.layer1.weight.cwiseAbs().maxCoeff() > 0.9 * limit);
  CHECK(p.layer1.bias.isZero(0.0));
  CHECK(p.out_bias.isZero(0.0));
  CHECK(p.parameter_count() == 128 * 768 + 3 * 128 + 128 * 128 + 3 * 128 + 2 * 128 + 2);
  CHECK(bitwise_equal(p, ModelParams::glorot(768, 128, 2, 9)));
  CHECK_FALSE(bitwise_equal(p, ModelParams::glorot(768, 128, 2, 10)));
}

TEST_CASE("checkpoint round-trip and validation") {
  TempDir dir;
  Rng rng(18);
  const Checkpoint ckpt{random_params(7, 5, 3, rng), R"({"label_names":["a","b","c"]})"};
  write_checkpoint(ckpt, dir / "m.bin");
  const Checkpoint back = read_checkpoint(dir / "m.bin");
  CHECK(bitwise_equal(back.params, ckpt.params));
  CHECK(back.metadata == ckpt.metadata);
  CHECK(std::filesystem::file_size(dir / "m.bin") ==
        20 + 8 * ckpt.params.parameter_count() + 4 + ckpt.metadata.size());

  auto bytes = encode_checkpoint(ckpt);
  auto bad = bytes;
  bad[1] = 'X';
  CHECK_THROWS_AS(decode_checkpoint(bad), FormatError);
  bytes.resize(bytes.size() - 3);
  CHECK_THROWS_AS(decode_checkpoint(bytes), FormatError);
  CHECK_THROWS_AS(read_checkpoint(dir / "missing.bin"), ValidationError);
}
