#include <cmath>
#include <numeric>

#include "doctest.h"
#include "support/oracles.hpp"
#include "textgat/error.hpp"
#include "textgat/layers/dropout.hpp"
#include "textgat/layers/gat.hpp"
#include "textgat/layers/gcn.hpp"
#include "textgat/layers/loss.hpp"
#include "textgat/layers/model.hpp"
#include "textgat/numcore/activations.hpp"
#include "textgat/train.hpp"

using namespace textgat;
using testing::random_dense;

namespace {

GatLayerParams random_gat(std::size_t f_in, std::size_t f_out, std::size_t heads, HeadAggregation agg,
                          GatActivation act, Rng& rng) {
  GatLayerParams p;
  for (std::size_t k = 0; k < heads; ++k) {
    p.weights.push_back(random_dense(f_in, f_out, rng));
    p.kernels.push_back(random_dense(1, 2 * f_out, rng));
  }
  p.aggregation = agg;
  p.activation = act;
  return p;
}

// Path 0 - 1 - 2 with self-loops.
SparseMatrix path3() {
  return SparseMatrix::from_triplets(3, 3, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}, {1, 2, 1}, {2, 1, 1}, {2, 2, 1}});
}

void check_attention_rows(const AttentionRecord& att, const SparseMatrix& pattern) {
  REQUIRE(att.rows() == pattern.rows());
  for (std::size_t i = 0; i < att.rows(); ++i) {
    auto ac = att.row_cols(i), pc = pattern.row_cols(i);
    CHECK(std::equal(ac.begin(), ac.end(), pc.begin(), pc.end()));
    auto av = att.row_values(i);
    CHECK(std::abs(std::accumulate(av.begin(), av.end(), 0.0) - 1.0) <= 1e-9);
    for (double a : av) CHECK(a > 0.0);
  }
}

ModelConfig small_config(Architecture arch, std::size_t input_dim, std::size_t classes) {
  ModelConfig c;
  c.architecture = arch;
  c.input_dim = input_dim;
  c.hidden_units = 3;
  c.heads = 2;
  c.output_heads = 2;
  c.classes = classes;
  c.l2 = 5e-4;
  return c;
}

std::vector<std::size_t> graph_labels(const TextGraph& g) {
  std::vector<std::size_t> labels(g.n_nodes(), 0);
  for (std::size_t d = 0; d < g.n_docs; ++d) labels[d] = g.labels[d];
  return labels;
}

}  // namespace

TEST_CASE("attention logit examples") {
  GatLayerParams p;
  p.weights = {DenseMatrix(1, 1, {1.0})};
  p.kernels = {DenseMatrix(1, 2, {1.0, 1.0})};
  std::vector<double> h{1.0};
  CHECK(attention_logit(h, h, p, 0) == 2.0);

  Rng rng(1);
  GatLayerParams z = random_gat(4, 3, 1, HeadAggregation::concat, GatActivation::elu, rng);
  z.weights[0].fill(0.0);
  std::vector<double> hi{1, 2, 3, 4}, hj{-1, 0, 5, 2};
  CHECK(attention_logit(hi, hj, z, 0) == 0.0);

  GatLayerParams r = random_gat(4, 3, 1, HeadAggregation::concat, GatActivation::elu, rng);
  CHECK(attention_logit(hi, hj, r, 0) != attention_logit(hj, hi, r, 0));
}

TEST_CASE("attention coefficient examples") {
  CHECK(attention_coefficients(std::vector<double>{0.7}) == std::vector<double>{1.0});
  for (double a : attention_coefficients(std::vector<double>{0.3, 0.3, 0.3, 0.3})) CHECK(a == doctest::Approx(0.25));
  auto a = attention_coefficients(std::vector<double>{std::log(1.0), std::log(3.0)});
  CHECK(std::abs(a[0] - 0.25) <= 1e-12);
  CHECK(std::abs(a[1] - 0.75) <= 1e-12);
}

TEST_CASE("attention coefficients are invariant to a constant shift") {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> e(1 + rng.below(10));
    for (double& x : e) x = rng.uniform(-5, 5);
    auto shifted = e;
    double c = rng.uniform(-50, 50);
    for (double& x : shifted) x += c;
    auto a = attention_coefficients(e), b = attention_coefficients(shifted);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9);
  }
}

TEST_CASE("zero output weights give uniform class distributions") {
  Rng rng(3);
  GatLayerParams p = random_gat(4, 5, 2, HeadAggregation::average, GatActivation::softmax, rng);
  for (auto& w : p.weights) w.fill(0.0);
  SparseMatrix pattern = testing::random_pattern(6, 0.4, rng);
  DenseMatrix out = gat_layer_forward(random_dense(6, 4, rng), pattern, p, {}).output;
  for (double v : out.values()) CHECK(std::abs(v - 0.2) <= 1e-15);
}

TEST_CASE("single node, single head reduces to act(W h)") {
  Rng rng(4);
  GatLayerParams p = random_gat(3, 3, 1, HeadAggregation::concat, GatActivation::elu, rng);
  DenseMatrix h = random_dense(1, 3, rng);
  auto out = gat_layer_forward(h, SparseMatrix::identity(1), p, {});
  DenseMatrix wh = matmul(h, p.weights[0]);
  for (std::size_t o = 0; o < 3; ++o) CHECK(std::abs(out.output(0, o) - elu(wh(0, o))) <= 1e-15);
  CHECK(out.attention[0].at(0, 0) == 1.0);
}

TEST_CASE("three-node path with three heads matches the per-node loop") {
  Rng rng(5);
  DenseMatrix h = random_dense(3, 4, rng);
  for (auto agg : {HeadAggregation::concat, HeadAggregation::average}) {
    for (auto act : {GatActivation::elu, GatActivation::softmax, GatActivation::none}) {
      GatLayerParams p = random_gat(4, 2, 3, agg, act, rng);
      auto out = gat_layer_forward(h, path3(), p, {});
      DenseMatrix ref = testing::naive_gat_layer(h, path3(), p);
      CHECK(max_abs_diff(out.output, ref) <= 1e-12);
      for (const auto& att : out.attention) check_attention_rows(att, path3());
      CHECK(out.attention[0].at(0, 2) == 0.0);
    }
  }
}

TEST_CASE("random graphs match the per-node loop, sparse input included") {
  Rng rng(6);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 2 + rng.below(12);
    SparseMatrix pattern = testing::random_pattern(n, 0.3, rng);
    DenseMatrix h = random_dense(n, n, rng);
    for (double& v : h.values())
      if (rng.uniform() < 0.6) v = 0.0;
    GatLayerParams p = random_gat(n, 3, 1 + rng.below(4), HeadAggregation::concat, GatActivation::elu, rng);
    DenseMatrix ref = testing::naive_gat_layer(h, pattern, p);
    CHECK(max_abs_diff(gat_layer_forward(h, pattern, p, {}).output, ref) <= 1e-12);
    CHECK(max_abs_diff(gat_layer_forward(SparseMatrix::from_dense(h), pattern, p, {}).output, ref) <= 1e-12);
  }
}

TEST_CASE("one averaged head equals the single-head layer exactly") {
  Rng rng(7);
  SparseMatrix pattern = testing::random_pattern(8, 0.3, rng);
  DenseMatrix h = random_dense(8, 5, rng);
  GatLayerParams single = random_gat(5, 4, 1, HeadAggregation::concat, GatActivation::none, rng);
  GatLayerParams avg = single;
  avg.aggregation = HeadAggregation::average;
  CHECK(gat_layer_forward(h, pattern, single, {}).output == gat_layer_forward(h, pattern, avg, {}).output);
}

TEST_CASE("attention rows sum to one on the neighborhood in train mode too") {
  Rng rng(8);
  SparseMatrix pattern = testing::random_pattern(15, 0.2, rng);
  GatLayerParams p = random_gat(6, 4, 3, HeadAggregation::concat, GatActivation::elu, rng);
  Rng drop(1);
  auto out = gat_layer_forward(random_dense(15, 6, rng), pattern, p, {0.5, 0.5, Mode::train, &drop});
  for (const auto& att : out.attention) check_attention_rows(att, pattern);
}

TEST_CASE("layer validation and shape errors") {
  Rng rng(9);
  GatLayerParams p = random_gat(4, 2, 2, HeadAggregation::concat, GatActivation::elu, rng);
  CHECK_THROWS_AS(gat_layer_forward(random_dense(3, 5, rng), path3(), p, {}), Error);
  GatLayerParams bad = p;
  bad.kernels[1] = DenseMatrix(1, 3);
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(GatLayerParams{}.validate(), Error);
  CHECK_THROWS_AS(gat_layer_backward(DenseMatrix(3, 4), path3(), p, GatLayerCache{}), Error);
}

TEST_CASE("single GAT layer gradients on a five-node graph") {
  Rng rng(10);
  SparseMatrix pattern = testing::random_pattern(5, 0.5, rng);
  DenseMatrix h = random_dense(5, 4, rng);
  DenseMatrix upstream_w = random_dense(5, 6, rng);
  for (auto act : {GatActivation::elu, GatActivation::none}) {
    GatLayerParams p = random_gat(4, 3, 2, HeadAggregation::concat, act, rng);
    for (auto weighting : {EdgeWeighting::mask, EdgeWeighting::additive}) {
      p.edge_weighting = weighting;
      SparseMatrix pat = pattern;
      if (weighting == EdgeWeighting::additive) {
        std::vector<double> w(pat.nnz());
        for (double& x : w) x = rng.uniform(0.1, 2.0);
        pat = pat.with_values(w);
      }
      // Scalar objective: sum(upstream_w .* output).
      auto objective = [&](const GatLayerParams& q, const DenseMatrix& x) {
        DenseMatrix out = gat_layer_forward(x, pat, q, {}).output;
        double s = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) s += out.values()[i] * upstream_w.values()[i];
        return s;
      };
      GatLayerCache cache;
      gat_layer_forward(h, pat, p, {}, &cache);
      GatLayerGrads g = gat_layer_backward(upstream_w, pat, p, cache);

      GatLayerParams work = p;
      for (std::size_t k = 0; k < p.heads(); ++k) {
        auto rw = finite_diff_check([&] { return objective(work, h); }, work.weights[k].values(),
                                    g.params.weights[k].values());
        CHECK(rw.max_rel_error < 1e-4);
        auto ra = finite_diff_check([&] { return objective(work, h); }, work.kernels[k].values(),
                                    g.params.kernels[k].values());
        CHECK(ra.max_rel_error < 1e-4);
      }
      DenseMatrix hx = h;
      auto rx = finite_diff_check([&] { return objective(p, hx); }, hx.values(), g.input.values());
      CHECK(rx.max_rel_error < 1e-4);
    }
  }
}

TEST_CASE("zero upstream gradient gives zero parameter gradients") {
  Rng rng(11);
  GatLayerParams p = random_gat(4, 3, 2, HeadAggregation::concat, GatActivation::elu, rng);
  GatLayerCache cache;
  gat_layer_forward(random_dense(3, 4, rng), path3(), p, {}, &cache);
  GatLayerGrads g = gat_layer_backward(DenseMatrix(3, 6), path3(), p, cache);
  for (const auto& w : g.params.weights) CHECK(sum_of_squares(w) == 0.0);
  for (const auto& a : g.params.kernels) CHECK(sum_of_squares(a) == 0.0);
}

TEST_CASE("full two-layer model gradients on the seven-node fixture") {
  TextGraph g = testing::seven_node_graph();
  ModelInputs inputs = make_inputs(g);
  auto labels = graph_labels(g);
  std::vector<std::size_t> nodes = g.nodes_in(Split::train);
  for (auto arch : {Architecture::gat, Architecture::gcn}) {
    for (auto scope : {L2Scope::first_layer, L2Scope::all}) {
      ModelConfig c = small_config(arch, g.n_nodes(), g.n_classes());
      c.l2_scope = scope;
      Rng rng(12);
      ModelParams params = init_params(c, rng);
      for (auto mode : {Mode::eval, Mode::train}) {
        CAPTURE(to_string(arch));
        CAPTURE(static_cast<int>(mode));
        auto r = testing::check_model_gradient(c, params, inputs, labels, nodes, mode, 0);
        CHECK(r.max_rel_error < 1e-4);
      }
    }
  }
}

TEST_CASE("additive edge weighting model gradients") {
  TextGraph g = testing::seven_node_graph();
  ModelInputs inputs = make_inputs(g);
  ModelConfig c = small_config(Architecture::gat, g.n_nodes(), g.n_classes());
  c.edge_weighting = EdgeWeighting::additive;
  Rng rng(13);
  ModelParams params = init_params(c, rng);
  auto r = testing::check_model_gradient(c, params, inputs, graph_labels(g), g.nodes_in(Split::train), Mode::train, 0);
  CHECK(r.max_rel_error < 1e-4);
}

TEST_CASE("scaling the loss scales every gradient") {
  TextGraph g = testing::seven_node_graph();
  ModelInputs inputs = make_inputs(g);
  ModelConfig c = small_config(Architecture::gat, g.n_nodes(), g.n_classes());
  Rng rng(14);
  ModelParams params = init_params(c, rng);
  auto labels = graph_labels(g);
  auto nodes = g.nodes_in(Split::train);
  auto base = loss_and_grad(c, params, inputs, labels, nodes, Mode::eval, nullptr);
  auto scaled = loss_and_grad(c, params, inputs, labels, nodes, Mode::eval, nullptr, 3.0);
  CHECK(scaled.loss == doctest::Approx(3.0 * base.loss).epsilon(1e-12));
  auto gb = testing::flatten(base.grads), gs = testing::flatten(scaled.grads);
  for (std::size_t i = 0; i < gb.size(); ++i) CHECK(std::abs(gs[i] - 3.0 * gb[i]) <= 1e-12 * (1.0 + std::abs(gb[i])));
}

TEST_CASE("GCN examples") {
  SUBCASE("identity propagation") {
    DenseMatrix x(2, 3, {1, -1, 2, -3, 0.5, 0});
    DenseMatrix i3(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
    DenseMatrix probs = gcn_forward(x, SparseMatrix::identity(2), i3, i3);
    for (std::size_t r = 0; r < 2; ++r) {
      std::vector<double> relu;
      for (double v : x.row(r)) relu.push_back(std::max(v, 0.0));
      auto ref = softmax_row(relu);
      for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(probs(r, k) - ref[k]) <= 1e-15);
    }
  }
  SUBCASE("zero features give uniform rows") {
    Rng rng(15);
    SparseMatrix a = normalize_adjacency(testing::random_pattern(4, 0.5, rng));
    DenseMatrix probs = gcn_forward(DenseMatrix(4, 3), a, random_dense(3, 5, rng), random_dense(5, 4, rng));
    for (double v : probs.values()) CHECK(std::abs(v - 0.25) <= 1e-15);
  }
  SUBCASE("matches the dense reference") {
    Rng rng(16);
    for (std::size_t n : {4, 12, 50}) {
      SparseMatrix a = normalize_adjacency(testing::random_pattern(n, 0.2, rng));
      DenseMatrix x = random_dense(n, 6, rng), w0 = random_dense(6, 5, rng), w1 = random_dense(5, 3, rng);
      CHECK(max_abs_diff(gcn_forward(x, a, w0, w1), testing::dense_gcn(x, a.to_dense(), w0, w1)) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(gcn_forward(DenseMatrix(3, 2), SparseMatrix::identity(3), DenseMatrix(3, 2), DenseMatrix(2, 2)),
                  Error);
}

TEST_CASE("cross-entropy examples") {
  std::vector<std::size_t> labels{0, 1, 2, 3, 4};
  std::vector<std::size_t> nodes{0, 1, 2, 3, 4};
  DenseMatrix uniform(5, 5, 0.2);
  CHECK(std::abs(cross_entropy(uniform, labels, nodes) - std::log(5.0)) <= 1e-12);
  DenseMatrix perfect(5, 5);
  for (int i = 0; i < 5; ++i) perfect(i, i) = 1.0;
  DenseMatrix w(2, 2, {1.0, -2.0, 0.5, 0.0});
  std::vector<const DenseMatrix*> tensors{&w};
  CHECK(masked_cross_entropy(perfect, labels, nodes, tensors, 5e-4) == doctest::Approx(5e-4 * 5.25));
  DenseMatrix two(2, 2, {0.75, 0.25, 0.75, 0.25});
  std::vector<std::size_t> l2{0, 1}, n2{0, 1};
  CHECK(std::abs(cross_entropy(two, l2, n2) + (std::log(0.75) + std::log(0.25)) / 2.0) <= 1e-15);
  CHECK_THROWS_AS(cross_entropy(two, l2, std::vector<std::size_t>{}), Error);
}

TEST_CASE("dropout") {
  Rng rng(17);
  DenseMatrix h = random_dense(10, 10, rng);
  CHECK(dropout(h, 0.0, rng, Mode::train) == h);
  CHECK(dropout(h, 0.7, rng, Mode::eval) == h);
  DenseMatrix ones(1, 100000, 1.0);
  DenseMatrix d = dropout(ones, 0.5, rng, Mode::train);
  double mean = 0.0;
  for (double v : d.values()) {
    CHECK((v == 0.0 || v == 2.0));
    mean += v;
  }
  mean /= 1e5;
  // Each entry is 0 or 2 with equal probability: variance 1, so sigma of the mean is 1/sqrt(1e5).
  CHECK(std::abs(mean - 1.0) <= 3.0 / std::sqrt(1e5));
}

TEST_CASE("permutation equivariance on a twelve-node graph") {
  Rng rng(18);
  const std::size_t n = 12;
  SparseMatrix pattern = testing::random_pattern(n, 0.25, rng);
  DenseMatrix x = random_dense(n, 7, rng);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);  // new index perm[i] for old node i
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : pattern.row_cols(i)) t.push_back({perm[i], perm[j], 1.0});
  SparseMatrix p_pattern = SparseMatrix::from_triplets(n, n, std::move(t));
  DenseMatrix p_x(n, 7);
  for (std::size_t i = 0; i < n; ++i) std::copy(x.row(i).begin(), x.row(i).end(), p_x.row(perm[i]).begin());

  for (auto arch : {Architecture::gat, Architecture::gcn}) {
    ModelConfig c = small_config(arch, 7, 3);
    Rng init(19);
    ModelParams params = init_params(c, init);
    ModelInputs a{x, pattern, normalize_adjacency(pattern)};
    ModelInputs b{p_x, p_pattern, normalize_adjacency(p_pattern)};
    DenseMatrix pa = model_forward(c, params, a, Mode::eval, nullptr).probs;
    DenseMatrix pb = model_forward(c, params, b, Mode::eval, nullptr).probs;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(pa(i, k) - pb(perm[i], k)) <= 1e-9);
  }
}

TEST_CASE("parameter layout and initialization") {
  ModelConfig c = small_config(Architecture::gat, 10, 4);
  Rng rng(20);
  ModelParams p = init_params(c, rng);
  auto names = p.tensor_names();
  CHECK(names.size() == 2 * 2 + 2 * 2);
  CHECK(names.front() == "hidden.W0");
  CHECK(p.parameter_count() == 2 * (10 * 3 + 6) + 2 * (6 * 4 + 8));
  const double bound = std::sqrt(6.0 / (10 + 3));
  for (double v : p.gat_hidden.weights[0].values()) CHECK(std::abs(v) <= bound);
  Rng again(20);
  CHECK(testing::flatten(init_params(c, again)) == testing::flatten(p));
  CHECK(p.l2_tensors(L2Scope::first_layer).size() == 4);
  CHECK(p.l2_tensors(L2Scope::all).size() == 8);
}
