#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "infomotif/gnn.hpp"
#include "infomotif/gradcheck.hpp"
#include "infomotif/motif_index.hpp"
#include "infomotif/regularizer.hpp"
#include "test_util.hpp"

using namespace infomotif;

namespace {

using Row = RowVec<double>;

Row random_row(Eigen::Index d, Rng& rng) { return detail::random_tensor(1, d, rng).row(0); }

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::size_t motif_named(const MotifCatalog& cat, const std::string& name) {
  for (std::size_t t = 0; t < cat.size(); ++t)
    if (cat[t].name == name) return t;
  throw std::runtime_error("no motif " + name);
}

/// Mann-Whitney AUC of positives over negatives.
double auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0;
  for (double p : pos)
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  return wins / static_cast<double>(pos.size() * neg.size());
}

}  // namespace

TEST(SelfGate, ZeroWeightsHalveInput) {
  Rng rng(1);
  auto h = random_row(5, rng);
  auto out = self_gate<double>(h, Tensor<double>::Zero(5, 5), Row::Zero(5));
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(out(i), 0.5 * h(i));
}

TEST(SelfGate, ZeroInputGivesZero) {
  Rng rng(2);
  auto out = self_gate<double>(Row::Zero(4), detail::random_tensor(4, 4, rng), random_row(4, rng));
  EXPECT_EQ(out.cwiseAbs().maxCoeff(), 0.0);
}

TEST(SelfGate, MatchesElementwiseOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    auto h = random_row(6, rng), b = random_row(6, rng);
    auto w = detail::random_tensor(6, 6, rng);
    auto out = self_gate<double>(h, w, b);
    for (int j = 0; j < 6; ++j) {
      double pre = b(j);
      for (int i = 0; i < 6; ++i) pre += h(i) * w(i, j);
      EXPECT_NEAR(out(j), h(j) * logistic(pre), 1e-12);
    }
  }
}

TEST(EncodeInstance, SharedEmbeddingGivesUniformWeights) {
  Rng rng(4);
  auto h = random_row(4, rng);
  auto enc = encode_instance<double>({h, h, h}, detail::random_tensor(8, 1, rng));
  for (double w : enc.weights) EXPECT_NEAR(w, 1.0 / 3.0, 1e-12);
  EXPECT_LT((enc.embedding - h).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EncodeInstance, ZeroAttentionGivesUniformWeights) {
  Rng rng(5);
  std::array<Row, 3> g{random_row(3, rng), random_row(3, rng), random_row(3, rng)};
  auto enc = encode_instance<double>(g, Tensor<double>::Zero(6, 1));
  for (double w : enc.weights) EXPECT_NEAR(w, 1.0 / 3.0, 1e-12);
  EXPECT_LT((enc.embedding - (g[0] + g[1] + g[2]) / 3.0).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EncodeInstance, MatchesThreeTermSoftmax) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    std::array<Row, 3> g{random_row(4, rng), random_row(4, rng), random_row(4, rng)};
    auto a = detail::random_tensor(8, 1, rng);
    double s[3], z = 0;
    for (int j = 0; j < 3; ++j) {
      s[j] = 0;
      for (int i = 0; i < 4; ++i) s[j] += a(i, 0) * g[j](i) + a(4 + i, 0) * g[0](i);
      z += std::exp(s[j]);
    }
    auto enc = encode_instance<double>(g, a);
    Row e = Row::Zero(4);
    double total = 0;
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(enc.weights[j], std::exp(s[j]) / z, 1e-12);
      e += std::exp(s[j]) / z * g[j];
      total += enc.weights[j];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_LT((enc.embedding - e).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_THROW(encode_instance<double>({Row::Zero(2), Row::Zero(2), Row::Zero(2)}, Tensor<double>::Zero(3, 1)),
               ShapeError);
}

TEST(Readout, SingleAndRepeatedInstances) {
  Rng rng(7);
  auto e = random_row(5, rng);
  std::vector<Row> one{e}, two{e, e};
  auto s1 = readout<double>(one);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(s1(i), logistic(e(i)), 1e-15);
  EXPECT_LT((readout<double>(two) - s1).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(readout<double>(std::vector<Row>{}), ConfigError);
}

TEST(Readout, MatchesHandMean) {
  Rng rng(8);
  std::vector<Row> es;
  for (int k = 0; k < 7; ++k) es.push_back(random_row(3, rng));
  auto s = readout<double>(es);
  for (int i = 0; i < 3; ++i) {
    double m = 0;
    for (const auto& e : es) m += e(i);
    EXPECT_NEAR(s(i), logistic(m / 7.0), 1e-12);
    EXPECT_GT(s(i), 0.0);
    EXPECT_LT(s(i), 1.0);
  }
}

TEST(Discriminate, DegenerateInputsGiveHalf) {
  Rng rng(9);
  auto e = random_row(4, rng), s = random_row(4, rng);
  auto w = detail::random_tensor(4, 4, rng);
  EXPECT_DOUBLE_EQ(discriminate<double>(e, s, Tensor<double>::Zero(4, 4)), 0.5);
  EXPECT_DOUBLE_EQ(discriminate<double>(Row::Zero(4), s, w), 0.5);
  EXPECT_DOUBLE_EQ(discriminate<double>(e, Row::Zero(4), w), 0.5);
}

TEST(Discriminate, MatchesQuadraticForm) {
  Rng rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    auto e = random_row(5, rng), s = random_row(5, rng);
    auto w = detail::random_tensor(5, 5, rng);
    double q = 0;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) q += e(i) * w(i, j) * s(j);
    const double d = discriminate<double>(e, s, w);
    EXPECT_NEAR(d, logistic(q), 1e-12);
    EXPECT_GT(d, 0.0);
    EXPECT_LT(d, 1.0);
  }
}

TEST(MiLoss, HalfScoresGiveLnTwo) {
  std::vector<double> half(4, 0.5);
  EXPECT_NEAR(motif_mi_loss<double>(half, half), std::log(2.0), 1e-15);
}

TEST(MiLoss, PerfectDiscriminatorApproachesZero) {
  std::vector<double> pos{1.0 - 1e-9, 1.0 - 1e-9}, neg{1e-9, 1e-9};
  EXPECT_LT(motif_mi_loss<double>(pos, neg), 1e-8);
  std::vector<double> one{1.0}, zero{0.0};
  EXPECT_NEAR(motif_mi_loss<double>(one, zero), -std::log(1.0 - 1e-12), 1e-15);
}

TEST(MiLoss, TwoByTwoHandSum) {
  std::vector<double> pos{0.8, 0.6}, neg{0.3, 0.1};
  const double expect = -(std::log(0.8) + std::log(0.6) + std::log(0.7) + std::log(0.9)) / 4.0;
  EXPECT_NEAR(motif_mi_loss<double>(pos, neg), expect, 1e-12);
  std::vector<double> lone{0.5};
  EXPECT_THROW(motif_mi_loss<double>(pos, lone), ConfigError);
}

class BatchedPath : public ::testing::Test {
 protected:
  void SetUp() override {
    graph = testutil::random_graph(40, 0.15, false, 31);
    catalog = builtin_catalog(false);
    index = MotifIndex::build(graph, catalog);
  }
  Graph graph;
  MotifCatalog catalog;
  MotifIndex index;
};

TEST_F(BatchedPath, MatchesSingleInstanceReference) {
  const Eigen::Index d = 5;
  Rng rng(41);
  MotifRegularizer<double> reg(catalog.size(), d, rng);
  for (auto* p : reg.parameters())
    if (p->name.find("bias") != std::string::npos) p->value = detail::random_tensor(1, d, rng);
  auto h = detail::random_tensor(40, d, rng);
  std::vector<NodeId> nodes{0, 3, 7, 11, 19, 25};
  for (std::size_t t = 0; t < catalog.size(); ++t) {
    auto sampler = substream(5, "sampling");
    auto batch = assemble_batch(graph, index, t, nodes, 4, sampler);
    ASSERT_FALSE(batch.empty());
    EXPECT_EQ(batch.positives.size(), batch.negatives.size());
    Tape<double> tape(false);
    auto out = reg.anchor_losses(tape, t, tape.constant(h), batch);
    ASSERT_EQ(out.losses.rows(), static_cast<Eigen::Index>(batch.anchors.size()));

    auto& head = reg.head(t);
    auto encode = [&](const Triple& tr) {
      std::array<Row, 3> g;
      for (int j = 0; j < 3; ++j) g[j] = self_gate<double>(h.row(tr[j]), head.gate_weight.value, head.gate_bias.value.row(0));
      return encode_instance<double>(g, head.attention.value).embedding;
    };
    for (std::size_t a = 0; a < batch.anchors.size(); ++a) {
      std::vector<Row> pe, ne;
      for (std::size_t i = 0; i < batch.group.size(); ++i)
        if (batch.group[i] == a) {
          EXPECT_EQ(batch.positives[i][0], batch.anchors[a]);
          EXPECT_EQ(batch.negatives[i][0], batch.anchors[a]);
          pe.push_back(encode(batch.positives[i]));
          ne.push_back(encode(batch.negatives[i]));
        }
      auto s = readout<double>(pe);
      std::vector<double> dp, dn;
      for (std::size_t k = 0; k < pe.size(); ++k) {
        dp.push_back(discriminate<double>(pe[k], s, head.scorer.value));
        dn.push_back(discriminate<double>(ne[k], s, head.scorer.value));
      }
      EXPECT_NEAR(out.losses.value()(static_cast<Eigen::Index>(a), 0), motif_mi_loss<double>(dp, dn), 1e-10);
    }
  }
}

TEST_F(BatchedPath, SkipsNodesWithoutInstances) {
  auto g = Graph::build(5, std::vector<Edge>{{0, 1}, {1, 2}, {2, 0}}, false);
  auto idx = MotifIndex::build(g, catalog);
  auto tri = motif_named(catalog, "triangle");
  Rng rng(1);
  std::vector<NodeId> nodes{0, 3, 4};
  auto batch = assemble_batch(g, idx, tri, nodes, 20, rng);
  ASSERT_EQ(batch.anchors, std::vector<NodeId>{0});
  EXPECT_EQ(batch.positives.size(), 1u);
  std::vector<NodeId> isolated{3, 4};
  EXPECT_TRUE(assemble_batch(g, idx, tri, isolated, 20, rng).empty());
}

TEST_F(BatchedPath, EncoderWeightsSumToOne) {
  Rng rng(2);
  MotifRegularizer<double> reg(catalog.size(), 4, rng);
  Tape<double> tape(false);
  auto gated = reg.gate(tape, 0, tape.constant(detail::random_tensor(40, 4, rng)));
  std::array<std::vector<std::uint32_t>, 3> slots{{{0, 1, 2}, {5, 6, 7}, {9, 10, 11}}};
  Var<double> w;
  reg.encode(tape, 0, gated, slots, &w);
  for (Eigen::Index r = 0; r < w.rows(); ++r) EXPECT_NEAR(w.value().row(r).sum(), 1.0, 1e-12);
}

TEST_F(BatchedPath, GradientReachesBaseEncoderWeights) {
  Rng rng(3);
  GnnConfig cfg{.arch = Arch::kGcn, .layers = 2, .hidden = 6, .dropout = 0.0, .out_dim = 4};
  GnnEncoder<double> enc(cfg, 3, rng);
  MotifRegularizer<double> reg(catalog.size(), 4, rng);
  auto ops = GraphOperators<double>::build(graph);
  auto x = detail::random_tensor(40, 3, rng);
  std::vector<NodeId> nodes(40);
  std::iota(nodes.begin(), nodes.end(), 0);
  auto batch = assemble_batch(graph, index, 0, nodes, 5, rng);
  for (auto* p : enc.parameters()) p->zero_grad();
  Tape<double> tape;
  auto h = enc.forward(tape, ops, tape.constant(x), false, rng);
  tape.backward(reduce_mean(reg.anchor_losses(tape, 0, h, batch).losses));
  for (auto* p : enc.parameters()) EXPECT_GT(p->grad.cwiseAbs().maxCoeff(), 0.0) << p->name;
}

TEST_F(BatchedPath, GradientsMatchFiniteDifferences) {
  Rng rng(4);
  MotifRegularizer<double> reg(catalog.size(), 3, rng);
  std::vector<NodeId> nodes{1, 2, 5, 8};
  auto batch = assemble_batch(graph, index, 0, nodes, 3, rng);
  Parameter<double> h("h", detail::random_tensor(40, 3, rng));
  auto params = reg.parameters();
  params.push_back(&h);
  for (auto* p : params) p->zero_grad();
  auto loss_of = [&](Tape<double>& tape) {
    return reduce_sum(reg.anchor_losses(tape, 0, tape.param(h), batch).losses);
  };
  {
    Tape<double> tape;
    tape.backward(loss_of(tape));
  }
  for (auto* p : params) {
    if (p->name.find("motif.1") == 0) continue;
    Tensor<double> analytic = p->grad;
    auto saved = p->value;
    auto numeric = finite_difference_grad(
        [&](const Tensor<double>& v) {
          p->value = v;
          Tape<double> tape(false);
          return loss_of(tape).value()(0, 0);
        },
        saved);
    p->value = saved;
    for (Eigen::Index k = 0; k < analytic.size(); ++k) {
      const double a = analytic.data()[k], n = numeric.data()[k];
      const double err = std::abs(a) < 1e-6 ? std::abs(a - n) : std::abs(a - n) / std::max(std::abs(a), std::abs(n));
      EXPECT_LT(err, 1e-4) << p->name << "[" << k << "]";
    }
  }
}

TEST(Separability, DiscriminatorLearnsAttributePattern) {
  // Triangles whose members carry pattern P; a path of nodes carrying the
  // complementary pattern supplies most negatives.
  const std::size_t n_tri = 30, n_path = 110, n = 3 * n_tri + n_path;
  std::vector<Edge> edges;
  for (NodeId k = 0; k < n_tri; ++k) {
    NodeId a = 3 * k;
    edges.push_back({a, a + 1});
    edges.push_back({a + 1, a + 2});
    edges.push_back({a, a + 2});
  }
  for (NodeId v = 3 * n_tri; v + 1 < n; ++v) edges.push_back({v, v + 1});
  for (NodeId k = 0; k < n_tri; ++k) edges.push_back({3 * k, static_cast<NodeId>(3 * n_tri + 3 * k)});
  auto g = Graph::build(n, edges, false);
  auto cat = builtin_catalog(false);
  auto idx = MotifIndex::build(g, cat);
  const auto tri = motif_named(cat, "triangle");

  Rng rng(17);
  std::normal_distribution<double> noise(0.0, 0.1);
  Tensor<double> x(static_cast<Eigen::Index>(n), 4);
  for (NodeId v = 0; v < n; ++v) {
    const bool p = v < 3 * n_tri;
    x(v, 0) = (p ? 1.0 : 0.0) + noise(rng);
    x(v, 1) = (p ? 0.0 : 1.0) + noise(rng);
    x(v, 2) = noise(rng);
    x(v, 3) = noise(rng);
  }
  GnnConfig cfg{.arch = Arch::kGcn, .layers = 1, .dropout = 0.0, .out_dim = 8};
  GnnEncoder<double> enc(cfg, 4, rng);
  MotifRegularizer<double> reg(cat.size(), 8, rng);
  auto ops = GraphOperators<double>::build(g);
  auto params = enc.parameters();
  for (auto* p : reg.parameters()) params.push_back(p);
  Adam<double> opt(params, {.lr = 0.01});
  std::vector<NodeId> anchors(3 * n_tri);
  std::iota(anchors.begin(), anchors.end(), 0);

  auto scores = [&](bool train) {
    auto batch = assemble_batch(g, idx, tri, anchors, 20, rng);
    Tape<double> tape(train);
    auto out = reg.anchor_losses(tape, tri, enc.forward(tape, ops, tape.constant(x), false, rng), batch);
    if (train) {
      opt.zero_grad();
      tape.backward(reduce_mean(out.losses));
      opt.step();
    }
    const auto& pv = out.pos_scores.value();
    const auto& nv = out.neg_scores.value();
    return std::pair{std::vector<double>(pv.data(), pv.data() + pv.size()),
                     std::vector<double>(nv.data(), nv.data() + nv.size())};
  };
  for (int step = 0; step < 150; ++step) scores(true);
  auto [pos, neg] = scores(false);
  EXPECT_GE(auc(pos, neg), 0.9);
}
