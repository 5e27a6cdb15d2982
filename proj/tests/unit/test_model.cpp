#include <gtest/gtest.h>

#include <filesystem>
#include <numeric>

#include "fixtures.hpp"
#include "tpcgcn/data/dataset.hpp"
#include "tpcgcn/error.hpp"
#include "tpcgcn/graph/adjacency.hpp"
#include "tpcgcn/model/batch.hpp"
#include "tpcgcn/model/dtpcgcn.hpp"
#include "tpcgcn/model/layers.hpp"
#include "tpcgcn/model/model_io.hpp"
#include "tpcgcn/model/tpcgcn.hpp"
#include "tpcgcn/tensor/gradcheck.hpp"
#include "tpcgcn/tensor/ops.hpp"
#include "tpcgcn/train/trainer.hpp"

using namespace tpcgcn;
using namespace tpcgcn::model;
using tensor::Matrix;
using tensor::SeededRng;

namespace {

struct Fixture {
  std::vector<data::ThreadRecord> recs;
  data::Corpus corpus;
  data::EmbeddingTable emb;
  GraphBatch batch;
  std::vector<std::size_t> rows;
};

Fixture random_fixture(std::uint64_t seed, std::size_t nodes = 12, std::size_t posts = 4,
                       std::size_t dim = 5) {
  Fixture f;
  SeededRng rng(seed);
  f.recs = testkit::random_thread_set(nodes, posts, rng);
  f.corpus = data::make_corpus(f.recs);
  f.emb = testkit::random_embeddings(f.recs, dim, seed + 1);
  f.batch = make_batch(f.corpus.graphs[0], f.emb, f.corpus.labels);
  f.rows.resize(f.batch.post_ids.size());
  std::iota(f.rows.begin(), f.rows.end(), 0);
  return f;
}

Matrix random_matrix(std::size_t r, std::size_t c, SeededRng& rng) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

void set_identity(AffineParams& p) {
  p.weight.value = Matrix::identity(p.in_dim());
  p.bias.value.fill(0.0);
}

constexpr double kGradTol = 1e-4;

}  // namespace

TEST(Layers, ReductionHandExample) {
  ReductionParams p("r", 2, 2);
  set_identity(p);
  EXPECT_EQ(reduce_embeddings(Matrix{{1, -1}}, p), (Matrix{{1, 0}}));
  EXPECT_THROW(reduce_embeddings(Matrix{{1, 2, 3}}, p), DimensionError);
}

TEST(Layers, GcnHandExamples) {
  GcnLayerParams p("g", 2, 2);
  set_identity(p);
  EXPECT_EQ(gcn_layer(Matrix{{2, -3}}, tensor::SparseMatrix::identity(1), p, Activation::Relu),
            (Matrix{{2, 0}}));
  GcnLayerParams q("g", 1, 1);
  set_identity(q);
  const tensor::SparseMatrix a(2, 2, {{0, 0, 0.5}, {0, 1, 0.5}, {1, 0, 0.5}, {1, 1, 0.5}});
  EXPECT_EQ(gcn_layer(Matrix{{2}, {4}}, a, q, Activation::Relu), (Matrix{{3}, {3}}));
}

TEST(Layers, GcnMatchesDenseOracle) {
  SeededRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto recs = testkit::random_thread_set(8, 1 + rng.uniform_index(4), rng);
    const auto g = graph::build_tpc_graph("t", recs);
    const auto a = graph::normalize_adjacency(g);
    GcnLayerParams p("g", 4, 3);
    p.init(rng);
    p.bias.value = random_matrix(1, 3, rng);
    const auto h = random_matrix(8, 4, rng);
    const auto dense = testkit::dense_normalized_adjacency(g);
    Matrix expect(8, 3);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        double s = p.bias.value(0, j);
        for (std::size_t k = 0; k < 8; ++k)
          for (std::size_t l = 0; l < 4; ++l) s += dense(i, k) * h(k, l) * p.weight.value(l, j);
        expect(i, j) = std::max(s, 0.0);
      }
    EXPECT_LE(tensor::max_abs_diff(gcn_layer(h, a, p, Activation::Relu), expect), 1e-12);
  }
}

TEST(Layers, FusionIsMeanAndOrderFree) {
  const Matrix h{{1, 3}, {3, 1}, {2, 2}};
  const std::vector<std::size_t> comments{1, 2};
  EXPECT_EQ(fuse_post(h, 0, comments), (std::vector<double>{2, 2}));

  SeededRng rng(2);
  const auto big = random_matrix(9, 5, rng);
  const std::vector<std::size_t> fwd{1, 2, 3, 4, 5, 6, 7, 8};
  const std::vector<std::size_t> rev{8, 6, 4, 2, 7, 5, 3, 1};
  EXPECT_EQ(fuse_post(big, 0, fwd), fuse_post(big, 0, rev));

  const std::vector<std::size_t> posts{0, 3};
  const std::vector<std::vector<std::size_t>> cs{{2, 1}, {}};
  const auto groups = make_post_groups(posts, cs, 4);
  const auto fused = fuse_posts(Matrix{{1, 3}, {3, 1}, {2, 2}, {7, 9}}, groups);
  EXPECT_EQ(fused, (Matrix{{2, 2}, {7, 9}}));
  const auto back = fuse_posts_backward(groups, Matrix{{3, 6}, {1, 1}});
  EXPECT_EQ(back, (Matrix{{1, 2}, {1, 2}, {1, 2}, {1, 1}}));
  EXPECT_THROW(make_post_groups(posts, cs, 3), DimensionError);
}

TEST(Layers, AttentionSymmetryAndNormalization) {
  SeededRng rng(4);
  AttentionParams p("attention", 3, 4);
  p.init(rng);
  const auto f = random_matrix(5, 3, rng);
  const auto same = attention_fuse(f, f, p);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(same.alpha_u(i, 0), 0.5);
    EXPECT_EQ(same.alpha_r(i, 0), 0.5);
  }
  const auto g = random_matrix(5, 3, rng);
  const auto r = attention_fuse(f, g, p);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(r.alpha_u(i, 0) + r.alpha_r(i, 0), 1.0, 1e-15);
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_NEAR(r.fused(i, j), r.alpha_u(i, 0) * f(i, j) + r.alpha_r(i, 0) * g(i, j), 1e-15);
  }
  std::vector<double> fu(f.row(1).begin(), f.row(1).end());
  std::vector<double> fr(g.row(1).begin(), g.row(1).end());
  const auto single = attention_fuse(fu, fr, p);
  EXPECT_EQ(single.alpha_u, r.alpha_u(1, 0));
}

TEST(TpcGcn, ProbabilitiesSumToOne) {
  auto fx = random_fixture(3);
  TpcGcnModel m({5, 4, 3, 2});
  m.init(1);
  SeededRng rng(0);
  const auto fwd = tpcgcn_forward(fx.batch, m, rng, false);
  ASSERT_EQ(fwd.probs.rows(), fx.batch.post_ids.size());
  for (std::size_t i = 0; i < fwd.probs.rows(); ++i)
    EXPECT_NEAR(fwd.probs(i, 0) + fwd.probs(i, 1), 1.0, 1e-12);
}

// A post's logits depend only on nodes within two hops of the post or one of
// its comments.
TEST(TpcGcn, ReceptiveFieldIsTwoHops) {
  SeededRng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    auto fx = random_fixture(100 + trial, 14, 3);
    const auto& g = fx.corpus.graphs[0];
    TpcGcnModel m({5, 4, 3, 2});
    m.init(trial);
    SeededRng r0(0);
    const auto base = tpcgcn_forward(fx.batch, m, r0, false).logits;
    const std::size_t victim = rng.uniform_index(g.node_count());
    auto perturbed = fx.batch;
    for (std::size_t j = 0; j < perturbed.features.cols(); ++j)
      perturbed.features(victim, j) += 10.0 + rng.normal();
    SeededRng r1(0);
    const auto moved = tpcgcn_forward(perturbed, m, r1, false).logits;
    const auto dist = graph::bfs_distances(g, victim);
    for (std::size_t p = 0; p < fx.batch.groups.members.size(); ++p) {
      std::size_t nearest = SIZE_MAX;
      for (auto v : fx.batch.groups.members[p]) nearest = std::min(nearest, dist[v]);
      if (nearest > 2) {
        EXPECT_EQ(moved(p, 0), base(p, 0));
        EXPECT_EQ(moved(p, 1), base(p, 1));
      }
    }
  }
}

TEST(GradCheck, Reduction) {
  SeededRng rng(8);
  ReductionParams p("reduction", 4, 3);
  p.init(rng);
  p.bias.value = random_matrix(1, 3, rng);
  const auto x = random_matrix(6, 4, rng);
  const auto target = random_matrix(6, 3, rng);
  tensor::ParameterList params;
  p.append_to(params);
  const auto report = tensor::finite_diff_check(
      [&](bool grad) {
        ReductionCache cache;
        const auto y = reduce_embeddings(x, p, &cache);
        double loss = 0;
        Matrix dy(y.rows(), y.cols());
        for (std::size_t i = 0; i < y.rows(); ++i)
          for (std::size_t j = 0; j < y.cols(); ++j) {
            loss += 0.5 * (y(i, j) - target(i, j)) * (y(i, j) - target(i, j));
            dy(i, j) = y(i, j) - target(i, j);
          }
        if (grad) reduce_embeddings_backward(x, p, cache, dy);
        return loss;
      },
      params);
  EXPECT_LT(report.max_relative_error, kGradTol) << report.worst_parameter;
}

TEST(GradCheck, TpcGcnWithDropout) {
  auto fx = random_fixture(5);
  TpcGcnModel m({5, 4, 3, 2}, 0.3);
  m.init(2);
  auto params = m.parameters();
  const auto report = tensor::finite_diff_check(
      [&](bool grad) {
        SeededRng rng(9);
        const auto fwd = tpcgcn_forward(fx.batch, m, rng, true);
        const auto l = masked_cross_entropy(fwd.logits, fx.rows, fx.batch.labels);
        if (grad) tpcgcn_backward(fx.batch, m, fwd, l.grad);
        return l.loss;
      },
      params);
  EXPECT_LT(report.max_relative_error, kGradTol) << report.worst_parameter;
  EXPECT_GT(report.coords_checked, 0u);
}

TEST(GradCheck, BranchHeads) {
  auto fx = random_fixture(6);
  BranchModel b(BranchId::R, {5, 4, 3, 3, 2, 2}, 0.3);
  SeededRng init(3);
  b.init(init);
  auto params = b.parameters();
  const std::vector<int> topic(fx.rows.size(), 1);
  const auto report = tensor::finite_diff_check(
      [&](bool grad) {
        SeededRng rng(9);
        const auto fwd = branch_forward(fx.batch, b, rng, true);
        const auto lt = masked_cross_entropy(fwd.topic_logits, fx.rows, topic);
        const auto lc = masked_cross_entropy(fwd.controversy_logits, fx.rows, fx.batch.labels);
        if (grad) branch_backward(fx.batch, b, fwd, lt.grad, lc.grad);
        return lt.loss + lc.loss;
      },
      params);
  EXPECT_LT(report.max_relative_error, kGradTol) << report.worst_parameter;
}

TEST(GradCheck, TopicLossOfRBranch) {
  auto fx = random_fixture(7);
  BranchModel b(BranchId::R, {5, 4, 3, 3, 2, 2}, 0.3);
  SeededRng init(4);
  b.init(init);
  auto params = b.topic_parameters();
  const auto report = tensor::finite_diff_check(
      [&](bool grad) {
        if (grad) return train::topic_loss_backward(fx.batch, b, fx.rows, 0);
        SeededRng rng(0);
        const auto fwd = branch_forward(fx.batch, b, rng, false, BranchDepth::TopicOnly);
        const std::vector<int> topic(fx.rows.size(), 0);
        return masked_cross_entropy(fwd.topic_logits, fx.rows, topic).loss;
      },
      params);
  EXPECT_LT(report.max_relative_error, kGradTol) << report.worst_parameter;
}

TEST(GradCheck, DtpcGcnEndToEnd) {
  auto fx = random_fixture(8);
  DtpcGcnModel m({5, 4, 3, 3, 2, 2}, 3, 0.3);
  m.init(5);
  auto params = m.parameters();
  const auto report = tensor::finite_diff_check(
      [&](bool grad) {
        SeededRng rng(9);
        const auto fwd = dtpcgcn_forward(fx.batch, m, rng, true);
        const auto l = masked_cross_entropy(fwd.logits, fx.rows, fx.batch.labels);
        if (grad) dtpcgcn_backward(fx.batch, m, fwd, l.grad, true);
        return l.loss;
      },
      params);
  EXPECT_LT(report.max_relative_error, kGradTol) << report.worst_parameter;
}

TEST(GradCheck, AttentionAndFinalHeadOnly) {
  auto fx = random_fixture(9);
  DtpcGcnModel m({5, 4, 3, 3, 2, 2}, 3, 0.3);
  m.init(6);
  auto params = m.fusion_parameters();
  const auto branch_before = tensor::snapshot_values(m.u.parameters());
  const auto report = tensor::finite_diff_check(
      [&](bool grad) {
        SeededRng rng(9);
        const auto fwd = dtpcgcn_forward(fx.batch, m, rng, false);
        const auto l = masked_cross_entropy(fwd.logits, fx.rows, fx.batch.labels);
        if (grad) dtpcgcn_backward(fx.batch, m, fwd, l.grad, false);
        return l.loss;
      },
      params);
  EXPECT_LT(report.max_relative_error, kGradTol) << report.worst_parameter;
  for (auto* p : m.u.parameters()) EXPECT_EQ(p->grad, Matrix(p->grad.rows(), p->grad.cols()));
  EXPECT_EQ(tensor::snapshot_values(m.u.parameters()), branch_before);
}

TEST(ModelIo, RoundTripAndInference) {
  auto fx = random_fixture(10);
  const auto dir = std::filesystem::temp_directory_path() / "tpcgcn_test_model";
  std::filesystem::create_directories(dir);

  DtpcGcnModel d({5, 4, 3, 3, 2, 2}, 3);
  d.init(7);
  AnyModel any = d;
  save_model(dir / "d.tpck", any);
  const auto back = load_model(dir / "d.tpck");
  EXPECT_EQ(model_kind(back), "dtpcgcn");
  // Values are narrowed to f32 on disk; a second round trip is exact.
  EXPECT_LE(tensor::max_abs_diff(predict_probs(back, fx.batch), predict_probs(any, fx.batch)),
            1e-5);
  AnyModel again = back;
  save_model(dir / "d2.tpck", again);
  EXPECT_EQ(predict_probs(load_model(dir / "d2.tpck"), fx.batch), predict_probs(back, fx.batch));

  TpcGcnModel t({5, 4, 3, 2});
  t.init(7);
  AnyModel tany = t;
  save_model(dir / "t.tpck", tany);
  const auto tback = load_model(dir / "t.tpck");
  EXPECT_EQ(model_kind(tback), "tpcgcn");
  EXPECT_LE(tensor::max_abs_diff(predict_probs(tback, fx.batch), predict_probs(tany, fx.batch)),
            1e-5);

  BranchModel b(BranchId::U, {5, 4, 3, 3, 2, 2});
  SeededRng rng(1);
  b.init(rng);
  AnyModel bany = b;
  save_model(dir / "b.tpck", bany);
  EXPECT_EQ(model_kind(load_model(dir / "b.tpck")), "branch");

  std::vector<tensor::Parameter> partial;
  for (auto* p : t.parameters()) partial.push_back(*p);
  partial.pop_back();
  EXPECT_THROW(model_from_parameters(partial), DataError);
}

TEST(Batch, MissingEmbeddingIsNamed) {
  auto fx = random_fixture(12);
  data::EmbeddingTable partial(5);
  for (const auto& [id, v] : fx.emb.entries())
    if (id != fx.recs[0].post_id) partial.insert(id, v);
  try {
    make_batch(fx.corpus.graphs[0], partial, fx.corpus.labels);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(fx.recs[0].post_id), std::string::npos);
  }
}

TEST(Batch, MaskedLossIgnoresOtherRows) {
  const Matrix logits{{1, 2}, {3, -1}, {0, 0}};
  const std::vector<int> labels{1, 1};
  const std::vector<std::size_t> rows{0, 2};
  const auto l = masked_cross_entropy(logits, rows, labels);
  const double expect = (std::log(1 + std::exp(-1.0)) + std::log(2.0)) / 2;
  EXPECT_NEAR(l.loss, expect, 1e-14);
  EXPECT_EQ(l.grad(1, 0), 0.0);
  EXPECT_EQ(l.grad(1, 1), 0.0);
}
