#include "tpcgcn/model/layers.hpp"

#include <algorithm>
#include <cmath>

#include "tpcgcn/error.hpp"
#include "tpcgcn/tensor/ops.hpp"

namespace tpcgcn::model {

using namespace tpcgcn::tensor;

AffineParams::AffineParams(const std::string& prefix, std::size_t in, std::size_t out)
    : weight(prefix + ".weight", in, out), bias(Parameter::vector(prefix + ".bias", out)) {}

void AffineParams::init(SeededRng& rng) {
  glorot_uniform(weight, rng);
  bias.value.fill(0.0);
}

void AffineParams::append_to(ParameterList& list) {
  list.push_back(&weight);
  list.push_back(&bias);
}

AttentionParams::AttentionParams(const std::string& prefix, std::size_t fused_dim,
                                 std::size_t attn_dim)
    : w_f(prefix + ".W_F", fused_dim, attn_dim),
      b_f(Parameter::vector(prefix + ".b_F", attn_dim)),
      v(Parameter::vector(prefix + ".v", attn_dim)) {}

void AttentionParams::init(SeededRng& rng) {
  glorot_uniform(w_f, rng);
  b_f.value.fill(0.0);
  const double a = std::sqrt(6.0 / (static_cast<double>(v.value.cols()) + 1.0));
  for (double& x : v.value.data()) x = rng.uniform(-a, a);
}

void AttentionParams::append_to(ParameterList& list) {
  list.push_back(&w_f);
  list.push_back(&b_f);
  list.push_back(&v);
}

Matrix affine(const Matrix& x, const AffineParams& p) {
  return add_row_bias(matmul(x, p.weight.value), p.bias.value);
}

Matrix affine_backward(const Matrix& x, AffineParams& p, const Matrix& grad_out,
                       bool need_input_grad) {
  p.weight.accumulate(matmul_backward_rhs(x, grad_out));
  p.bias.accumulate(bias_backward(grad_out));
  return need_input_grad ? matmul_backward_lhs(grad_out, p.weight.value) : Matrix{};
}

Matrix reduce_embeddings(const Matrix& x_raw, const ReductionParams& p, ReductionCache* cache) {
  if (x_raw.cols() != p.in_dim()) {
    throw DimensionError("reduce_embeddings: features " + x_raw.shape_string() +
                         " do not match reduction weight " + p.weight.value.shape_string());
  }
  Matrix pre = affine(x_raw, p);
  Matrix out = relu(pre);
  if (cache) cache->pre = std::move(pre);
  return out;
}

void reduce_embeddings_backward(const Matrix& x_raw, ReductionParams& p,
                                const ReductionCache& cache, const Matrix& grad_out) {
  affine_backward(x_raw, p, relu_backward(cache.pre, grad_out), false);
}

Matrix gcn_layer(const Matrix& h, const SparseMatrix& adjacency, const GcnLayerParams& p,
                 Activation act, GcnCache* cache) {
  if (adjacency.rows() != adjacency.cols() || adjacency.cols() != h.rows()) {
    throw DimensionError("gcn_layer: adjacency " +
                         shape_string(adjacency.rows(), adjacency.cols()) +
                         " incompatible with node features " + h.shape_string());
  }
  if (h.cols() != p.in_dim()) {
    throw DimensionError("gcn_layer: node features " + h.shape_string() +
                         " do not match weight " + p.weight.value.shape_string());
  }
  Matrix aggregated = spmm(adjacency, h);
  Matrix pre = affine(aggregated, p);
  Matrix out = act == Activation::Relu ? relu(pre) : pre;
  if (cache) {
    cache->aggregated = std::move(aggregated);
    cache->pre = std::move(pre);
  }
  return out;
}

Matrix gcn_layer_backward(const SparseMatrix& adjacency, GcnLayerParams& p, Activation act,
                          const GcnCache& cache, const Matrix& grad_out, bool need_input_grad) {
  const Matrix d_pre = act == Activation::Relu ? relu_backward(cache.pre, grad_out) : grad_out;
  Matrix d_agg = affine_backward(cache.aggregated, p, d_pre, need_input_grad);
  return need_input_grad ? spmm_transposed(adjacency, d_agg) : Matrix{};
}

PostGroups make_post_groups(std::span<const std::size_t> post_positions,
                            std::span<const std::vector<std::size_t>> comment_positions,
                            std::size_t node_count) {
  if (post_positions.size() != comment_positions.size()) {
    throw DimensionError("make_post_groups: posts and comment lists differ in length");
  }
  PostGroups g;
  g.node_count = node_count;
  g.members.reserve(post_positions.size());
  for (std::size_t p = 0; p < post_positions.size(); ++p) {
    std::vector<std::size_t> m{post_positions[p]};
    m.insert(m.end(), comment_positions[p].begin(), comment_positions[p].end());
    std::sort(m.begin(), m.end());
    for (auto pos : m) {
      if (pos >= node_count) {
        throw DimensionError("post group position " + std::to_string(pos) +
                             " out of range for " + std::to_string(node_count) + " nodes");
      }
    }
    g.members.push_back(std::move(m));
  }
  return g;
}

namespace {

void mean_rows_into(const Matrix& h, std::span<const std::size_t> members,
                    std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (auto pos : members) {
    const auto r = h.row(pos);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += r[j];
  }
  const double count = static_cast<double>(members.size());
  for (double& v : out) v /= count;
}

}  // namespace

std::vector<double> fuse_post(const Matrix& h, std::size_t post_position,
                              std::span<const std::size_t> comment_positions) {
  std::vector<std::size_t> members{post_position};
  members.insert(members.end(), comment_positions.begin(), comment_positions.end());
  std::sort(members.begin(), members.end());
  for (auto pos : members) {
    if (pos >= h.rows()) {
      throw DimensionError("fuse_post: position " + std::to_string(pos) + " out of range for " +
                           h.shape_string());
    }
  }
  std::vector<double> out(h.cols());
  mean_rows_into(h, members, out);
  return out;
}

Matrix fuse_posts(const Matrix& h, const PostGroups& groups) {
  if (h.rows() != groups.node_count) {
    throw DimensionError("fuse_posts: " + h.shape_string() + " rows for " +
                         std::to_string(groups.node_count) + " grouped nodes");
  }
  Matrix out(groups.members.size(), h.cols());
  for (std::size_t p = 0; p < groups.members.size(); ++p)
    mean_rows_into(h, groups.members[p], out.row(p));
  return out;
}

Matrix fuse_posts_backward(const PostGroups& groups, const Matrix& grad_out) {
  Matrix dh(groups.node_count, grad_out.cols());
  for (std::size_t p = 0; p < groups.members.size(); ++p) {
    const double count = static_cast<double>(groups.members[p].size());
    const auto g = grad_out.row(p);
    for (auto pos : groups.members[p]) {
      auto dst = dh.row(pos);
      for (std::size_t j = 0; j < g.size(); ++j) dst[j] += g[j] / count;
    }
  }
  return dh;
}

namespace {

Matrix scores(const Matrix& act, const Parameter& v) {
  Matrix s(act.rows(), 1);
  for (std::size_t i = 0; i < act.rows(); ++i) {
    const auto a = act.row(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * v.value(0, k);
    s(i, 0) = acc;
  }
  return s;
}

}  // namespace

AttentionResult attention_fuse(const Matrix& f_u, const Matrix& f_r, const AttentionParams& p) {
  if (!f_u.same_shape(f_r)) {
    throw DimensionError("attention_fuse: branch vectors " + f_u.shape_string() + " and " +
                         f_r.shape_string() + " differ");
  }
  if (f_u.cols() != p.w_f.value.rows()) {
    throw DimensionError("attention_fuse: vectors " + f_u.shape_string() +
                         " do not match W_F " + p.w_f.value.shape_string());
  }
  AttentionResult r;
  r.act_u = tanh_elem(add_row_bias(matmul(f_u, p.w_f.value), p.b_f.value));
  r.act_r = tanh_elem(add_row_bias(matmul(f_r, p.w_f.value), p.b_f.value));
  const Matrix s_u = scores(r.act_u, p.v);
  const Matrix s_r = scores(r.act_r, p.v);
  r.alpha_u = Matrix(f_u.rows(), 1);
  r.alpha_r = Matrix(f_u.rows(), 1);
  r.fused = Matrix(f_u.rows(), f_u.cols());
  for (std::size_t i = 0; i < f_u.rows(); ++i) {
    const double m = std::max(s_u(i, 0), s_r(i, 0));
    const double e_u = std::exp(s_u(i, 0) - m);
    const double e_r = std::exp(s_r(i, 0) - m);
    const double au = e_u / (e_u + e_r);
    const double ar = e_r / (e_u + e_r);
    r.alpha_u(i, 0) = au;
    r.alpha_r(i, 0) = ar;
    for (std::size_t j = 0; j < f_u.cols(); ++j) r.fused(i, j) = au * f_u(i, j) + ar * f_r(i, j);
  }
  return r;
}

AttentionInputGrads attention_fuse_backward(const Matrix& f_u, const Matrix& f_r,
                                            AttentionParams& p, const AttentionResult& fwd,
                                            const Matrix& grad_fused) {
  const std::size_t n = f_u.rows();
  AttentionInputGrads g{Matrix(n, f_u.cols()), Matrix(n, f_u.cols())};
  Matrix ds_u(n, 1);
  Matrix ds_r(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double au = fwd.alpha_u(i, 0);
    const double ar = fwd.alpha_r(i, 0);
    double da_u = 0.0;
    double da_r = 0.0;
    for (std::size_t j = 0; j < f_u.cols(); ++j) {
      const double du = grad_fused(i, j);
      da_u += du * f_u(i, j);
      da_r += du * f_r(i, j);
      g.d_fu(i, j) = au * du;
      g.d_fr(i, j) = ar * du;
    }
    // Softmax Jacobian over the two scores.
    const double mean = au * da_u + ar * da_r;
    ds_u(i, 0) = au * (da_u - mean);
    ds_r(i, 0) = ar * (da_r - mean);
  }

  auto through_scorer = [&](const Matrix& f, const Matrix& act, const Matrix& ds, Matrix& df) {
    const std::size_t k = act.cols();
    Matrix d_act(n, k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < k; ++c) {
        d_act(i, c) = ds(i, 0) * p.v.value(0, c);
        p.v.grad(0, c) += ds(i, 0) * act(i, c);
      }
    const Matrix d_pre = tanh_backward(act, d_act);
    p.w_f.accumulate(matmul_backward_rhs(f, d_pre));
    p.b_f.accumulate(bias_backward(d_pre));
    df += matmul_backward_lhs(d_pre, p.w_f.value);
  };
  through_scorer(f_u, fwd.act_u, ds_u, g.d_fu);
  through_scorer(f_r, fwd.act_r, ds_r, g.d_fr);
  return g;
}

AttentionWeights attention_fuse(std::span<const double> f_u, std::span<const double> f_r,
                                const AttentionParams& p) {
  if (f_u.size() != f_r.size()) {
    throw DimensionError("attention_fuse: branch vectors of length " +
                         std::to_string(f_u.size()) + " and " + std::to_string(f_r.size()));
  }
  const Matrix mu(1, f_u.size(), std::vector<double>(f_u.begin(), f_u.end()));
  const Matrix mr(1, f_r.size(), std::vector<double>(f_r.begin(), f_r.end()));
  const auto r = attention_fuse(mu, mr, p);
  return {r.fused.data(), r.alpha_u(0, 0), r.alpha_r(0, 0)};
}

}  // namespace tpcgcn::model
