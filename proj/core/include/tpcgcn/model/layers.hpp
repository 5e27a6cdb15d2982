#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tpcgcn/tensor/matrix.hpp"
#include "tpcgcn/tensor/parameter.hpp"
#include "tpcgcn/tensor/rng.hpp"
#include "tpcgcn/tensor/sparse.hpp"

namespace tpcgcn::model {

using tensor::Matrix;
using tensor::Parameter;
using tensor::ParameterList;
using tensor::SparseMatrix;

// y = x W + b with W in x out and b broadcast over rows.
struct AffineParams {
  Parameter weight;
  Parameter bias;

  AffineParams() = default;
  AffineParams(const std::string& prefix, std::size_t in, std::size_t out);

  std::size_t in_dim() const { return weight.value.rows(); }
  std::size_t out_dim() const { return weight.value.cols(); }
  void init(tensor::SeededRng& rng);  // Glorot weight, zero bias
  void append_to(ParameterList& list);
  bool frozen() const { return weight.frozen && bias.frozen; }
};

// Dense 768 -> 300 style projection of raw embeddings, followed by ReLU.
struct ReductionParams : AffineParams {
  using AffineParams::AffineParams;
};

// W^(l), B^(l) of one graph convolution.
struct GcnLayerParams : AffineParams {
  using AffineParams::AffineParams;
};

// A fully connected classification head.
struct HeadParams : AffineParams {
  using AffineParams::AffineParams;
};

// Additive attention scorer F(f) = v^T tanh(f W_F + b_F), shared by both
// branches.
struct AttentionParams {
  Parameter w_f;  // fused_dim x attn_dim
  Parameter b_f;  // attn_dim
  Parameter v;    // attn_dim

  AttentionParams() = default;
  AttentionParams(const std::string& prefix, std::size_t fused_dim, std::size_t attn_dim);
  void init(tensor::SeededRng& rng);
  void append_to(ParameterList& list);
};

// ---------------------------------------------------------------------------
// Affine / reduction

Matrix affine(const Matrix& x, const AffineParams& p);
// Accumulates dW, db into p; returns dX when requested (otherwise empty).
Matrix affine_backward(const Matrix& x, AffineParams& p, const Matrix& grad_out,
                       bool need_input_grad);

struct ReductionCache {
  Matrix pre;  // x W + b before ReLU
};

Matrix reduce_embeddings(const Matrix& x_raw, const ReductionParams& p,
                         ReductionCache* cache = nullptr);
void reduce_embeddings_backward(const Matrix& x_raw, ReductionParams& p,
                                const ReductionCache& cache, const Matrix& grad_out);

// ---------------------------------------------------------------------------
// Graph convolution: H' = act(A H W + b)

enum class Activation { Relu, None };

struct GcnCache {
  Matrix aggregated;  // A H
  Matrix pre;         // A H W + b
};

Matrix gcn_layer(const Matrix& h, const SparseMatrix& adjacency, const GcnLayerParams& p,
                 Activation act, GcnCache* cache = nullptr);
Matrix gcn_layer_backward(const SparseMatrix& adjacency, GcnLayerParams& p, Activation act,
                          const GcnCache& cache, const Matrix& grad_out, bool need_input_grad);

// ---------------------------------------------------------------------------
// Post fusion: the mean of a post's row and its comments' rows.

// Node positions pooled per post, sorted ascending so the sum order is
// independent of how comments were listed.
struct PostGroups {
  std::vector<std::vector<std::size_t>> members;
  std::size_t node_count = 0;
};

PostGroups make_post_groups(std::span<const std::size_t> post_positions,
                            std::span<const std::vector<std::size_t>> comment_positions,
                            std::size_t node_count);

std::vector<double> fuse_post(const Matrix& h, std::size_t post_position,
                              std::span<const std::size_t> comment_positions);
Matrix fuse_posts(const Matrix& h, const PostGroups& groups);
Matrix fuse_posts_backward(const PostGroups& groups, const Matrix& grad_out);

// ---------------------------------------------------------------------------
// Two-way attention fusion of branch fusion vectors, row by row.

struct AttentionResult {
  Matrix fused;    // u = a_U f_U + a_R f_R, P x d
  Matrix alpha_u;  // P x 1
  Matrix alpha_r;  // P x 1
  Matrix act_u;    // tanh(f_U W_F + b_F)
  Matrix act_r;
};

AttentionResult attention_fuse(const Matrix& f_u, const Matrix& f_r, const AttentionParams& p);

struct AttentionInputGrads {
  Matrix d_fu;
  Matrix d_fr;
};

AttentionInputGrads attention_fuse_backward(const Matrix& f_u, const Matrix& f_r,
                                            AttentionParams& p, const AttentionResult& fwd,
                                            const Matrix& grad_fused);

struct AttentionWeights {
  std::vector<double> fused;
  double alpha_u;
  double alpha_r;
};

// Single-pair form.
AttentionWeights attention_fuse(std::span<const double> f_u, std::span<const double> f_r,
                                const AttentionParams& p);

}  // namespace tpcgcn::model
