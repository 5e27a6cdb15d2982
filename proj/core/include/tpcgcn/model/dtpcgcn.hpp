#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "tpcgcn/model/batch.hpp"
#include "tpcgcn/model/layers.hpp"
#include "tpcgcn/tensor/ops.hpp"
#include "tpcgcn/tensor/rng.hpp"

namespace tpcgcn::model {

// R learns topic-related features, U topic-unrelated ones.
enum class BranchId { U, R };
std::string_view to_string(BranchId id);

struct BranchDims {
  std::size_t raw = 768;
  std::size_t reduced = 300;
  std::size_t hidden = 32;
  std::size_t fused = 16;
  std::size_t topics = 2;
  std::size_t classes = 2;
};

struct BranchModel {
  BranchId id = BranchId::R;
  ReductionParams reduction;
  GcnLayerParams layer1;
  GcnLayerParams layer2;
  HeadParams topic_head;        // fusion of H1 -> K topics
  HeadParams controversy_head;  // fusion of H2 -> 2
  double dropout = 0.4;

  BranchModel() = default;
  BranchModel(BranchId id, const BranchDims& dims, double dropout_rate = 0.4);

  BranchDims dims() const;
  void init(tensor::SeededRng& rng);
  ParameterList parameters();
  // Reduction, first layer and topic head: what the topic-only stage trains.
  ParameterList topic_parameters();
};

enum class BranchDepth { TopicOnly, Full };

struct BranchForward {
  BranchDepth depth = BranchDepth::Full;
  ReductionCache reduction;
  Matrix x;
  GcnCache gcn1;
  Matrix h1;
  Matrix f1;  // P x hidden
  Matrix topic_logits;
  tensor::DropoutResult drop;
  GcnCache gcn2;
  Matrix h2;
  Matrix fb;  // P x fused
  Matrix controversy_logits;
};

BranchForward branch_forward(const GraphBatch& batch, const BranchModel& branch,
                             tensor::SeededRng& rng, bool training,
                             BranchDepth depth = BranchDepth::Full);

// Any of the upstream gradients may be empty. `grad_fb` is an extra gradient
// on the fusion vector (from attention).
void branch_backward(const GraphBatch& batch, BranchModel& branch, const BranchForward& fwd,
                     const Matrix& grad_topic_logits, const Matrix& grad_controversy_logits,
                     const Matrix& grad_fb = {});

struct DtpcGcnModel {
  BranchModel u;
  BranchModel r;
  AttentionParams attention;
  HeadParams final_head;

  DtpcGcnModel() = default;
  DtpcGcnModel(const BranchDims& dims, std::size_t attn_dim, double dropout_rate = 0.4);

  void init(std::uint64_t seed);
  ParameterList parameters();
  ParameterList fusion_parameters();  // attention + final head
  BranchModel& branch(BranchId id) { return id == BranchId::U ? u : r; }
};

struct DtpcForward {
  BranchForward fu;
  BranchForward fr;
  AttentionResult attention;
  Matrix logits;
  Matrix probs;
};

// `branch_training` toggles dropout inside the branches.
DtpcForward dtpcgcn_forward(const GraphBatch& batch, const DtpcGcnModel& model,
                            tensor::SeededRng& rng, bool branch_training);

void dtpcgcn_backward(const GraphBatch& batch, DtpcGcnModel& model, const DtpcForward& fwd,
                      const Matrix& grad_logits, bool into_branches);

}  // namespace tpcgcn::model
