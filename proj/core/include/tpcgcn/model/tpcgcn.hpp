#pragma once

#include <cstddef>
#include <cstdint>

#include "tpcgcn/model/batch.hpp"
#include "tpcgcn/model/layers.hpp"
#include "tpcgcn/tensor/ops.hpp"
#include "tpcgcn/tensor/rng.hpp"

namespace tpcgcn::model {

struct TpcGcnDims {
  std::size_t raw = 768;
  std::size_t reduced = 300;
  std::size_t hidden = 100;
  std::size_t classes = 2;
};

// Reduction, then two graph convolutions; the second one emits the class
// logits directly.
struct TpcGcnModel {
  ReductionParams reduction;
  GcnLayerParams layer1;
  GcnLayerParams layer2;
  double dropout = 0.35;

  TpcGcnModel() = default;
  explicit TpcGcnModel(const TpcGcnDims& dims, double dropout_rate = 0.35);

  TpcGcnDims dims() const;
  void init(std::uint64_t seed);
  ParameterList parameters();
};

struct TpcForward {
  ReductionCache reduction;
  Matrix x;
  GcnCache gcn1;
  Matrix h1;
  tensor::DropoutResult drop;
  GcnCache gcn2;
  Matrix h2;
  Matrix logits;  // P x 2, fusion of H2 per post
  Matrix probs;
};

TpcForward tpcgcn_forward(const GraphBatch& batch, const TpcGcnModel& model,
                          tensor::SeededRng& rng, bool training);

// Accumulates parameter gradients given d loss / d logits.
void tpcgcn_backward(const GraphBatch& batch, TpcGcnModel& model, const TpcForward& fwd,
                     const Matrix& grad_logits);

}  // namespace tpcgcn::model
