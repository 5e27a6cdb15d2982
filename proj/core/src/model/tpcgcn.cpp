#include "tpcgcn/model/tpcgcn.hpp"

namespace tpcgcn::model {

TpcGcnModel::TpcGcnModel(const TpcGcnDims& dims, double dropout_rate)
    : reduction("tpc.reduction", dims.raw, dims.reduced),
      layer1("tpc.layer1", dims.reduced, dims.hidden),
      layer2("tpc.layer2", dims.hidden, dims.classes),
      dropout(dropout_rate) {}

TpcGcnDims TpcGcnModel::dims() const {
  return {reduction.in_dim(), reduction.out_dim(), layer1.out_dim(), layer2.out_dim()};
}

void TpcGcnModel::init(std::uint64_t seed) {
  tensor::SeededRng rng(seed);
  reduction.init(rng);
  layer1.init(rng);
  layer2.init(rng);
}

ParameterList TpcGcnModel::parameters() {
  ParameterList out;
  reduction.append_to(out);
  layer1.append_to(out);
  layer2.append_to(out);
  return out;
}

TpcForward tpcgcn_forward(const GraphBatch& batch, const TpcGcnModel& model,
                          tensor::SeededRng& rng, bool training) {
  TpcForward f;
  f.x = reduce_embeddings(batch.features, model.reduction, &f.reduction);
  f.h1 = gcn_layer(f.x, batch.adjacency, model.layer1, Activation::Relu, &f.gcn1);
  f.drop = tensor::dropout(f.h1, model.dropout, rng, training);
  f.h2 = gcn_layer(f.drop.output, batch.adjacency, model.layer2, Activation::None, &f.gcn2);
  f.logits = fuse_posts(f.h2, batch.groups);
  f.probs = tensor::softmax_rows(f.logits);
  return f;
}

void tpcgcn_backward(const GraphBatch& batch, TpcGcnModel& model, const TpcForward& fwd,
                     const Matrix& grad_logits) {
  const Matrix d_h2 = fuse_posts_backward(batch.groups, grad_logits);
  const Matrix d_drop =
      gcn_layer_backward(batch.adjacency, model.layer2, Activation::None, fwd.gcn2, d_h2, true);
  const Matrix d_h1 = tensor::dropout_backward(fwd.drop.mask, d_drop);
  const Matrix d_x =
      gcn_layer_backward(batch.adjacency, model.layer1, Activation::Relu, fwd.gcn1, d_h1, true);
  reduce_embeddings_backward(batch.features, model.reduction, fwd.reduction, d_x);
}

}  // namespace tpcgcn::model
