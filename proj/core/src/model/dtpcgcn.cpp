#include "tpcgcn/model/dtpcgcn.hpp"

#include <string>

namespace tpcgcn::model {

std::string_view to_string(BranchId id) { return id == BranchId::U ? "U" : "R"; }

namespace {

std::string prefix(BranchId id, const char* part) {
  return std::string(to_string(id)) + "." + part;
}

}  // namespace

BranchModel::BranchModel(BranchId branch, const BranchDims& d, double dropout_rate)
    : id(branch),
      reduction(prefix(branch, "reduction"), d.raw, d.reduced),
      layer1(prefix(branch, "layer1"), d.reduced, d.hidden),
      layer2(prefix(branch, "layer2"), d.hidden, d.fused),
      topic_head(prefix(branch, "topic_head"), d.hidden, d.topics),
      controversy_head(prefix(branch, "controversy_head"), d.fused, d.classes),
      dropout(dropout_rate) {}

BranchDims BranchModel::dims() const {
  return {reduction.in_dim(), reduction.out_dim(), layer1.out_dim(),
          layer2.out_dim(),   topic_head.out_dim(), controversy_head.out_dim()};
}

void BranchModel::init(tensor::SeededRng& rng) {
  reduction.init(rng);
  layer1.init(rng);
  layer2.init(rng);
  topic_head.init(rng);
  controversy_head.init(rng);
}

ParameterList BranchModel::parameters() {
  ParameterList out;
  reduction.append_to(out);
  layer1.append_to(out);
  layer2.append_to(out);
  topic_head.append_to(out);
  controversy_head.append_to(out);
  return out;
}

ParameterList BranchModel::topic_parameters() {
  ParameterList out;
  reduction.append_to(out);
  layer1.append_to(out);
  topic_head.append_to(out);
  return out;
}

BranchForward branch_forward(const GraphBatch& batch, const BranchModel& branch,
                             tensor::SeededRng& rng, bool training, BranchDepth depth) {
  BranchForward f;
  f.depth = depth;
  f.x = reduce_embeddings(batch.features, branch.reduction, &f.reduction);
  f.h1 = gcn_layer(f.x, batch.adjacency, branch.layer1, Activation::Relu, &f.gcn1);
  f.f1 = fuse_posts(f.h1, batch.groups);
  f.topic_logits = affine(f.f1, branch.topic_head);
  if (depth == BranchDepth::TopicOnly) return f;
  f.drop = tensor::dropout(f.h1, branch.dropout, rng, training);
  f.h2 = gcn_layer(f.drop.output, batch.adjacency, branch.layer2, Activation::None, &f.gcn2);
  f.fb = fuse_posts(f.h2, batch.groups);
  f.controversy_logits = affine(f.fb, branch.controversy_head);
  return f;
}

void branch_backward(const GraphBatch& batch, BranchModel& branch, const BranchForward& fwd,
                     const Matrix& grad_topic_logits, const Matrix& grad_controversy_logits,
                     const Matrix& grad_fb) {
  Matrix d_h1(fwd.h1.rows(), fwd.h1.cols());
  bool any = false;
  if (!grad_topic_logits.empty()) {
    const Matrix d_f1 = affine_backward(fwd.f1, branch.topic_head, grad_topic_logits, true);
    d_h1 += fuse_posts_backward(batch.groups, d_f1);
    any = true;
  }
  if (fwd.depth == BranchDepth::Full &&
      (!grad_controversy_logits.empty() || !grad_fb.empty())) {
    Matrix d_fb(fwd.fb.rows(), fwd.fb.cols());
    if (!grad_controversy_logits.empty())
      d_fb += affine_backward(fwd.fb, branch.controversy_head, grad_controversy_logits, true);
    if (!grad_fb.empty()) d_fb += grad_fb;
    const Matrix d_h2 = fuse_posts_backward(batch.groups, d_fb);
    const Matrix d_drop =
        gcn_layer_backward(batch.adjacency, branch.layer2, Activation::None, fwd.gcn2, d_h2, true);
    d_h1 += tensor::dropout_backward(fwd.drop.mask, d_drop);
    any = true;
  }
  if (!any) return;
  const Matrix d_x =
      gcn_layer_backward(batch.adjacency, branch.layer1, Activation::Relu, fwd.gcn1, d_h1, true);
  reduce_embeddings_backward(batch.features, branch.reduction, fwd.reduction, d_x);
}

DtpcGcnModel::DtpcGcnModel(const BranchDims& dims, std::size_t attn_dim, double dropout_rate)
    : u(BranchId::U, dims, dropout_rate),
      r(BranchId::R, dims, dropout_rate),
      attention("attention", dims.fused, attn_dim),
      final_head("final_head", dims.fused, dims.classes) {}

void DtpcGcnModel::init(std::uint64_t seed) {
  const tensor::SeededRng root(seed);
  auto ru = root.derive("U");
  auto rr = root.derive("R");
  auto ra = root.derive("fusion");
  u.init(ru);
  r.init(rr);
  attention.init(ra);
  final_head.init(ra);
}

ParameterList DtpcGcnModel::parameters() {
  ParameterList out = u.parameters();
  for (auto* p : r.parameters()) out.push_back(p);
  for (auto* p : fusion_parameters()) out.push_back(p);
  return out;
}

ParameterList DtpcGcnModel::fusion_parameters() {
  ParameterList out;
  attention.append_to(out);
  final_head.append_to(out);
  return out;
}

DtpcForward dtpcgcn_forward(const GraphBatch& batch, const DtpcGcnModel& model,
                            tensor::SeededRng& rng, bool branch_training) {
  DtpcForward f;
  f.fu = branch_forward(batch, model.u, rng, branch_training);
  f.fr = branch_forward(batch, model.r, rng, branch_training);
  f.attention = attention_fuse(f.fu.fb, f.fr.fb, model.attention);
  f.logits = affine(f.attention.fused, model.final_head);
  f.probs = tensor::softmax_rows(f.logits);
  return f;
}

void dtpcgcn_backward(const GraphBatch& batch, DtpcGcnModel& model, const DtpcForward& fwd,
                      const Matrix& grad_logits, bool into_branches) {
  const Matrix d_u = affine_backward(fwd.attention.fused, model.final_head, grad_logits, true);
  const auto d_in = attention_fuse_backward(fwd.fu.fb, fwd.fr.fb, model.attention, fwd.attention, d_u);
  if (!into_branches) return;
  branch_backward(batch, model.u, fwd.fu, {}, {}, d_in.d_fu);
  branch_backward(batch, model.r, fwd.fr, {}, {}, d_in.d_fr);
}

}  // namespace tpcgcn::model
