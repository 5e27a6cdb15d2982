#include "tpcgcn/model/model_io.hpp"

#include <map>
#include <string>

#include "tpcgcn/error.hpp"
#include "tpcgcn/tensor/checkpoint.hpp"

namespace tpcgcn::model {

std::string_view model_kind(const AnyModel& m) {
  switch (m.index()) {
    case 0: return "tpcgcn";
    case 1: return "dtpcgcn";
    default: return "branch";
  }
}

ParameterList parameters_of(AnyModel& m) {
  return std::visit([](auto& x) { return x.parameters(); }, m);
}

void save_model(const std::filesystem::path& path, AnyModel& m) {
  const ParameterList params = parameters_of(m);
  std::vector<const tensor::Parameter*> view(params.begin(), params.end());
  tensor::write_checkpoint(path, view);
}

namespace {

using ByName = std::map<std::string, const tensor::Parameter*>;

const tensor::Parameter& need(const ByName& by_name, const std::string& name) {
  const auto it = by_name.find(name);
  if (it == by_name.end()) throw DataError("checkpoint is missing parameter '" + name + "'");
  return *it->second;
}

std::size_t rows_of(const ByName& b, const std::string& name) {
  return need(b, name).value.rows();
}
std::size_t cols_of(const ByName& b, const std::string& name) {
  return need(b, name).value.cols();
}

BranchDims branch_dims(const ByName& b, const std::string& p) {
  BranchDims d;
  d.raw = rows_of(b, p + ".reduction.weight");
  d.reduced = cols_of(b, p + ".reduction.weight");
  d.hidden = cols_of(b, p + ".layer1.weight");
  d.fused = cols_of(b, p + ".layer2.weight");
  d.topics = cols_of(b, p + ".topic_head.weight");
  d.classes = cols_of(b, p + ".controversy_head.weight");
  return d;
}

template <typename Model>
Model fill(Model m, const ByName& by_name) {
  const ParameterList params = m.parameters();
  if (params.size() != by_name.size()) {
    throw DataError("checkpoint holds " + std::to_string(by_name.size()) +
                    " parameters, the inferred model has " + std::to_string(params.size()));
  }
  for (auto* p : params) {
    const auto& src = need(by_name, p->name);
    if (!src.value.same_shape(p->value)) {
      throw DataError("checkpoint parameter '" + p->name + "' has shape " +
                      src.value.shape_string() + ", expected " + p->value.shape_string());
    }
    p->value = src.value;
    p->frozen = src.frozen;
  }
  return m;
}

}  // namespace

AnyModel model_from_parameters(const std::vector<tensor::Parameter>& params) {
  ByName by_name;
  for (const auto& p : params) {
    if (!by_name.emplace(p.name, &p).second)
      throw DataError("checkpoint repeats parameter '" + p.name + "'");
  }
  if (by_name.contains("tpc.reduction.weight")) {
    TpcGcnDims d;
    d.raw = rows_of(by_name, "tpc.reduction.weight");
    d.reduced = cols_of(by_name, "tpc.reduction.weight");
    d.hidden = cols_of(by_name, "tpc.layer1.weight");
    d.classes = cols_of(by_name, "tpc.layer2.weight");
    return fill(TpcGcnModel(d), by_name);
  }
  if (by_name.contains("attention.W_F")) {
    const BranchDims d = branch_dims(by_name, "U");
    return fill(DtpcGcnModel(d, cols_of(by_name, "attention.W_F")), by_name);
  }
  for (const BranchId id : {BranchId::U, BranchId::R}) {
    const std::string p(to_string(id));
    if (by_name.contains(p + ".reduction.weight"))
      return fill(BranchModel(id, branch_dims(by_name, p)), by_name);
  }
  throw DataError("checkpoint does not match any known model layout");
}

AnyModel load_model(const std::filesystem::path& path) {
  return model_from_parameters(tensor::read_checkpoint(path));
}

Matrix predict_probs(const AnyModel& m, const GraphBatch& batch) {
  tensor::SeededRng unused(0);
  if (const auto* tpc = std::get_if<TpcGcnModel>(&m))
    return tpcgcn_forward(batch, *tpc, unused, false).probs;
  if (const auto* dtpc = std::get_if<DtpcGcnModel>(&m))
    return dtpcgcn_forward(batch, *dtpc, unused, false).probs;
  const auto& branch = std::get<BranchModel>(m);
  return tensor::softmax_rows(branch_forward(batch, branch, unused, false).controversy_logits);
}

}  // namespace tpcgcn::model
