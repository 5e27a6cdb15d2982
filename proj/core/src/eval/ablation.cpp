#include "tpcgcn/eval/ablation.hpp"

#include "tpcgcn/error.hpp"
#include "tpcgcn/eval/evaluate.hpp"

namespace tpcgcn::eval {

using graph::AblationVariant;

std::string_view to_string(ModelFamily f) {
  return f == ModelFamily::TpcGcn ? "tpcgcn" : "dtpcgcn";
}

ModelFamily parse_model_family(std::string_view s) {
  if (s == "tpcgcn") return ModelFamily::TpcGcn;
  if (s == "dtpcgcn") return ModelFamily::DtpcGcn;
  throw ValidationError("unknown model '" + std::string(s) + "' (expected tpcgcn or dtpcgcn)");
}

std::vector<std::string> ablation_names() {
  return {"full", "drop-topic", "drop-comments", "rand-topic",
          "rand-post", "rand-comment", "u-branch", "r-branch"};
}

AblationSpec parse_ablation(std::string_view name) {
  if (name == "u-branch") return {"u-branch", AblationVariant::Full, model::BranchId::U};
  if (name == "r-branch") return {"r-branch", AblationVariant::Full, model::BranchId::R};
  const auto v = graph::parse_ablation_variant(name);
  return {std::string(graph::to_string(v)), v, std::nullopt};
}

AblatedData ablate_inputs(const AblationSpec& spec, const data::Corpus& corpus,
                          const data::EmbeddingTable& embeddings, std::uint64_t seed) {
  AblatedData out{corpus, embeddings};
  for (auto& g : out.corpus.graphs) g = graph::apply_ablation(g, spec.variant);
  const auto kinds = graph::randomized_kinds(spec.variant);
  if (!kinds.empty()) {
    out.embeddings = data::randomize_features(embeddings, data::node_kinds(corpus.graphs), kinds,
                                              tensor::mix64(seed ^ tensor::fnv1a64(spec.name)));
  }
  return out;
}

AblationResult run_ablation(const AblationSpec& spec, ModelFamily family,
                            const data::Corpus& corpus, const data::EmbeddingTable& embeddings,
                            const data::SplitSpec& split, const train::TrainConfig& config) {
  if (spec.branch_only && family != ModelFamily::DtpcGcn) {
    throw ValidationError("ablation '" + spec.name + "' applies to dtpcgcn only");
  }
  const AblatedData in = ablate_inputs(spec, corpus, embeddings, config.seed);
  if (spec.branch_only) {
    auto r = train::train_branch_only(in.corpus, in.embeddings, split, config, *spec.branch_only);
    model::AnyModel m = std::move(r.model);
    const Metrics test = evaluate(m, in.corpus, in.embeddings, split, data::Fold::Test);
    return {test, std::move(m), std::move(r.history)};
  }
  if (family == ModelFamily::TpcGcn) {
    auto r = train::train_tpcgcn(in.corpus, in.embeddings, split, config);
    model::AnyModel m = std::move(r.model);
    const Metrics test = evaluate(m, in.corpus, in.embeddings, split, data::Fold::Test);
    return {test, std::move(m), std::move(r.history)};
  }
  auto r = train::train_dtpcgcn(in.corpus, in.embeddings, split, config);
  model::AnyModel m = std::move(r.model);
  const Metrics test = evaluate(m, in.corpus, in.embeddings, split, data::Fold::Test);
  return {test, std::move(m), std::move(r.history)};
}

}  // namespace tpcgcn::eval
