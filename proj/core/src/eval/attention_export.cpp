#include "tpcgcn/eval/attention_export.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

#include "tpcgcn/error.hpp"
#include "tpcgcn/tensor/ops.hpp"

namespace tpcgcn::eval {

std::vector<AttentionRecord> export_attention(const model::AnyModel& m,
                                              const data::Corpus& corpus,
                                              const data::EmbeddingTable& embeddings,
                                              const data::SplitSpec& split, data::Fold fold) {
  const auto* dtpc = std::get_if<model::DtpcGcnModel>(&m);
  if (!dtpc) {
    throw ValidationError("attention export needs a dtpcgcn checkpoint, got " +
                          std::string(model::model_kind(m)));
  }
  std::vector<AttentionRecord> out;
  tensor::SeededRng unused(0);
  for (const auto& g : corpus.graphs) {
    const auto batch = model::make_batch(g, embeddings, corpus.labels);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < batch.post_ids.size(); ++i) {
      const auto it = split.assignment.find(batch.post_ids[i]);
      if (it == split.assignment.end())
        throw DataError("split does not assign post '" + batch.post_ids[i] + "'");
      if (it->second == fold) rows.push_back(i);
    }
    if (rows.empty()) continue;
    const auto fwd = model::dtpcgcn_forward(batch, *dtpc, unused, false);
    const auto am = tensor::argmax_rows(fwd.probs);
    for (auto r : rows) {
      out.push_back({batch.post_ids[r], g.topic, fwd.attention.alpha_u(r, 0),
                     fwd.attention.alpha_r(r, 0), static_cast<int>(am[r]), batch.labels[r]});
    }
  }
  return out;
}

std::string attention_to_jsonl(const std::vector<AttentionRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["post_id"] = r.post_id;
    j["topic_id"] = r.topic;
    j["alpha_u"] = r.alpha_u;
    j["alpha_r"] = r.alpha_r;
    j["predicted"] = r.predicted;
    j["label"] = r.label;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<AttentionRecord> attention_from_jsonl(const std::string& text) {
  std::vector<AttentionRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("post_id").get<std::string>(), j.at("topic_id").get<std::string>(),
                     j.at("alpha_u").get<double>(), j.at("alpha_r").get<double>(),
                     j.at("predicted").get<int>(), j.at("label").get<int>()});
    } catch (const nlohmann::json::exception& e) {
      throw DataError("attention JSONL line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace tpcgcn::eval
