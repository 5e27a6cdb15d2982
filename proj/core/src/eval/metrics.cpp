#include "tpcgcn/eval/metrics.hpp"

#include <nlohmann/json.hpp>

#include "tpcgcn/error.hpp"

namespace tpcgcn::eval {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Metrics compute_metrics(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw ValidationError("compute_metrics: " + std::to_string(predictions.size()) +
                          " predictions for " + std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) throw ValidationError("compute_metrics: no samples");
  // confusion[truth][predicted]
  std::size_t confusion[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    const int p = predictions[i];
    if ((y != 0 && y != 1) || (p != 0 && p != 1)) {
      throw ValidationError("compute_metrics: sample " + std::to_string(i) +
                            " is not a binary label");
    }
    ++confusion[y][p];
  }
  Metrics m;
  m.n = labels.size();
  for (int c = 0; c < 2; ++c) {
    const std::size_t tp = confusion[c][c];
    const std::size_t predicted = confusion[0][c] + confusion[1][c];
    const std::size_t actual = confusion[c][0] + confusion[c][1];
    auto& pc = m.per_class[c];
    pc.support = actual;
    pc.precision = ratio(tp, predicted);
    pc.recall = ratio(tp, actual);
    const double s = pc.precision + pc.recall;
    pc.f1 = s == 0.0 ? 0.0 : 2.0 * pc.precision * pc.recall / s;
  }
  m.avg_p = (m.per_class[0].precision + m.per_class[1].precision) / 2.0;
  m.avg_r = (m.per_class[0].recall + m.per_class[1].recall) / 2.0;
  m.avg_f1 = (m.per_class[0].f1 + m.per_class[1].f1) / 2.0;
  m.acc = ratio(confusion[0][0] + confusion[1][1], m.n);
  return m;
}

std::string metrics_to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["avg_p"] = m.avg_p;
  j["avg_r"] = m.avg_r;
  j["avg_f1"] = m.avg_f1;
  j["acc"] = m.acc;
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (int c = 0; c < 2; ++c) {
    const auto& pc = m.per_class[c];
    per[std::to_string(c)] = {{"p", pc.precision}, {"r", pc.recall}, {"f1", pc.f1},
                              {"support", pc.support}};
  }
  j["per_class"] = per;
  j["n"] = m.n;
  j["zero_division"] = 0;
  return j.dump();
}

Metrics metrics_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Metrics m;
    m.avg_p = j.at("avg_p").get<double>();
    m.avg_r = j.at("avg_r").get<double>();
    m.avg_f1 = j.at("avg_f1").get<double>();
    m.acc = j.at("acc").get<double>();
    m.n = j.at("n").get<std::size_t>();
    for (int c = 0; c < 2; ++c) {
      const auto& pc = j.at("per_class").at(std::to_string(c));
      m.per_class[c] = {pc.at("p").get<double>(), pc.at("r").get<double>(),
                        pc.at("f1").get<double>(), pc.at("support").get<std::size_t>()};
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("metrics JSON: ") + e.what());
  }
}

}  // namespace tpcgcn::eval
