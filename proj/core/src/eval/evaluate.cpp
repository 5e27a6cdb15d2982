#include "tpcgcn/eval/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <thread>

#include "tpcgcn/error.hpp"
#include "tpcgcn/tensor/ops.hpp"

namespace tpcgcn::eval {

std::size_t eval_threads() {
  if (const char* env = std::getenv("TPCGCN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::vector<PostPrediction> predict_graph(const model::AnyModel& m, const graph::TpcGraph& g,
                                          const data::Corpus& corpus,
                                          const data::EmbeddingTable& embeddings,
                                          const data::SplitSpec& split, data::Fold fold) {
  std::vector<PostPrediction> out;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < g.posts.size(); ++i) {
    const auto& id = g.nodes[g.posts[i].position].id;
    const auto it = split.assignment.find(id);
    if (it == split.assignment.end()) throw DataError("split does not assign post '" + id + "'");
    if (it->second == fold) rows.push_back(i);
  }
  if (rows.empty()) return out;
  const auto batch = model::make_batch(g, embeddings, corpus.labels);
  const auto probs = model::predict_probs(m, batch);
  const auto am = tensor::argmax_rows(probs);
  for (auto r : rows) {
    out.push_back({batch.post_ids[r], g.topic, batch.labels[r], static_cast<int>(am[r]),
                   probs(r, 1)});
  }
  return out;
}

}  // namespace

std::vector<PostPrediction> predict_fold(const model::AnyModel& m, const data::Corpus& corpus,
                                         const data::EmbeddingTable& embeddings,
                                         const data::SplitSpec& split, data::Fold fold,
                                         std::size_t threads) {
  const std::size_t n = corpus.graphs.size();
  std::vector<std::vector<PostPrediction>> per_graph(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t worker, std::size_t workers) {
    for (std::size_t i = worker; i < n; i += workers) {
      try {
        per_graph[i] = predict_graph(m, corpus.graphs[i], corpus, embeddings, split, fold);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<PostPrediction> out;
  for (auto& v : per_graph) out.insert(out.end(), v.begin(), v.end());
  return out;
}

Metrics metrics_of(const std::vector<PostPrediction>& predictions) {
  std::vector<int> preds, labels;
  for (const auto& p : predictions) {
    preds.push_back(p.predicted);
    labels.push_back(p.label);
  }
  return compute_metrics(preds, labels);
}

Metrics evaluate(const model::AnyModel& m, const data::Corpus& corpus,
                 const data::EmbeddingTable& embeddings, const data::SplitSpec& split,
                 data::Fold fold, std::size_t threads) {
  const auto preds = predict_fold(m, corpus, embeddings, split, fold, threads);
  if (preds.empty()) {
    throw ValidationError("fold '" + std::string(data::to_string(fold)) + "' holds no posts");
  }
  return metrics_of(preds);
}

std::string render_table(const std::vector<std::pair<std::string, Metrics>>& rows) {
  const std::vector<std::string> header{"Method", "Avg.P", "Avg.R", "Avg.F1", "Acc",
                                        "P(0)",   "R(0)",  "F1(0)", "P(1)",   "R(1)", "F1(1)"};
  std::vector<std::vector<std::string>> cells{header};
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  for (const auto& [name, m] : rows) {
    std::vector<std::string> line{name, fmt(m.avg_p), fmt(m.avg_r), fmt(m.avg_f1), fmt(m.acc)};
    for (const auto& c : m.per_class) {
      line.push_back(fmt(c.precision));
      line.push_back(fmt(c.recall));
      line.push_back(fmt(c.f1));
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells)
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  std::string out;
  auto rule = [&] {
    std::size_t total = 0;
    for (auto w : width) total += w + 2;
    out += std::string(total - 2, '-') + '\n';
  };
  for (std::size_t r = 0; r < cells.size(); ++r) {
    if (r <= 1) rule();
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      const auto& s = cells[r][c];
      const std::string pad(width[c] - s.size(), ' ');
      out += c == 0 ? s + pad : pad + s;
      if (c + 1 < cells[r].size()) out += "  ";
    }
    out += '\n';
  }
  rule();
  return out;
}

}  // namespace tpcgcn::eval
