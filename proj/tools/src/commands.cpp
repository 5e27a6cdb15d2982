#include "commands.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "manifest.hpp"
#include "tpcgcn/data/dataset.hpp"
#include "tpcgcn/data/split.hpp"
#include "tpcgcn/data/synthetic.hpp"
#include "tpcgcn/data/threads_io.hpp"
#include "tpcgcn/error.hpp"
#include "tpcgcn/eval/ablation.hpp"
#include "tpcgcn/eval/attention_export.hpp"
#include "tpcgcn/eval/evaluate.hpp"
#include "tpcgcn/graph/tpc_graph.hpp"
#include "tpcgcn/model/model_io.hpp"
#include "tpcgcn/tensor/checkpoint.hpp"
#include "tpcgcn/train/trainer.hpp"

namespace tpcgcn::cli {

namespace fs = std::filesystem;

namespace {

struct Inputs {
  data::Corpus corpus;
  data::EmbeddingTable embeddings;
};

// Threads are prepared per config; without an embedding file the hashed
// bag-of-words fallback of the given dim is used.
Inputs load_inputs(const fs::path& threads, const std::string& embeddings,
                   const data::PrepOptions& prep, std::size_t fallback_dim, RunManifest* manifest) {
  const auto records = data::prepare_threads(data::load_threads(threads), prep);
  if (manifest) manifest->add_input(threads);
  Inputs in;
  in.corpus = data::make_corpus(records);
  if (embeddings.empty()) {
    std::cerr << "warning: no --embeddings given; using hashed bag-of-words features (dim "
              << fallback_dim << ")\n";
    in.embeddings = data::fallback_embeddings(records, fallback_dim, data::kFallbackSeed);
  } else {
    in.embeddings = data::load_embeddings(embeddings);
    if (manifest) manifest->add_input(embeddings);
  }
  return in;
}

train::TrainConfig load_train_config(const std::string& path, std::optional<std::uint64_t> seed,
                                     RunManifest* manifest) {
  train::TrainConfig c = path.empty() ? train::TrainConfig{} : train::load_config(path);
  if (!path.empty() && manifest) manifest->add_input(path);
  if (seed) c.seed = *seed;
  c.validate();
  return c;
}

RunManifest start_manifest(const std::string& command, int argc, char** argv) {
  RunManifest m;
  m.command = command;
  m.argv.assign(argv, argv + argc);
  m.tool_version = tool_version();
  return m;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

// ---------------------------------------------------------------------------

struct SplitArgs {
  std::string threads, mode = "intra", ratios = "4:1:1", out, manifest;
  std::uint64_t seed = 0;
};

int cmd_split(const SplitArgs& a, int argc, char** argv) {
  auto manifest = start_manifest("split", argc, argv);
  const auto records = data::load_threads(a.threads);
  manifest.add_input(a.threads);
  manifest.seed = a.seed;
  const auto split = data::make_split(records, data::parse_split_mode(a.mode),
                                      data::SplitRatios::parse(a.ratios), a.seed);
  const fs::path manifest_path = a.manifest.empty() ? fs::path(a.out + ".manifest.json")
                                                    : fs::path(a.manifest);
  manifest.outputs = {a.out};
  write_manifest(manifest, manifest_path);
  data::write_split(split, a.out);
  const auto counts = split.counts();
  std::cout << "split " << a.mode << ": train " << counts[0] << ", val " << counts[1]
            << ", test " << counts[2] << " posts -> " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string model = "tpcgcn", threads, embeddings, split, config, out_dir;
  std::optional<std::uint64_t> seed;
};

int cmd_train(const TrainArgs& a, int argc, char** argv) {
  auto manifest = start_manifest("train", argc, argv);
  const auto family = eval::parse_model_family(a.model);
  const auto config = load_train_config(a.config, a.seed, &manifest);
  const auto in = load_inputs(a.threads, a.embeddings, config.prep, config.fallback_dim, &manifest);
  const auto split = data::load_split(a.split);
  manifest.add_input(a.split);
  manifest.seed = config.seed;
  manifest.config_json = train::config_to_json(config);

  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  manifest.outputs = {(dir / "checkpoint.tpck").string(), (dir / "history.jsonl").string(),
                      (dir / "summary.json").string()};
  write_manifest(manifest, dir / "manifest.json");

  model::AnyModel trained;
  train::TrainHistory history;
  std::vector<std::string> topics;
  if (family == eval::ModelFamily::TpcGcn) {
    auto r = train::train_tpcgcn(in.corpus, in.embeddings, split, config);
    trained = std::move(r.model);
    history = std::move(r.history);
  } else {
    auto r = train::train_dtpcgcn(in.corpus, in.embeddings, split, config);
    trained = std::move(r.model);
    history = std::move(r.history);
    topics = std::move(r.topics);
  }
  for (const auto& w : history.warnings) std::cerr << "warning: " << w << "\n";

  model::save_model(dir / "checkpoint.tpck", trained);
  tensor::write_file_atomically(dir / "history.jsonl", train::history_to_jsonl(history));
  nlohmann::ordered_json summary;
  summary["model"] = a.model;
  summary["topics"] = topics;
  summary["best"] = nlohmann::ordered_json::array();
  for (const auto& b : history.best) {
    nlohmann::ordered_json j{{"stage", b.stage}, {"epoch", b.epoch}};
    if (b.branch) j["branch"] = *b.branch;
    j["score"] = b.score ? nlohmann::ordered_json(*b.score) : nlohmann::ordered_json(nullptr);
    summary["best"].push_back(j);
  }
  summary["warnings"] = history.warnings;
  tensor::write_file_atomically(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << "trained " << a.model << " for " << history.epochs.size()
            << " epochs -> " << (dir / "checkpoint.tpck").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string checkpoint, threads, embeddings, split, config, fold = "test", out;
};

// Fallback features must match the checkpoint's input width.
std::size_t raw_dim_of(const model::AnyModel& m) {
  if (const auto* d = std::get_if<model::DtpcGcnModel>(&m)) return d->u.reduction.in_dim();
  if (const auto* t = std::get_if<model::TpcGcnModel>(&m)) return t->reduction.in_dim();
  return std::get<model::BranchModel>(m).reduction.in_dim();
}

int cmd_eval(const EvalArgs& a, int argc, char** argv) {
  auto manifest = start_manifest("eval", argc, argv);
  const auto m = model::load_model(a.checkpoint);
  manifest.add_input(a.checkpoint);
  const auto config = load_train_config(a.config, std::nullopt, &manifest);
  const auto in = load_inputs(a.threads, a.embeddings, config.prep, raw_dim_of(m), &manifest);
  const auto split = data::load_split(a.split);
  manifest.add_input(a.split);
  if (!a.out.empty()) {
    manifest.outputs = {a.out};
    write_manifest(manifest, a.out + ".manifest.json");
  }
  const auto metrics =
      eval::evaluate(m, in.corpus, in.embeddings, split, data::parse_fold(a.fold));
  const auto json = eval::metrics_to_json(metrics);
  if (!a.out.empty()) tensor::write_file_atomically(a.out, json + "\n");
  std::cout << json << "\n"
            << eval::render_table({{std::string(model::model_kind(m)) + " (" + a.fold + ")",
                                    metrics}});
  return 0;
}

// ---------------------------------------------------------------------------

struct AblateArgs {
  std::string model = "tpcgcn", threads, embeddings, split, config, out_dir;
  std::vector<std::string> variants;
  std::optional<std::uint64_t> seed;
};

int cmd_ablate(const AblateArgs& a, int argc, char** argv) {
  auto manifest = start_manifest("ablate", argc, argv);
  const auto family = eval::parse_model_family(a.model);
  const auto config = load_train_config(a.config, a.seed, &manifest);
  const auto in = load_inputs(a.threads, a.embeddings, config.prep, config.fallback_dim, &manifest);
  const auto split = data::load_split(a.split);
  manifest.add_input(a.split);
  manifest.seed = config.seed;
  manifest.config_json = train::config_to_json(config);

  std::vector<std::string> names = a.variants;
  if (names.size() == 1 && names[0] == "all") {
    names.clear();
    for (const auto& n : eval::ablation_names()) {
      if (family == eval::ModelFamily::TpcGcn && n.find("branch") != std::string::npos) continue;
      names.push_back(n);
    }
  }
  std::vector<eval::AblationSpec> specs;
  for (const auto& n : names) specs.push_back(eval::parse_ablation(n));

  std::optional<fs::path> dir;
  if (!a.out_dir.empty()) {
    dir = fs::path(a.out_dir);
    ensure_dir(*dir);
    manifest.outputs = {(*dir / "ablation.json").string()};
    write_manifest(manifest, *dir / "manifest.json");
  }
  std::vector<std::pair<std::string, eval::Metrics>> rows;
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  for (const auto& spec : specs) {
    const auto r = eval::run_ablation(spec, family, in.corpus, in.embeddings, split, config);
    rows.emplace_back(spec.name, r.test);
    results[spec.name] = nlohmann::ordered_json::parse(eval::metrics_to_json(r.test));
  }
  if (dir) tensor::write_file_atomically(*dir / "ablation.json", results.dump(2) + "\n");
  std::cout << eval::render_table(rows);
  return 0;
}

// ---------------------------------------------------------------------------

struct AttentionArgs {
  std::string checkpoint, threads, embeddings, split, config, fold = "test", out;
};

int cmd_attention(const AttentionArgs& a, int argc, char** argv) {
  auto manifest = start_manifest("attention", argc, argv);
  const auto m = model::load_model(a.checkpoint);
  manifest.add_input(a.checkpoint);
  const auto config = load_train_config(a.config, std::nullopt, &manifest);
  const auto in = load_inputs(a.threads, a.embeddings, config.prep, raw_dim_of(m), &manifest);
  const auto split = data::load_split(a.split);
  manifest.add_input(a.split);
  const auto records =
      eval::export_attention(m, in.corpus, in.embeddings, split, data::parse_fold(a.fold));
  manifest.outputs = {a.out};
  write_manifest(manifest, a.out + ".manifest.json");
  tensor::write_file_atomically(a.out, eval::attention_to_jsonl(records));
  std::cout << records.size() << " attention records -> " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  data::SyntheticSpec spec;
  std::string carrier = "both", out_threads, out_embeddings, format = "jsonl";
};

int cmd_synth(SynthArgs a) {
  if (a.carrier == "both") a.spec.carrier = data::SignalCarrier::PostAndComments;
  else if (a.carrier == "comments") a.spec.carrier = data::SignalCarrier::CommentsOnly;
  else if (a.carrier == "posts") a.spec.carrier = data::SignalCarrier::PostsOnly;
  else throw ValidationError("unknown carrier '" + a.carrier + "' (both, comments, posts)");
  const auto ds = data::make_synthetic(a.spec);
  data::write_threads(a.out_threads, ds.records);
  if (!a.out_embeddings.empty()) {
    data::write_embeddings(ds.embeddings, a.out_embeddings,
                           a.format == "binary" ? data::EmbeddingFormat::Binary
                                                : data::EmbeddingFormat::Jsonl);
  }
  std::cout << ds.records.size() << " posts -> " << a.out_threads << "\n";
  return 0;
}

struct GraphDumpArgs {
  std::string threads, topic;
  bool rebuild = false;
};

int cmd_graph_dump(const GraphDumpArgs& a) {
  data::PrepOptions prep;
  prep.rebuild_replies = a.rebuild;
  const auto records = data::prepare_threads(data::load_threads(a.threads), prep);
  bool found = false;
  for (const auto& g : data::build_topic_graphs(records)) {
    if (!a.topic.empty() && g.topic != a.topic) continue;
    found = true;
    std::cout << "# topic " << g.topic << ": " << g.node_count() << " nodes, " << g.edge_count()
              << " edges\n"
              << graph::dump_edge_list(g);
  }
  if (!found) throw ValidationError("no topic '" + a.topic + "' in " + a.threads);
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Controversy detection on topic-post-comment graphs"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  SplitArgs split_a;
  auto* split = app.add_subcommand("split", "Assign posts to train/val/test folds");
  split->add_option("--threads", split_a.threads, "Thread JSONL")->required();
  split->add_option("--mode", split_a.mode, "intra or inter")->capture_default_str();
  split->add_option("--ratios", split_a.ratios, "A:B:C")->capture_default_str();
  split->add_option("--seed", split_a.seed)->capture_default_str();
  split->add_option("--out", split_a.out, "Split JSON")->required();
  split->add_option("--manifest", split_a.manifest, "Manifest path (default OUT.manifest.json)");

  TrainArgs train_a;
  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--model", train_a.model, "tpcgcn or dtpcgcn")->capture_default_str();
  train->add_option("--threads", train_a.threads)->required();
  train->add_option("--embeddings", train_a.embeddings,
                    "Embedding JSONL or binary (default: hashed bag-of-words)");
  train->add_option("--split", train_a.split)->required();
  train->add_option("--config", train_a.config, "Training config JSON");
  train->add_option("--seed", train_a.seed, "Overrides the config seed");
  train->add_option("--out-dir", train_a.out_dir)->required();

  EvalArgs eval_a;
  auto* ev = app.add_subcommand("eval", "Score a checkpoint on one fold");
  ev->add_option("--checkpoint", eval_a.checkpoint)->required();
  ev->add_option("--threads", eval_a.threads)->required();
  ev->add_option("--embeddings", eval_a.embeddings);
  ev->add_option("--split", eval_a.split)->required();
  ev->add_option("--config", eval_a.config, "Config used in training (data preparation)");
  ev->add_option("--fold", eval_a.fold, "train, val or test")->capture_default_str();
  ev->add_option("--out", eval_a.out, "Metrics JSON");

  AblateArgs ablate_a;
  auto* ablate = app.add_subcommand("ablate", "Train and test ablated variants");
  ablate->add_option("--model", ablate_a.model)->capture_default_str();
  ablate->add_option("--variant", ablate_a.variants,
                     "full, drop-topic, drop-comments, rand-topic, rand-post, rand-comment, "
                     "u-branch, r-branch, or all")
      ->required();
  ablate->add_option("--threads", ablate_a.threads)->required();
  ablate->add_option("--embeddings", ablate_a.embeddings);
  ablate->add_option("--split", ablate_a.split)->required();
  ablate->add_option("--config", ablate_a.config);
  ablate->add_option("--seed", ablate_a.seed);
  ablate->add_option("--out-dir", ablate_a.out_dir);

  AttentionArgs att_a;
  auto* att = app.add_subcommand("attention", "Export branch attention weights");
  att->add_option("--checkpoint", att_a.checkpoint)->required();
  att->add_option("--threads", att_a.threads)->required();
  att->add_option("--embeddings", att_a.embeddings);
  att->add_option("--split", att_a.split)->required();
  att->add_option("--config", att_a.config);
  att->add_option("--fold", att_a.fold)->capture_default_str();
  att->add_option("--out", att_a.out, "Attention JSONL")->required();

  SynthArgs synth_a;
  auto* synth = app.add_subcommand("synth", "Write a planted-signal fixture");
  synth->add_option("--topics", synth_a.spec.topics)->capture_default_str();
  synth->add_option("--posts", synth_a.spec.posts_per_topic)->capture_default_str();
  synth->add_option("--comments", synth_a.spec.comments_per_post)->capture_default_str();
  synth->add_option("--dim", synth_a.spec.dim)->capture_default_str();
  synth->add_option("--carrier", synth_a.carrier, "both, comments or posts")
      ->capture_default_str();
  synth->add_option("--controversy-signal", synth_a.spec.controversy_signal)
      ->capture_default_str();
  synth->add_option("--topic-signal", synth_a.spec.topic_signal)->capture_default_str();
  synth->add_option("--noise", synth_a.spec.noise)->capture_default_str();
  synth->add_option("--seed", synth_a.spec.seed)->capture_default_str();
  synth->add_option("--out-threads", synth_a.out_threads)->required();
  synth->add_option("--out-embeddings", synth_a.out_embeddings);
  synth->add_option("--format", synth_a.format, "jsonl or binary")->capture_default_str();

  GraphDumpArgs dump_a;
  auto* dump = app.add_subcommand("graph-dump", "Print topic graphs as edge lists");
  dump->add_option("--threads", dump_a.threads)->required();
  dump->add_option("--topic", dump_a.topic);
  dump->add_flag("--rebuild-replies", dump_a.rebuild);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (split->parsed()) return cmd_split(split_a, argc, argv);
    if (train->parsed()) return cmd_train(train_a, argc, argv);
    if (ev->parsed()) return cmd_eval(eval_a, argc, argv);
    if (ablate->parsed()) return cmd_ablate(ablate_a, argc, argv);
    if (att->parsed()) return cmd_attention(att_a, argc, argv);
    if (synth->parsed()) return cmd_synth(synth_a);
    if (dump->parsed()) return cmd_graph_dump(dump_a);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace tpcgcn::cli
