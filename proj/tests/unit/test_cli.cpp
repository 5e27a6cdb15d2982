#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tpcgcn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  Outcome run(const std::string& args) const {
    const auto out = dir_ / "stdout.txt";
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = std::string("'") + TPCGCN_BIN + "' " + args + " >'" + out.string() +
                            "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }

  // Small, strongly separable fixture plus a config that fits it quickly.
  void fixture(int topics, int posts) const {
    const auto r = run("synth --topics " + std::to_string(topics) + " --posts " +
                       std::to_string(posts) +
                       " --comments 2 --dim 8 --controversy-signal 2 --noise 0.1 --topic-signal 1"
                       " --out-threads " + path("t.jsonl").string() +
                       " --out-embeddings " + path("e.jsonl").string());
    ASSERT_EQ(r.code, 0) << r.err;
    write("cfg.json",
          R"({"lr": 0.05, "epochs": 40, "reduced_dim": 8, "hidden_dim": 6,
              "branch_hidden_dim": 6, "branch_fused_dim": 4, "attn_dim": 4,
              "stage_epochs": [5, 15, 10]})");
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SplitFoldsAndDeterminism) {
  fixture(1, 6);
  const auto r = run("split --threads " + path("t.jsonl").string() + " --seed 3 --out " +
                     path("s.json").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = json::parse(slurp(path("s.json")));
  EXPECT_EQ(s["train"].size(), 4u);
  EXPECT_EQ(s["val"].size(), 1u);
  EXPECT_EQ(s["test"].size(), 1u);
  const auto m = json::parse(slurp(path("s.json.manifest.json")));
  EXPECT_EQ(m["command"], "split");
  EXPECT_EQ(m["seed"], 3);
  EXPECT_EQ(m["inputs"][path("t.jsonl").string()]["sha256"].get<std::string>().size(), 64u);

  ASSERT_EQ(run("split --threads " + path("t.jsonl").string() + " --seed 3 --out " +
                path("s2.json").string()).code, 0);
  EXPECT_EQ(slurp(path("s.json")), slurp(path("s2.json")));
}

TEST_F(Cli, InterSplitNeedsThreeTopics) {
  fixture(6, 3);
  ASSERT_EQ(run("split --mode inter --threads " + path("t.jsonl").string() + " --out " +
                path("s.json").string()).code, 0);
  const auto s = json::parse(slurp(path("s.json")));
  EXPECT_EQ(s["mode"], "inter");
  EXPECT_EQ(s["train"].size(), 12u);
  EXPECT_EQ(s["test"].size(), 3u);

  fixture(2, 3);
  const auto r = run("split --mode inter --threads " + path("t.jsonl").string() + " --out " +
                     path("s.json").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST_F(Cli, TrainIsReproducibleAndEvalScores) {
  fixture(2, 8);
  ASSERT_EQ(run("split --threads " + path("t.jsonl").string() + " --out " +
                path("s.json").string()).code, 0);
  const std::string common = " --threads " + path("t.jsonl").string() + " --embeddings " +
                             path("e.jsonl").string() + " --split " + path("s.json").string() +
                             " --config " + path("cfg.json").string();
  const auto a = run("train" + common + " --out-dir " + path("a").string());
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(run("train" + common + " --out-dir " + path("b").string()).code, 0);
  for (const char* f : {"checkpoint.tpck", "history.jsonl", "summary.json"})
    EXPECT_EQ(slurp(path("a") / f), slurp(path("b") / f)) << f;
  const auto manifest = json::parse(slurp(path("a") / "manifest.json"));
  EXPECT_EQ(manifest["command"], "train");
  EXPECT_EQ(manifest["outputs"].size(), 3u);

  const auto c = run("train" + common + " --seed 9 --out-dir " + path("c").string());
  ASSERT_EQ(c.code, 0);
  EXPECT_NE(slurp(path("a") / "checkpoint.tpck"), slurp(path("c") / "checkpoint.tpck"));

  const auto e = run("eval --checkpoint " + (path("a") / "checkpoint.tpck").string() +
                     " --fold train" + common + " --out " + path("m.json").string());
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("1.000"), std::string::npos) << e.out;
  const auto m = json::parse(slurp(path("m.json")));
  EXPECT_EQ(m["acc"], 1.0);
  EXPECT_EQ(m["zero_division"], 0);
  EXPECT_TRUE(m["per_class"].contains("1"));
}

TEST_F(Cli, DtpcAttentionExport) {
  fixture(2, 8);
  ASSERT_EQ(run("split --threads " + path("t.jsonl").string() + " --out " +
                path("s.json").string()).code, 0);
  const std::string common = " --threads " + path("t.jsonl").string() + " --embeddings " +
                             path("e.jsonl").string() + " --split " + path("s.json").string() +
                             " --config " + path("cfg.json").string();
  const auto t = run("train --model dtpcgcn" + common + " --out-dir " + path("d").string());
  ASSERT_EQ(t.code, 0) << t.err;
  const auto a = run("attention --checkpoint " + (path("d") / "checkpoint.tpck").string() +
                     common + " --fold test --out " + path("att.jsonl").string());
  ASSERT_EQ(a.code, 0) << a.err;
  std::istringstream lines(slurp(path("att.jsonl")));
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const auto j = json::parse(line);
    EXPECT_NEAR(j["alpha_u"].get<double>() + j["alpha_r"].get<double>(), 1.0, 1e-12);
    ++n;
  }
  EXPECT_EQ(n, 2);  // 8 posts per topic split 6/1/1
}

TEST_F(Cli, ExitCodes) {
  fixture(1, 6);
  ASSERT_EQ(run("split --threads " + path("t.jsonl").string() + " --out " +
                path("s.json").string()).code, 0);
  const auto d = run("train --model dtpcgcn --threads " + path("t.jsonl").string() +
                     " --embeddings " + path("e.jsonl").string() + " --split " +
                     path("s.json").string() + " --config " + path("cfg.json").string() +
                     " --out-dir " + path("d").string());
  EXPECT_EQ(d.code, 1);
  EXPECT_NE(d.err.find(">=2 topics"), std::string::npos) << d.err;

  EXPECT_EQ(run("train --bogus-flag").code, 1);
  EXPECT_EQ(run("split --threads " + path("missing.jsonl").string() + " --out " +
                path("x.json").string()).code, 2);
  write("bad.jsonl", "{\"id\": 3}\n");
  const auto bad = run("graph-dump --threads " + path("bad.jsonl").string());
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find(":1:"), std::string::npos) << bad.err;
}

TEST_F(Cli, FallbackFeaturesAndGraphDump) {
  fixture(2, 6);
  ASSERT_EQ(run("split --threads " + path("t.jsonl").string() + " --out " +
                path("s.json").string()).code, 0);
  const auto r = run("train --threads " + path("t.jsonl").string() + " --split " +
                     path("s.json").string() + " --config " + path("cfg.json").string() +
                     " --out-dir " + path("f").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  const auto g = run("graph-dump --threads " + path("t.jsonl").string() + " --topic topic1");
  ASSERT_EQ(g.code, 0);
  EXPECT_NE(g.out.find("# topic topic1"), std::string::npos);
  EXPECT_EQ(g.out.find("# topic topic0"), std::string::npos);
}
