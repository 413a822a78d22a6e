#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.h"
#include "json.hpp"
#include "testing.h"

namespace precedence {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::fixture_path;
using testing::read_text;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "precedence");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir("cli");
    const Result r = invoke({"synth", "--documents", "12", "--seed", "5", "--out",
                             (dir_->path() / "synth").string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::string synth(const std::string& name) {
    return (dir_->path() / "synth" / name).string();
  }
  static std::string path(const std::string& name) { return (dir_->path() / name).string(); }

  static testing::TempDir* dir_;
};

testing::TempDir* Cli::dir_ = nullptr;

TEST_F(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(invoke({"--help"}).code, 0);
  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"frobnicate"}).code, 1);
  EXPECT_EQ(invoke({"kappa", synth("annotations.json")}).code, 1);
  EXPECT_EQ(invoke({"synth"}).code, 1);
}

TEST_F(Cli, SynthWritesAllFilesAndManifest) {
  for (const char* f : {"corpus.conllu", "mentions.json", "annotations.json", "corpus.json",
                        "violations.json", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(synth(f))) << f;
  }
  const json m = json::parse(read_text(synth("manifest.json")));
  EXPECT_EQ(m["command"], "synth");
  EXPECT_EQ(m["seed"], 5);
  EXPECT_EQ(m["config"]["documents"], 12);
  EXPECT_TRUE(m.contains("version"));
  EXPECT_TRUE(m.contains("timestamp"));
  EXPECT_EQ(m["outputs"].size(), 5u);
}

TEST_F(Cli, IngestThenCandidatesMatchPlantedPairs) {
  const Result ingest = invoke({"ingest", "--conllu", synth("corpus.conllu"), "--mentions",
                                synth("mentions.json"), "--out", path("ingest")});
  ASSERT_EQ(ingest.code, 0) << ingest.err;
  const json manifest = json::parse(read_text(path("ingest/manifest.json")));
  ASSERT_EQ(manifest["inputs"].size(), 2u);
  for (const auto& [file, digest] : manifest["inputs"].items()) {
    EXPECT_EQ(digest.get<std::string>().size(), 64u) << file;
  }
  const Result binary = invoke({"ingest", "--conllu", synth("corpus.conllu"), "--mentions",
                                synth("mentions.json"), "--binary", "--out", path("ingest-bin")});
  ASSERT_EQ(binary.code, 0) << binary.err;

  for (const std::string& bundle : {path("ingest/corpus.json"), path("ingest-bin/corpus.cbor")}) {
    const Result cand = invoke({"candidates", "--corpus", bundle});
    ASSERT_EQ(cand.code, 0) << cand.err;
    const json got = json::parse(cand.out);
    const json planted = json::parse(read_text(synth("annotations.json")));
    std::set<std::string> a;
    std::set<std::string> b;
    for (const json& p : got) a.insert(p["pair_id"].get<std::string>());
    for (const json& p : planted) b.insert(p["pair_id"].get<std::string>());
    EXPECT_EQ(a, b);
  }
}

TEST_F(Cli, CandidatesOnExampleFixture) {
  const std::vector<std::string> base = {
      "candidates", "--conllu", fixture_path("worked_examples.conllu"), "--mentions",
      fixture_path("worked_examples.mentions.json")};
  const auto ids = [](const Result& r) {
    std::set<std::string> out;
    for (const json& p : json::parse(r.out)) out.insert(p["pair_id"].get<std::string>());
    return out;
  };
  const Result strict = invoke(base);
  ASSERT_EQ(strict.code, 0) << strict.err;
  EXPECT_TRUE(ids(strict).count("ex6:ex6.e1:ex6.e2"));
  EXPECT_FALSE(ids(strict).count("ex6:ex6.e1:ex6.e3"));
  std::vector<std::string> loose = base;
  loose.push_back("--allow-same-type");
  const Result relaxed = invoke(loose);
  ASSERT_EQ(relaxed.code, 0) << relaxed.err;
  EXPECT_TRUE(ids(relaxed).count("ex6:ex6.e1:ex6.e3"));
}

TEST_F(Cli, KappaOnIdenticalFilesIsOne) {
  const Result r = invoke({"kappa", synth("annotations.json"), synth("annotations.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "1.0\n");
  const Result j = invoke({"--json", "kappa", synth("annotations.json"),
                           synth("annotations.json"), "--coarse"});
  ASSERT_EQ(j.code, 0) << j.err;
  const json parsed = json::parse(j.out);
  EXPECT_EQ(parsed["kappa"], 1.0);
  EXPECT_EQ(parsed["coarse"], true);
}

TEST_F(Cli, KappaMirrorsSwappedPairs) {
  json a = json::parse(read_text(fixture_path("worked_examples.annotations.json")));
  json b = a;
  for (json& p : b) {
    std::swap(p["e1_id"], p["e2_id"]);
    const std::string l = p["label"];
    if (l == "E1 precedes E2") p["label"] = "E2 precedes E1";
    else if (l == "E2 precedes E1") p["label"] = "E1 precedes E2";
  }
  {
    std::ofstream(path("a.json")) << a.dump();
    std::ofstream(path("b.json")) << b.dump();
  }
  const Result r = invoke({"kappa", path("a.json"), path("b.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "1.0\n");
}

TEST_F(Cli, ExitCodesForIoAndValidationErrors) {
  const Result missing = invoke({"kappa", path("none.json"), synth("annotations.json")});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("error:"), std::string::npos);
  { std::ofstream(path("broken.json")) << "[{\"pair_id\": 1"; }
  EXPECT_EQ(invoke({"kappa", path("broken.json"), synth("annotations.json")}).code, 1);
  EXPECT_EQ(invoke({"evaluate", "--corpus", synth("corpus.json"), "--pairs",
                    synth("annotations.json"), "--folds", "2", "--models", "intra"})
                .code,
            1);
  EXPECT_EQ(invoke({"evaluate", "--corpus", synth("corpus.json"), "--pairs",
                    synth("annotations.json"), "--models", "crf"})
                .code,
            1);
}

TEST_F(Cli, EvaluateIsByteIdenticalAcrossRuns) {
  const std::vector<std::string> args = {
      "evaluate", "--corpus", synth("corpus.json"), "--pairs", synth("annotations.json"),
      "--folds", "4", "--bootstrap", "200", "--models", "intra,inter,reichenbach,lr-l2,rf",
      "--seed", "3", "--jobs", "2"};
  std::vector<std::string> first = args;
  first.insert(first.end(), {"--out", path("eval1")});
  std::vector<std::string> second = args;
  second.insert(second.end(), {"--out", path("eval2")});
  const Result a = invoke(first);
  ASSERT_EQ(a.code, 0) << a.err;
  const Result b = invoke(second);
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, b.out);
  for (const char* f : {"report.json", "report.txt", "curve.csv"}) {
    EXPECT_EQ(read_text(path(std::string("eval1/") + f)),
              read_text(path(std::string("eval2/") + f)))
        << f;
  }
  const json manifest = json::parse(read_text(path("eval1/manifest.json")));
  EXPECT_EQ(manifest["command"], "evaluate");
  EXPECT_EQ(manifest["config"]["folds"], 4);

  const Result overlap = invoke({"overlap", "--report", path("eval1/report.json"),
                                 "--out", path("overlap")});
  ASSERT_EQ(overlap.code, 0) << overlap.err;
  EXPECT_TRUE(fs::exists(path("overlap/overlap.csv")));
  EXPECT_NE(overlap.out.find("intersection,"), std::string::npos);
}

TEST_F(Cli, NetworkOverridesReachEvaluateAndSieve) {
  for (const char* command : {"evaluate", "sieve"}) {
    const std::string out = path(std::string("override-") + command);
    const Result r = invoke({command, "--corpus", synth("corpus.json"), "--pairs",
                             synth("annotations.json"), "--folds", "3", "--bootstrap", "10",
                             "--models", "lstm", "--epochs", "2", "--embedding-dim", "7",
                             "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    const json config = json::parse(read_text(out + "/manifest.json"))["config"]["models"][0];
    EXPECT_EQ(config["epochs"], 2) << command;
    EXPECT_EQ(config["embedding_dim"], 7) << command;
  }
}

TEST_F(Cli, SieveReportsPlanAndCurve) {
  const Result r = invoke({"--json", "sieve", "--corpus", synth("corpus.json"), "--pairs",
                           synth("annotations.json"), "--folds", "3", "--plan-mode", "pooled",
                           "--bootstrap", "50", "--models", "intra,inter,lr-l1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["plans"].size(), 1u);
  EXPECT_EQ(j["curve"].size(), 3u);
}

TEST_F(Cli, TrainThenPredict) {
  const Result t = invoke({"train", "--corpus", synth("corpus.json"), "--pairs",
                           synth("annotations.json"), "--models", "lr-l2", "--out",
                           path("train")});
  ASSERT_EQ(t.code, 0) << t.err;
  ASSERT_TRUE(fs::exists(path("train/model.json")));
  const Result p = invoke({"--json", "predict", "--corpus", synth("corpus.json"), "--model",
                           path("train/model.json"), "--pairs", synth("annotations.json")});
  ASSERT_EQ(p.code, 0) << p.err;
  const json j = json::parse(p.out);
  ASSERT_TRUE(j.contains("metrics"));
  EXPECT_GT(j["metrics"]["f1"].get<double>(), 0.8);
  EXPECT_EQ(invoke({"train", "--corpus", synth("corpus.json"), "--pairs",
                    synth("annotations.json"), "--models", "lr-l1,lr-l2"})
                .code,
            1);
}

TEST_F(Cli, DistributionsCsv) {
  const Result r = invoke({"distributions", "--corpus", synth("corpus.json"), "--pairs",
                           synth("annotations.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("label,within_sentence,across_sentences", 0), 0u);
}

}  // namespace
}  // namespace precedence
