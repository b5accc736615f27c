#include "rovist/cli.h"

#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "rovist/coherence.h"
#include "rovist/corpus.h"
#include "rovist/vg.h"
#include "toy_data.h"

namespace rovist::cli {
namespace {

using nlohmann::json;
using rovist::testing::TempDir;
using rovist::testing::WriteText;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "rovist");
  std::ostringstream out, err;
  Result r;
  r.code = Run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<json> JsonLines(const std::string& text) {
  std::vector<json> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(json::parse(line));
  return lines;
}

class CliTest : public ::testing::Test {
 protected:
  CliTest() : dir_("cli") {
    WriteText(dir_ / "stories.jsonl",
              R"({"story_id": "s1", "model_id": "m1", "sentences": ["The dog ran.", "The dog sat."], "image_ids": ["a", "b"]})"
              "\n"
              R"({"story_id": "s1", "model_id": "m2", "sentences": ["A cat slept.", "It woke up.", "It ate."], "image_ids": ["a", "b"]})"
              "\n"
              R"({"story_id": "s2", "model_id": "m1", "sentences": ["We saw a ghost."], "image_ids": ["z"]})"
              "\n");
    std::string regions;
    for (const char* image : {"a", "b"}) {
      for (int k = 0; k < 3; ++k) {
        json j = {{"image_id", image},
                  {"bbox", {0, 0, 5 + k, 5}},
                  {"confidence", 0.3 * k},
                  {"features", {0.1 * k, -0.2, 0.3, 0.05 * k}}};
        regions += j.dump() + "\n";
      }
    }
    WriteText(dir_ / "regions.jsonl", regions);
    VgEncoderParams::Initialize(4, kWordVectorDim, 8, 1).Save(dir_ / "vg.params");
    CoherenceModel model{std::make_shared<HashedPairEncoder>(16), {}};
    model.head.weight = Eigen::MatrixXd::Constant(2, 16, 0.05);
    model.Save(dir_ / "c.json");
  }

  std::string P(const std::string& name) const { return (dir_ / name).string(); }

  std::vector<std::string> FullScore() const {
    return {"score", "--stories", P("stories.jsonl"), "--regions", P("regions.jsonl"),
            "--vg", P("vg.params"), "--c", P("c.json")};
  }

  TempDir dir_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(Invoke({"--help"}).code, kExitOk);
  EXPECT_EQ(Invoke({}).code, kExitConfigError);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitConfigError);
  EXPECT_EQ(Invoke({"score"}).code, kExitConfigError);  // --stories is required
  EXPECT_EQ(Invoke({"score", "--stories", P("stories.jsonl"), "--bogus"}).code, kExitConfigError);
}

TEST_F(CliTest, MissingFilesFailBeforeWork) {
  const Result r = Invoke({"score", "--stories", P("nope.jsonl"), "--only", "nr"});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("--stories"), std::string::npos);
  EXPECT_TRUE(r.out.empty());

  auto args = FullScore();
  args[6] = P("absent.params");
  const Result vg = Invoke(args);
  EXPECT_EQ(vg.code, kExitConfigError);
  EXPECT_NE(vg.err.find("--vg"), std::string::npos);
}

TEST_F(CliTest, ScoreReportsPartialFailures) {
  const Result r = Invoke(FullScore());
  EXPECT_EQ(r.code, kExitItemFailures);
  const auto lines = JsonLines(r.out);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0]["model_id"], "m1");
  EXPECT_TRUE(lines[0]["total"].is_number());
  EXPECT_EQ(lines[1]["model_id"], "m2");
  EXPECT_EQ(lines[2]["summary"]["errors"][0]["story_id"], "s2");
  EXPECT_NE(r.err.find("error: story s2"), std::string::npos);
}

TEST_F(CliTest, OnlySubsetAndValidation) {
  const Result r = Invoke({"score", "--stories", P("stories.jsonl"), "--only", "nr,c", "--c",
                           P("c.json")});
  EXPECT_EQ(r.code, kExitOk);
  const auto lines = JsonLines(r.out);
  EXPECT_TRUE(lines[0]["vg_scaled"].is_null());
  EXPECT_TRUE(lines[0]["total"].is_null());
  EXPECT_TRUE(lines[0]["nr"].is_number());
  EXPECT_TRUE(lines[2]["coherence"].is_number());  // single-sentence story scores 1

  EXPECT_EQ(Invoke({"score", "--stories", P("stories.jsonl"), "--only", "nr,xyz"}).code,
            kExitConfigError);
  EXPECT_EQ(Invoke({"score", "--stories", P("stories.jsonl"), "--only", "vg"}).code,
            kExitConfigError);  // needs --regions and --vg
  auto args = FullScore();
  args.insert(args.end(), {"--no-idf", "--idf-table", P("idf.json")});
  EXPECT_EQ(Invoke(args).code, kExitConfigError);
}

TEST_F(CliTest, RawVgAndVerboseFlags) {
  auto args = FullScore();
  args.insert(args.end(), {"--raw-vg", "--verbose", "--no-idf", "--top-regions", "2"});
  const auto lines = JsonLines(Invoke(args).out);
  EXPECT_TRUE(lines[0].contains("vg_raw"));
  EXPECT_TRUE(lines[0].contains("diagnostics"));
  for (const auto& n : lines[0]["diagnostics"]["grounding"]["nouns"]) {
    EXPECT_EQ(n["idf"], 1.0);
  }
}

TEST_F(CliTest, OutFlagAndJobsGiveSameBytes) {
  auto a = FullScore();
  a.insert(a.end(), {"--out", P("r1.jsonl")});
  auto b = FullScore();
  b.insert(b.end(), {"--out", P("r2.jsonl"), "--jobs", "3"});
  const Result ra = Invoke(a);
  EXPECT_TRUE(ra.out.empty());
  Invoke(b);
  EXPECT_EQ(rovist::testing::ReadText(dir_ / "r1.jsonl"),
            rovist::testing::ReadText(dir_ / "r2.jsonl"));
  EXPECT_EQ(rovist::testing::ReadText(dir_ / "r1.jsonl"), Invoke(FullScore()).out);
}

TEST_F(CliTest, IdfTableFlag) {
  ASSERT_EQ(Invoke({"build-idf", "--stories", P("stories.jsonl"), "--out", P("idf.json")}).code,
            kExitOk);
  const IdfTable table = IdfTable::Load(dir_ / "idf.json");
  EXPECT_EQ(table.story_count(), 3u);
  EXPECT_EQ(table.DocFreq("dog"), 1u);
  auto args = FullScore();
  args.insert(args.end(), {"--idf-table", P("idf.json")});
  // The table equals the one computed from the candidates, so the output matches.
  EXPECT_EQ(Invoke(args).out, Invoke(FullScore()).out);
}

TEST_F(CliTest, ConfigFileSuppliesDefaults) {
  WriteText(dir_ / "run.cfg",
            "# scoring defaults\n"
            "regions = " + P("regions.jsonl") + "\n"
            "vg = " + P("vg.params") + "\n"
            "c = \"" + P("c.json") + "\"\n"
            "raw-vg = true\n"
            "verbose = false\n"
            "only = vg,c\n");
  const Result r = Invoke({"score", "--stories", P("stories.jsonl"), "--config", P("run.cfg")});
  const auto lines = JsonLines(r.out);
  ASSERT_GE(lines.size(), 1u);
  EXPECT_TRUE(lines[0].contains("vg_raw"));
  EXPECT_FALSE(lines[0].contains("diagnostics"));
  EXPECT_TRUE(lines[0]["nr"].is_null());
  // The command line wins.
  const Result o = Invoke({"score", "--stories", P("stories.jsonl"), "--config", P("run.cfg"),
                           "--only", "nr"});
  EXPECT_EQ(o.code, kExitOk);
  EXPECT_TRUE(JsonLines(o.out)[0]["vg_scaled"].is_null());

  WriteText(dir_ / "bad.cfg", "just words\n");
  EXPECT_EQ(Invoke({"score", "--config", P("bad.cfg")}).code, kExitConfigError);
  EXPECT_EQ(Invoke({"score", "--config", P("missing.cfg")}).code, kExitConfigError);
}

TEST_F(CliTest, BuildSopAndTrainCoherence) {
  ASSERT_EQ(Invoke({"build-sop", "--stories", P("stories.jsonl"), "--out", P("sop.jsonl"),
                    "--seed", "4"})
                .code,
            kExitOk);
  EXPECT_EQ(LoadSopDataset(dir_ / "sop.jsonl").size(), 6u);
  const Result r = Invoke({"train-c", "--sop", P("sop.jsonl"), "--out", P("c2.json"), "--epochs",
                           "2", "--pooled-dim", "32", "--lr", "0.01"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("epoch 1"), std::string::npos);
  const CoherenceModel model = CoherenceModel::Load(dir_ / "c2.json");
  EXPECT_EQ(model.pooled_dim(), 32u);
  EXPECT_EQ(Invoke({"train-c", "--sop", P("sop.jsonl"), "--out", P("c3.json"), "--batch", "0"})
                .code,
            kExitConfigError);
}

TEST_F(CliTest, TrainVg) {
  std::string pairs;
  for (int k = 0; k < 12; ++k) {
    json j = {{"entity_text", "the thing" + std::to_string(k)},
              {"image_id", "i" + std::to_string(k)},
              {"bbox", {0, 0, 1, 1}},
              {"features", {0.1 * k, 0.2, -0.1 * k, 0.3, 0.0, 1.0}}};
    pairs += j.dump() + "\n";
  }
  WriteText(dir_ / "pairs.jsonl", pairs);
  const Result r = Invoke({"train-vg", "--pairs", P("pairs.jsonl"), "--out", P("vg2.params"),
                           "--epochs", "2", "--embed-dim", "8", "--vision-dim", "6", "--batch",
                           "4"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const VgEncoderParams p = VgEncoderParams::Load(dir_ / "vg2.params");
  EXPECT_EQ(p.embed_dim(), 8u);
  EXPECT_EQ(p.feature_dim(), 6u);
  EXPECT_EQ(p.word_dim(), kWordVectorDim);
  EXPECT_NE(r.err.find("keeping epoch"), std::string::npos);
}

TEST_F(CliTest, Correlate) {
  std::string judgments;
  int k = 0;
  for (const char* key : {"s1|m1", "s1|m2", "s2|m1"}) {
    const std::string s(key);
    for (const char* annotator : {"x", "y"}) {
      json j = {{"story_id", s.substr(0, 2)},
                {"model_id", s.substr(3)},
                {"annotator_id", annotator},
                {"grounding", 1 + k % 5},
                {"coherence", 1 + (k * 2) % 5},
                {"non_redundancy", 1 + (k * 3) % 5},
                {"voted_best", s == "s1|m1" || s == "s2|m1"}};
      judgments += j.dump() + "\n";
      ++k;
    }
  }
  WriteText(dir_ / "judgments.jsonl", judgments);
  auto args = FullScore();
  args[2] = P("stories.jsonl");
  args.insert(args.end(), {"--only", "c,nr", "--out", P("rep.jsonl")});
  ASSERT_EQ(Invoke(args).code, kExitOk);

  const Result nr = Invoke({"correlate", "--reports", P("rep.jsonl"), "--judgments",
                            P("judgments.jsonl"), "--criterion", "non_redundancy"});
  ASSERT_EQ(nr.code, kExitOk) << nr.err;
  EXPECT_EQ(nr.out.find("criterion"), 0u);
  EXPECT_NE(nr.out.find("non_redundancy"), std::string::npos);
  // Overall needs the total, which a c,nr report lacks.
  const Result all = Invoke({"correlate", "--reports", P("rep.jsonl"), "--judgments",
                             P("judgments.jsonl")});
  EXPECT_EQ(all.code, kExitConfigError);
  EXPECT_NE(all.err.find("lacking"), std::string::npos);

  const Result votes = Invoke({"correlate", "--judgments", P("judgments.jsonl"), "--by-votes",
                               "--criterion", "all"});
  // s2 has a single model, which the vote ranking rejects.
  EXPECT_EQ(votes.code, kExitConfigError);
  EXPECT_NE(votes.err.find("s2"), std::string::npos);
  EXPECT_EQ(Invoke({"correlate", "--judgments", P("judgments.jsonl")}).code, kExitConfigError);
  EXPECT_EQ(Invoke({"correlate", "--judgments", P("judgments.jsonl"), "--by-votes",
                    "--likert-max", "3"})
                .code,
            kExitConfigError);
}

}  // namespace
}  // namespace rovist::cli
