#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace tasc;
using namespace tasc::testing;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tasc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string jsonl(const std::vector<std::pair<std::string, std::string>>& docs) {
  std::string s;
  for (const auto& [i, o] : docs) s += json{{"input", i}, {"output", o}}.dump() + "\n";
  return s;
}

std::string phrase_corpus(std::uint64_t seed, std::size_t docs) {
  Rng rng(seed);
  const auto outs = zipf_phrase_corpus(rng, docs, 4);
  std::vector<std::pair<std::string, std::string>> d;
  for (std::size_t i = 0; i < outs.size(); ++i) d.emplace_back("question " + std::to_string(i % 7) + ": ", outs[i]);
  return jsonl(d);
}

}  // namespace

TEST(Cli, AnalyzeYesNoCorpus) {
  TempDir dir;
  Rng rng(91);
  std::vector<std::pair<std::string, std::string>> docs;
  for (int i = 0; i < 400; ++i) docs.emplace_back(random_text(rng, 8, {"a", "b", "c", "d", "e", "f", "g"}), i % 2 ? "yes" : "no");
  const auto corpus = dir.write("yn.jsonl", jsonl(docs));
  const auto o = run_cli({"analyze", "--corpus", corpus.string(), "--n", "1"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto r = o.report();
  EXPECT_EQ(r["command"], "analyze");
  EXPECT_EQ(r["documents"], 400);
  EXPECT_NEAR(r["output"]["entropy_bits"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(r["output"]["unique"], 2);
  EXPECT_NEAR(r["input"]["entropy_bits"].get<double>(), std::log2(7.0), 0.05);
  const double want = (1.0 - r["input"]["entropy_bits"].get<double>()) / r["input"]["entropy_bits"].get<double>() * 100.0;
  EXPECT_NEAR(r["delta_pct"].get<double>(), want, 1e-9);
}

TEST(Cli, AnalyzeIdenticalSidesAndErrors) {
  TempDir dir;
  const auto corpus = dir.write("same.jsonl", jsonl({{"one two three", "one two three"}, {"four five", "four five"}}));
  const auto o = run_cli({"analyze", "--corpus", corpus.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.report()["delta_pct"], 0.0);
  EXPECT_EQ(o.report()["coverage_ratio"], 1.0);

  EXPECT_EQ(run_cli({"analyze", "--corpus", dir.file("none.jsonl").string()}).code, 2);
  EXPECT_EQ(run_cli({"analyze"}).code, 2);
  EXPECT_EQ(run_cli({"analyze", "--corpus", corpus.string(), "--normalization", "upper"}).code, 2);
  EXPECT_EQ(run_cli({"analyze", "--corpus", dir.write("bad.jsonl", "{oops\n").string()}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, AugmentSingleTokenLedger) {
  TempDir dir;
  const auto corpus = dir.write("ab.jsonl", jsonl({{"q", "ababab"}, {"q", "abab"}}));
  const auto ledger = dir.file("ledger.jsonl");
  const auto vocab = dir.file("v.txt");
  const auto o = run_cli({"augment", "--corpus", corpus.string(), "--budget", "1", "--n-max", "2", "--pcs-threshold",
                          "1.0", "--ledger", ledger.string(), "--vocab-out", vocab.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto r = o.report();
  EXPECT_EQ(r["accepted"], 1);
  EXPECT_EQ(r["vocab_size"], 257);
  EXPECT_EQ(r["exhausted"], false);
  EXPECT_DOUBLE_EQ(r["compression"]["compression_ratio"].get<double>(), 2.0);

  std::istringstream in(read_file(ledger));
  std::string line;
  std::vector<json> rows;
  while (std::getline(in, line)) rows.push_back(json::parse(line));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0]["decision"], "accepted");
  EXPECT_EQ(rows[0]["id"], 256);
  EXPECT_EQ(rows[0]["string"], "ab");
  EXPECT_EQ(rows[0]["freq"], 5);
  EXPECT_EQ(rows[0]["reward"], 5);
  EXPECT_TRUE(std::filesystem::exists(vocab));
}

TEST(Cli, AugmentExhaustedPoolStillSucceeds) {
  TempDir dir;
  const auto corpus = dir.write("tiny.jsonl", jsonl({{"q", "abc"}}));
  const auto o = run_cli({"augment", "--corpus", corpus.string(), "--budget", "50", "--pcs-threshold", "1.0"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.report()["exhausted"], true);
  EXPECT_LT(o.report()["accepted"].get<int>(), 50);
  EXPECT_NE(o.err.find("warning"), std::string::npos);
}

TEST(Cli, AugmentSweepMatchesSingleRuns) {
  TempDir dir;
  const auto corpus = dir.write("z.jsonl", phrase_corpus(92, 60));
  const auto swept = run_cli({"augment", "--corpus", corpus.string(), "--budget", "8", "--sweep", "0,4,8,16"});
  ASSERT_EQ(swept.code, 0) << swept.err;
  const auto rows = swept.report()["sweep"];
  ASSERT_EQ(rows.size(), 4u);
  double prev_len = 1e300;
  for (const auto& row : rows) {
    const auto m = row["M"].get<std::size_t>();
    if (m == 0) {
      EXPECT_EQ(row["added"], 0);
      EXPECT_EQ(row["avg_len"], swept.report()["compression"]["avg_len_before"]);
      prev_len = row["avg_len"].get<double>();
      continue;
    }
    const auto single = run_cli({"augment", "--corpus", corpus.string(), "--budget", std::to_string(m)});
    ASSERT_EQ(single.code, 0) << single.err;
    const auto r = single.report();
    EXPECT_EQ(row["added"], r["accepted"]);
    EXPECT_EQ(row["avg_len"], r["compression"]["avg_len_after"]);
    EXPECT_EQ(row["h2"], r["output_tokens"]["h2_after"]);
    EXPECT_LE(row["avg_len"].get<double>(), prev_len);
    prev_len = row["avg_len"].get<double>();
  }
}

TEST(Cli, SimulatePerfectAndAdversarialDrafters) {
  TempDir dir;
  const auto corpus = dir.write("z.jsonl", phrase_corpus(93, 30));
  const auto perfect = run_cli({"simulate", "--corpus", corpus.string(), "--drafter", "oracle", "--gamma", "7",
                                "--max-tokens", "64", "--sessions", "5", "--oracle-check"});
  ASSERT_EQ(perfect.code, 0) << perfect.err;
  EXPECT_EQ(perfect.report()["tokens_per_pass"], 8.0);
  EXPECT_EQ(perfect.report()["total_tokens"], 320);

  const auto adv = run_cli({"simulate", "--corpus", corpus.string(), "--drafter", "adversarial", "--target", "random",
                            "--seed", "3", "--sessions", "3"});
  ASSERT_EQ(adv.code, 0) << adv.err;
  EXPECT_EQ(adv.report()["tokens_per_pass"], 1.0);
}

TEST(Cli, SimulateMixedWithOracleCheckAndTrace) {
  TempDir dir;
  const auto corpus = dir.write("z.jsonl", phrase_corpus(94, 40));
  const auto trace = dir.file("trace.jsonl");
  const auto tables = dir.file("t.bin");
  const auto o = run_cli({"simulate", "--corpus", corpus.string(), "--p-min", "2", "--sessions", "6", "--oracle-check",
                          "--trace", trace.string(), "--ngrams-out", tables.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto r = o.report();
  EXPECT_GE(r["tokens_per_pass"].get<double>(), 1.0);
  EXPECT_LE(r["tokens_per_pass"].get<double>(), 9.0);
  EXPECT_EQ(r["draft_calls"].get<std::size_t>(), 8 * r["target_passes"].get<std::size_t>());
  std::istringstream in(read_file(trace));
  std::string line;
  std::size_t steps = 0;
  while (std::getline(in, line)) ++steps;
  EXPECT_EQ(steps, r["target_passes"].get<std::size_t>());
  EXPECT_TRUE(std::filesystem::exists(tables));
}

TEST(Cli, LambdaSweepMatchesSingleRuns) {
  TempDir dir;
  const auto corpus = dir.write("z.jsonl", phrase_corpus(95, 40));
  const std::vector<std::string> base = {"simulate", "--corpus", corpus.string(), "--sessions", "5", "--p-min", "1"};
  auto args = base;
  args.insert(args.end(), {"--lambda-sweep", "0,0.5,1"});
  const auto swept = run_cli(args);
  ASSERT_EQ(swept.code, 0) << swept.err;
  for (const auto& row : swept.report()["lambda_sweep"]) {
    auto one = base;
    one.insert(one.end(), {"--lambda", row["lambda"].dump()});
    const auto single = run_cli(one);
    ASSERT_EQ(single.code, 0) << single.err;
    EXPECT_EQ(row["tokens_per_pass"], single.report()["tokens_per_pass"]);
  }
}

TEST(Cli, SimulateReplayRequestsMissingContext) {
  TempDir dir;
  const auto corpus = dir.write("r.jsonl", jsonl({{"ab", "cd"}}));
  const auto responses = dir.write("resp.jsonl", R"({"context":[97,98],"argmax":99})" "\n");
  const auto requests = dir.file("req.jsonl");
  const auto o = run_cli({"simulate", "--corpus", corpus.string(), "--target", "replay", "--responses",
                          responses.string(), "--requests-out", requests.string(), "--drafter", "adversarial"});
  EXPECT_EQ(o.code, 2);
  EXPECT_EQ(json::parse(read_file(requests))["context"], (TokenSequence{97, 98, 99}));
}

TEST(Cli, PredictReports) {
  TempDir dir;
  std::string csv = "config_id,M,h2,runtime\n";
  for (int i = 0; i < 6; ++i) csv += "inv," + std::to_string(i * 10) + "," + std::to_string(i) + "," + std::to_string(100 - i) + "\n";
  csv += "solo,0,1,1\n";
  const auto o = run_cli({"predict", "--series", dir.write("s.csv", csv).string()});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto r = o.report();
  ASSERT_EQ(r["configs"].size(), 1u);
  EXPECT_EQ(r["configs"][0]["tau"], -1.0);
  EXPECT_EQ(r["excluded"], json::array({"solo"}));
  EXPECT_EQ(r["directional_success_rate"], 1.0);
  EXPECT_EQ(r["transitions_used"], 5);
  EXPECT_NE(o.err.find("single point"), std::string::npos);
}

TEST(Cli, ReportsAreByteIdenticalAcrossRuns) {
  TempDir dir;
  const auto corpus = dir.write("z.jsonl", phrase_corpus(96, 30));
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"analyze", "--corpus", corpus.string()},
        std::vector<std::string>{"augment", "--corpus", corpus.string(), "--budget", "10"},
        std::vector<std::string>{"simulate", "--corpus", corpus.string(), "--sessions", "3"}}) {
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
  }
}

TEST(Cli, ConfigFileOverridesFlags) {
  TempDir dir;
  const auto corpus = dir.write("z.jsonl", phrase_corpus(97, 20));
  const auto cfg = dir.write("c.json", R"({"budget": 3, "pcs-threshold": 1.0})");
  const auto o = run_cli({"augment", "--corpus", corpus.string(), "--budget", "40", "--config", cfg.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.report()["budget"], 3);
  EXPECT_EQ(o.report()["pcs_threshold"], 1.0);
  const auto bad = dir.write("bad.json", R"({"bugdet": 3})");
  EXPECT_EQ(run_cli({"augment", "--corpus", corpus.string(), "--config", bad.string()}).code, 2);
}

TEST(Cli, GuardedExitCodes) {
  std::ostringstream err;
  EXPECT_EQ(cli::guarded([] {}, err), 0);
  EXPECT_EQ(cli::guarded([] { throw InputError("x"); }, err), 2);
  EXPECT_EQ(cli::guarded([] { throw std::invalid_argument("x"); }, err), 2);
  EXPECT_EQ(cli::guarded([] { throw InvariantError("x"); }, err), 1);
  EXPECT_EQ(cli::guarded([] { throw std::runtime_error("x"); }, err), 1);
}
