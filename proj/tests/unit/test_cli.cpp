#include <gtest/gtest.h>

#include <cascadex/cli/app.hpp>

#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using testing_support::read_file;
using testing_support::write_file;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(CASCADEX_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cascadex");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cascadex::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

json load(const fs::path& p) { return json::parse(read_file(p)); }

// Small Holme-Kim network with a steady trickle of outside activations.
std::string small_config(const fs::path& out, int n = 60) {
  json j = {{"seed", 3},
            {"output", out.string()},
            {"dt", 30},
            {"graph", {{"generator", "holme-kim"}, {"n", n}, {"m", 2}, {"p", 0.1}}},
            {"simulation",
             {{"model", {{"kind", "si"}, {"p0", 0.08}}},
              {"profile", {{"shape", "constant"}, {"level", 0.01}}},
              {"n_seeds", 3},
              {"horizon", 30}}}};
  return j.dump();
}

// Edge list and sessions of the five-user example: 0 and 1 are seeds without
// a referral, 2, 3 and 4 followed shares.
void worked_example(const fs::path& dir) {
  write_file(dir / "edges.txt", "0 1\n0 3\n1 2\n1 4\n3 4\n");
  write_file(dir / "sessions.csv",
             "user_id,time_login,time_share,referrer_id,referrer_class,friend_count,choice_id\n"
             "0,0,-1,-1,unknown,2,0\n"
             "1,1,-1,-1,unknown,3,0\n"
             "2,2,-1,1,share,1,0\n"
             "3,3,-1,0,share,2,0\n"
             "4,4,-1,1,share,2,0\n");
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(CliSimulate, MinimalConfigWritesFourFilesIntoNewDirectory) {
  const auto dir = scratch("sim_min");
  const auto out = dir / "nested" / "out";
  write_file(dir / "cfg.json", small_config(out, 50));
  const auto r = cli({"simulate", "--config", (dir / "cfg.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"edges.txt", "sessions.csv", "truth.csv", "summary.json"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto summary = load(out / "summary.json");
  EXPECT_EQ(summary["graph"]["n_nodes"].get<int>(), 50);
  EXPECT_TRUE(summary.contains("timestamp"));
}

TEST(CliSimulate, InvalidModelKindNamesTheField) {
  const auto dir = scratch("sim_badkind");
  write_file(dir / "cfg.json", R"({"simulation": {"model": {"kind": "sir"}}})");
  const auto r = cli({"simulate", "--config", (dir / "cfg.json").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("simulation.model.kind"), std::string::npos) << r.err;

  const auto f = cli({"simulate", "--model", "sir", "--out", (dir / "o").string()});
  EXPECT_EQ(f.code, 2);
  EXPECT_NE(f.err.find("--model"), std::string::npos) << f.err;
}

TEST(CliConfig, UnknownKeysAndBadFlagsAreConfigErrors) {
  const auto dir = scratch("cfg_errors");
  write_file(dir / "cfg.json", R"({"inference": {"alpah": 0.1}})");
  auto r = cli({"infer", "--config", (dir / "cfg.json").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("inference.alpah"), std::string::npos) << r.err;

  write_file(dir / "broken.json", "{ not json");
  EXPECT_EQ(cli({"infer", "--config", (dir / "broken.json").string()}).code, 2);
  EXPECT_EQ(cli({"infer", "--config", (dir / "missing.json").string()}).code, 2);
  EXPECT_EQ(cli({"infer", "--seed", "abc"}).code, 2);
  EXPECT_EQ(cli({"infer", "--alpha", "-1"}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
}

TEST(CliConfig, FlagsOverrideConfig) {
  json j = {{"seed", 4}, {"dt", 15}, {"inference", {{"model", "exp"}, {"alpha", 0.2}}}};
  auto cfg = cascadex::cli::parse_config(j);
  EXPECT_EQ(cfg.seed, 4u);
  EXPECT_EQ(cfg.dt, 15.0);
  EXPECT_EQ(cfg.inference.model, cascadex::ModelKind::EXP);
  EXPECT_EQ(cfg.inference.settings.correction.alpha, 0.2);

  // The override is observable through the written artifacts.
  const auto dir = scratch("override");
  write_file(dir / "cfg.json", small_config(dir / "a"));
  ASSERT_EQ(cli({"simulate", "--config", (dir / "cfg.json").string()}).code, 0);
  ASSERT_EQ(cli({"simulate", "--config", (dir / "cfg.json").string(), "--out", (dir / "b").string(), "--seed",
                 "9"}).code,
            0);
  EXPECT_EQ(load(dir / "a" / "summary.json")["seed"].get<int>(), 3);
  EXPECT_EQ(load(dir / "b" / "summary.json")["seed"].get<int>(), 9);
  EXPECT_NE(read_file(dir / "a" / "edges.txt"), read_file(dir / "b" / "edges.txt"));
}

TEST(CliSimulate, OutputsAreByteDeterministic) {
  const auto dir = scratch("determinism");
  write_file(dir / "cfg.json", small_config(dir / "a"));
  ASSERT_EQ(cli({"simulate", "--config", (dir / "cfg.json").string()}).code, 0);
  ASSERT_EQ(cli({"simulate", "--config", (dir / "cfg.json").string(), "--out", (dir / "b").string()}).code, 0);
  for (const char* f : {"edges.txt", "sessions.csv", "truth.csv"}) {
    EXPECT_EQ(read_file(dir / "a" / f), read_file(dir / "b" / f)) << f;
  }
  auto sa = load(dir / "a" / "summary.json");
  auto sb = load(dir / "b" / "summary.json");
  sa.erase("timestamp");
  sb.erase("timestamp");
  EXPECT_EQ(sa.dump(), sb.dump());

  for (const char* sub : {"a", "b"}) {
    const auto base = dir / sub;
    ASSERT_EQ(cli({"infer", "--graph", (base / "edges.txt").string(), "--sessions", (base / "sessions.csv").string(),
                   "--out", (base / "fit").string(), "--workers", sub[0] == 'a' ? "1" : "3"})
                  .code,
              0);
  }
  for (const char* f : {"result.json", "windows.csv", "trace.csv", "counts.svg"}) {
    EXPECT_EQ(read_file(dir / "a" / "fit" / f), read_file(dir / "b" / "fit" / f)) << f;
  }
}

TEST(CliInfer, RoundTripFromSimulateConverges) {
  const auto dir = scratch("roundtrip");
  write_file(dir / "cfg.json", small_config(dir / "sim", 120));
  ASSERT_EQ(cli({"simulate", "--config", (dir / "cfg.json").string()}).code, 0);
  const auto r = cli({"infer", "--graph", (dir / "sim" / "edges.txt").string(), "--sessions",
                      (dir / "sim" / "sessions.csv").string(), "--dt", "30", "--out", (dir / "fit").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto res = load(dir / "fit" / "result.json");
  EXPECT_TRUE(res["converged"].get<bool>());
  EXPECT_EQ(res["monotonicity_violations"].get<int>(), 0);
  EXPECT_EQ(res["model"]["kind"].get<std::string>(), "si");

  const auto sim = load(dir / "sim" / "summary.json");
  EXPECT_EQ(res["n_activated"].get<int>(), sim["activations"]["total"].get<int>());

  const auto windows = csv_rows(read_file(dir / "fit" / "windows.csv"));
  ASSERT_EQ(windows.size(), res["horizon"].get<std::size_t>() + 1);
  EXPECT_EQ(windows[0][0], "window");
  // Expected endogenous plus exogenous counts add up to the activations.
  for (std::size_t k = 1; k < windows.size(); ++k) {
    const double n = std::stod(windows[k][2]);
    EXPECT_NEAR(std::stod(windows[k][4]) + std::stod(windows[k][5]), n, 1e-9);
  }
  const auto trace = csv_rows(read_file(dir / "fit" / "trace.csv"));
  EXPECT_EQ(trace.size(), res["iterations"].get<std::size_t>() + 1);
}

TEST(CliInfer, AllActivationsInWindowZeroIsFlaggedButSucceeds) {
  const auto dir = scratch("window0");
  std::string edges, sessions = "user_id,time_login\n";
  for (int i = 0; i < 10; ++i) {
    edges += std::to_string(i) + " " + std::to_string((i + 1) % 10) + "\n";
    sessions += std::to_string(i) + ",5\n";
  }
  write_file(dir / "edges.txt", edges);
  write_file(dir / "sessions.csv", sessions);
  const auto r = cli({"infer", "--graph", (dir / "edges.txt").string(), "--sessions",
                      (dir / "sessions.csv").string(), "--model", "exp", "--out", (dir / "fit").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("not identified"), std::string::npos) << r.err;
  const auto res = load(dir / "fit" / "result.json");
  EXPECT_FALSE(res["warnings"].empty());
}

TEST(CliInfer, AlphaSweepWritesOneResultSetPerValue) {
  const auto dir = scratch("sweep");
  write_file(dir / "cfg.json", small_config(dir / "sim"));
  ASSERT_EQ(cli({"simulate", "--config", (dir / "cfg.json").string()}).code, 0);
  const auto r = cli({"infer", "--graph", (dir / "sim" / "edges.txt").string(), "--sessions",
                      (dir / "sim" / "sessions.csv").string(), "--alpha-sweep", "0,0.05,0.1,0.3", "--out",
                      (dir / "fit").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* a : {"alpha_0", "alpha_0.05", "alpha_0.1", "alpha_0.3"}) {
    ASSERT_TRUE(fs::exists(dir / "fit" / a / "result.json")) << a;
    EXPECT_TRUE(fs::exists(dir / "fit" / a / "windows.csv")) << a;
  }
  EXPECT_EQ(load(dir / "fit" / "alpha_0.3" / "result.json")["alpha"].get<double>(), 0.3);
  EXPECT_EQ(load(dir / "fit" / "sweep.json")["runs"].size(), 4u);
}

TEST(CliEvaluate, LabeledRunReportsBothAucs) {
  const auto dir = scratch("eval_labeled");
  write_file(dir / "cfg.json", small_config(dir / "sim", 150));
  ASSERT_EQ(cli({"simulate", "--config", (dir / "cfg.json").string()}).code, 0);
  const auto r = cli({"evaluate", "--graph", (dir / "sim" / "edges.txt").string(), "--sessions",
                      (dir / "sim" / "sessions.csv").string(), "--out", (dir / "ev").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto auc = load(dir / "ev" / "auc.json");
  for (const char* k : {"auc_our", "auc_base"}) {
    const double v = auc[k].get<double>();
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  for (const char* f : {"roc_responsibility.csv", "roc_baseline.csv", "roc.svg", "responsibility_hist.csv",
                        "responsibility_hist.svg", "responsibility.csv", "counts.svg"}) {
    EXPECT_TRUE(fs::exists(dir / "ev" / f)) << f;
  }
  const auto hist = csv_rows(read_file(dir / "ev" / "responsibility_hist.csv"));
  EXPECT_EQ(hist[0].back(), "external");
}

TEST(CliEvaluate, WithoutLabelsOnlyHistogram) {
  const auto dir = scratch("eval_unlabeled");
  write_file(dir / "cfg.json", small_config(dir / "sim"));
  ASSERT_EQ(cli({"simulate", "--config", (dir / "cfg.json").string()}).code, 0);
  // Strip the referral columns.
  const auto rows = csv_rows(read_file(dir / "sim" / "sessions.csv"));
  std::string minimal = "user_id,time_login\n";
  for (std::size_t k = 1; k < rows.size(); ++k) minimal += rows[k][0] + "," + rows[k][1] + "\n";
  write_file(dir / "bare.csv", minimal);

  const auto r = cli({"evaluate", "--graph", (dir / "sim" / "edges.txt").string(), "--sessions",
                      (dir / "bare.csv").string(), "--out", (dir / "ev").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "ev" / "responsibility_hist.csv"));
  EXPECT_FALSE(fs::exists(dir / "ev" / "auc.json"));
  EXPECT_NE(r.err.find("AUC omitted"), std::string::npos);
}

TEST(CliEvaluate, PerfectlySeparatedScoresGiveAucOne) {
  const auto dir = scratch("eval_scores");
  write_file(dir / "scores.csv", "score,label\n0.9,1\n0.8,1\n0.75,1\n0.3,0\n0.2,0\n0.1,0\n");
  const auto r = cli({"evaluate", "--scores", (dir / "scores.csv").string(), "--out", (dir / "ev").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load(dir / "ev" / "auc.json")["auc"].get<double>(), 1.0);

  write_file(dir / "bad.csv", "score,label\n0.9,maybe\n");
  EXPECT_EQ(cli({"evaluate", "--scores", (dir / "bad.csv").string(), "--out", (dir / "ev").string()}).code, 3);
}

TEST(CliInfluence, WorkedExampleRawColumn) {
  const auto dir = scratch("influence");
  worked_example(dir);
  const auto r = cli({"influence", "--graph", (dir / "edges.txt").string(), "--sessions",
                      (dir / "sessions.csv").string(), "--dt", "1", "--out", (dir / "inf").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(read_file(dir / "inf" / "influence.csv"));
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"user_id", "window", "class", "model", "raw"}));
  const double expected[] = {1.0, 1.5, 0.0, 0.5, 0.0};
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(rows[i + 1][0], std::to_string(i));
    EXPECT_NEAR(std::stod(rows[i + 1][4]), expected[i], 1e-12) << i;
    EXPECT_GE(std::stod(rows[i + 1][3]), 0.0);
  }
  // Nobody came from an external site or an ad.
  EXPECT_NE(r.err.find("group 'external' has no members"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("group 'ad' has no members"), std::string::npos) << r.err;
  const auto groups = load(dir / "inf" / "groups.json")["groups"];
  EXPECT_FALSE(groups.contains("ad"));
  ASSERT_TRUE(groups.contains("share"));
  EXPECT_NEAR(groups["share"]["raw"]["mean"].get<double>(), 0.5 / 3.0, 1e-12);
  EXPECT_TRUE(groups["share"].contains("model"));
}

TEST(CliInfluence, ExpDecayNeedsALambdaForSi) {
  const auto dir = scratch("influence_decay");
  worked_example(dir);
  const auto r = cli({"influence", "--graph", (dir / "edges.txt").string(), "--sessions",
                      (dir / "sessions.csv").string(), "--dt", "1", "--weighting", "exp-decay", "--out",
                      (dir / "inf").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("attribution.lambda"), std::string::npos);
}

TEST(CliRuntime, MissingInputIsRuntimeError) {
  const auto dir = scratch("runtime");
  const auto r = cli({"infer", "--graph", (dir / "nope.txt").string(), "--sessions", (dir / "nope.csv").string(),
                      "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(cli({"report", "--out", (dir / "empty").string()}).code, 3);
}

TEST(CliReport, SummarizesArtifacts) {
  const auto dir = scratch("report");
  worked_example(dir);
  ASSERT_EQ(cli({"influence", "--graph", (dir / "edges.txt").string(), "--sessions", (dir / "sessions.csv").string(),
                 "--dt", "1", "--out", (dir / "r").string()})
                .code,
            0);
  write_file(dir / "scores.csv", "score,label\n0.9,1\n0.1,0\n");
  ASSERT_EQ(cli({"evaluate", "--scores", (dir / "scores.csv").string(), "--out", (dir / "r").string()}).code, 0);
  const auto r = cli({"report", "--out", (dir / "r").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto md = read_file(dir / "r" / "report.md");
  EXPECT_NE(md.find("Collective influence"), std::string::npos);
  EXPECT_NE(md.find("| share | 3 |"), std::string::npos) << md;
  EXPECT_NE(md.find("AUC: 1"), std::string::npos) << md;
}
