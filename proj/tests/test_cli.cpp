#include "cli.hpp"
#include "run_config.hpp"

#include "spreadcast/backtest.hpp"
#include "spreadcast/error.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace spreadcast;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::vector<const char*> argv{"spreadcast"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

int count_selected(const fs::path& ranking) {
  int n = 0;
  for (const auto& line : lines(slurp(ranking))) n += line.ends_with(",yes");
  return n;
}

// Cheap learner settings so the full grid runs quickly.
const std::vector<std::string> kQuick{"--param", "mlp.epochs=30", "--param", "random_forest.trees=20"};

std::vector<std::string> operator+(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = support::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path synth(int n = 120, int d = 30) {
    const auto path = dir_ / "synthetic.csv";
    const auto r = run({"synth", "--n", std::to_string(n), "--d", std::to_string(d), "--seed", "5", "--out",
                        path.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    return path;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, IngestMergesTwoFilesAndIsIdempotent) {
  write(dir_ / "a.csv", "date,SPREAD,x\n2020-01,100,1\n2020-02,110,2\n2020-03,105,4\n");
  write(dir_ / "b.csv", "date,y\n2020-01-15,7\n2020-02-20,8\n2020-03-31,6\n");
  const auto out = dir_ / "merged.csv";
  const std::vector<std::string> args{"ingest", "--data", (dir_ / "a.csv").string(), "--data",
                                      (dir_ / "b.csv").string(), "--out", out.string()};
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto first = slurp(out);
  const auto rows = lines(first);
  // The first month has no difference and is trimmed as incomplete.
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].substr(0, 8), "2020-02,");
  EXPECT_NE(rows[0].find("SPREAD"), std::string::npos);
  EXPECT_NE(rows[0].find("d_x"), std::string::npos);
  EXPECT_NE(rows[0].find("d_y"), std::string::npos);
  EXPECT_EQ(rows[0].find("d_SPREAD"), std::string::npos);

  ASSERT_EQ(run(args).code, 0);
  EXPECT_EQ(slurp(out), first);
}

TEST_F(Cli, MissingDateColumnNamesIt) {
  write(dir_ / "a.csv", "month,SPREAD\n2020-01,100\n");
  const auto r = run({"ingest", "--data", (dir_ / "a.csv").string(), "--date-column", "when", "--out",
                      (dir_ / "m.csv").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("when"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("a.csv"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "m.csv"));
}

TEST_F(Cli, SelectDefaultsToTwentyAndHonoursK) {
  const auto data = synth();
  const auto ranking = dir_ / "ranking.csv";
  ASSERT_EQ(run({"select", "--data", data.string(), "--out", ranking.string()}).code, 0);
  EXPECT_EQ(lines(slurp(ranking)).front(), "feature_name,mi_nats,rank,selected");
  EXPECT_EQ(lines(slurp(ranking)).size(), 31u);
  EXPECT_EQ(count_selected(ranking), 20);
  ASSERT_EQ(run({"select", "--data", data.string(), "--k", "5", "--out", ranking.string()}).code, 0);
  EXPECT_EQ(count_selected(ranking), 5);
}

TEST_F(Cli, ConfigFileThenFlags) {
  const auto data = synth();
  const auto ranking = dir_ / "ranking.csv";
  write(dir_ / "run.ini", "[select]\nk = 7\n[run]\nseed = 3\n");
  ASSERT_EQ(run({"select", "--config", (dir_ / "run.ini").string(), "--data", data.string(), "--out",
                 ranking.string()})
                .code,
            0);
  EXPECT_EQ(count_selected(ranking), 7);
  ASSERT_EQ(run({"select", "--config", (dir_ / "run.ini").string(), "--data", data.string(), "--k", "4", "--out",
                 ranking.string()})
                .code,
            0);
  EXPECT_EQ(count_selected(ranking), 4);

  write(dir_ / "bad.ini", "[select]\nkk = 7\n");
  const auto r = run({"select", "--config", (dir_ / "bad.ini").string(), "--data", data.string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("kk"), std::string::npos) << r.err;
}

TEST_F(Cli, EvaluateWritesATenRowTableReproducibly) {
  const auto data = synth();
  const auto a = dir_ / "a";
  const auto b = dir_ / "b";
  const auto r = run(std::vector<std::string>{"evaluate", "--data", data.string(), "--seed", "9", "--out",
                                              a.string()} + kQuick);
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(run(std::vector<std::string>{"evaluate", "--data", data.string(), "--seed", "9", "--out", b.string()} +
                kQuick)
                .code,
            0);
  for (const char* f : {"report.txt", "report.csv", "predictions.csv"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;

  std::ifstream csv(a / "report.csv");
  const auto report = eval::EvalReport::from_csv(csv);
  ASSERT_EQ(report.rows.size(), 10u);
  EXPECT_EQ(report.meta.train_rows, 84u);
  EXPECT_EQ(report.meta.test_rows, 36u);
  EXPECT_EQ(report.meta.seed, 9u);
  for (const auto& row : report.rows) EXPECT_TRUE(row.ok()) << row.error;
  // Header block plus one line per row.
  EXPECT_EQ(lines(slurp(a / "report.txt")).size(), 5u + 10u);

  ASSERT_EQ(run(std::vector<std::string>{"evaluate", "--data", data.string(), "--seed", "10", "--out",
                                         b.string()} + kQuick)
                .code,
            0);
  EXPECT_NE(slurp(a / "predictions.csv"), slurp(b / "predictions.csv"));
}

TEST_F(Cli, ForecastFromSavedModelMatchesInProcess) {
  const auto data = synth();
  const auto model = dir_ / "model.txt";
  const std::vector<std::string> common{"--data", data.string(), "--seed", "4", "--method", "stacking"};
  ASSERT_EQ(run(std::vector<std::string>{"train", "--out", model.string()} + common + kQuick).code, 0);

  const auto saved = dir_ / "saved.csv";
  const auto r = run({"forecast", "--data", data.string(), "--model", model.string(), "--horizon", "3", "--out",
                      saved.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(slurp(saved));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "date,spread_bps");
  EXPECT_EQ(rows[1].substr(0, 8), "2018-01,");
  EXPECT_EQ(rows[3].substr(0, 8), "2018-03,");

  const auto direct = dir_ / "direct.csv";
  ASSERT_EQ(run(std::vector<std::string>{"forecast", "--horizon", "3", "--out", direct.string()} + common + kQuick)
                .code,
            0);
  EXPECT_EQ(slurp(direct), slurp(saved));

  const auto refit = dir_ / "refit.csv";
  ASSERT_EQ(run(std::vector<std::string>{"forecast", "--model", model.string(), "--refit", "--horizon", "3", "--out",
                                         refit.string()} + common + kQuick)
                .code,
            0);
  EXPECT_EQ(slurp(refit), slurp(saved));
}

TEST_F(Cli, ForecastRejectsAnIncompleteLatestRow) {
  write(dir_ / "a.csv", "date,SPREAD,x\n2020-01,100,1\n2020-02,110,2\n2020-03,105,\n");
  const auto r = run({"forecast", "--data", (dir_ / "a.csv").string(), "--method", "ols", "--window", "1",
                      "--no-select", "--out", (dir_ / "f.csv").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(fs::exists(dir_ / "f.csv"));
}

TEST_F(Cli, SynthIsReproducible) {
  const auto a = dir_ / "a.csv";
  const auto b = dir_ / "b.csv";
  ASSERT_EQ(run({"synth", "--n", "60", "--d", "8", "--seed", "2", "--out", a.string()}).code, 0);
  ASSERT_EQ(run({"--seed", "2", "synth", "--n", "60", "--d", "8", "--out", b.string()}).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(lines(slurp(a)).size(), 61u);
  EXPECT_EQ(lines(slurp(a)).front().substr(0, 9), "date,f01,");
}

TEST(CliArgs, UnknownFlagsAndBadValuesFail) {
  EXPECT_NE(run({"select", "--bogus"}).code, 0);
  EXPECT_NE(run({"frobnicate"}).code, 0);
  EXPECT_NE(run({}).code, 0);
  EXPECT_NE(run({"synth", "--n", "ten", "--out", "/nonexistent/x.csv"}).code, 0);
  EXPECT_NE(run({"evaluate", "--param", "mlp.nope=3"}).code, 0);
  const auto r = run({"evaluate", "--mode", "sideways", "--data", "x.csv"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("--mode"), std::string::npos) << r.err;
}

TEST(CliArgs, HelpListsEveryFlag) {
  const std::map<std::string, std::vector<std::string>> expected{
      {"ingest", {"--data", "--date-column", "--target", "--no-diff"}},
      {"select", {"--data", "--date-column", "--target", "--k"}},
      {"train", {"--data", "--k", "--no-select", "--window", "--window-learner", "--epsilon", "--no-whiten", "--mode",
                 "--folds", "--base", "--meta", "--param", "--method"}},
      {"evaluate", {"--data", "--k", "--no-select", "--window", "--mode", "--folds", "--param", "--train-fraction"}},
      {"forecast", {"--data", "--model", "--horizon", "--refit", "--method", "--mode", "--param"}},
      {"synth", {"--n", "--d", "--noise", "--recipe"}},
  };
  for (const auto& [sub, flags] : expected) {
    const auto r = run({sub, "--help"});
    EXPECT_EQ(r.code, 0) << sub;
    for (const auto& f : flags) EXPECT_NE(r.out.find(f), std::string::npos) << sub << " " << f;
  }
  const auto top = run({"--help"});
  EXPECT_EQ(top.code, 0);
  for (const char* f : {"--config", "--seed", "--out", "ingest", "select", "train", "evaluate", "forecast", "synth"})
    EXPECT_NE(top.out.find(f), std::string::npos) << f;
}

TEST(RunConfig, SetValidatesKeysAndValues) {
  cli::RunConfig c;
  c.set("select", "k", "5");
  EXPECT_EQ(c.k, 5u);
  c.set("preprocess", "window", "auto");
  EXPECT_FALSE(c.window.has_value());
  c.set("preprocess", "window", "3");
  EXPECT_EQ(c.window, 3);
  c.set("stacking", "base", "knn,ols");
  EXPECT_EQ(c.base.size(), 2u);
  EXPECT_THROW(c.set("select", "nope", "1"), Error);
  EXPECT_THROW(c.set("nowhere", "k", "1"), Error);
  EXPECT_THROW(c.set("select", "k", "-1"), Error);
  EXPECT_THROW(c.set("knn", "k", "zero"), Error);
}

TEST(RunConfig, SeedsMatchTheLibraryDefaults) {
  cli::RunConfig c;
  c.seed = 17;
  const auto a = c.model_config();
  const auto b = eval::ModelConfig::defaults(17);
  EXPECT_EQ(a.base, b.base);
  EXPECT_EQ(a.meta, b.meta);
  for (const auto& [kind, s] : b.learners) EXPECT_EQ(a.spec(kind), s) << learners::to_string(kind);
}

TEST(RunConfig, ShippedExampleLoads) {
  cli::RunConfig c;
  c.load_file(SPREADCAST_EXAMPLE_INI);
  EXPECT_EQ(c.data_paths.size(), 2u);
  EXPECT_EQ(c.k, 20u);
  EXPECT_EQ(c.horizon, 3);
  EXPECT_FALSE(c.window.has_value());
  EXPECT_EQ(c.model_config().base.size(), 3u);
}
