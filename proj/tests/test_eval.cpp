#include "spreadcast/backtest.hpp"
#include "spreadcast/error.hpp"
#include "spreadcast/metrics.hpp"
#include "spreadcast/pipeline.hpp"
#include "spreadcast/synthetic.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace spreadcast;
using namespace spreadcast::eval;
using learners::LearnerKind;

namespace {

ModelConfig quick_models(std::uint64_t seed = 0) {
  auto c = ModelConfig::defaults(seed);
  for (auto* s : {&c.learners.at(LearnerKind::Mlp), &c.base[0]}) *s = s->with({{"epochs", "40"}});
  for (auto* s : {&c.learners.at(LearnerKind::RandomForest), &c.base[1]}) *s = s->with({{"trees", "25"}});
  return c;
}

BacktestConfig quick_backtest(std::uint64_t seed = 0) {
  BacktestConfig b;
  b.models = quick_models(seed);
  b.seed = seed;
  return b;
}

Metrics naive_metrics(const std::vector<double>& y, const std::vector<double>& f) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double a = 0.0, s = 0.0, t = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    a += std::fabs(y[i] - f[i]);
    s += (y[i] - f[i]) * (y[i] - f[i]);
    t += (y[i] - mean) * (y[i] - mean);
  }
  const double n = static_cast<double>(y.size());
  return {a / n, s / n, 1.0 - s / t};
}

synthetic::SyntheticConfig synth(std::uint64_t seed, Index n = 600) {
  synthetic::SyntheticConfig c;
  c.seed = seed;
  c.n = n;
  return c;
}

}  // namespace

// Metrics -------------------------------------------------------------------

TEST(Metrics, WorkedExamples) {
  Vector y(3), f(3);
  y << 1, 2, 3;
  f << 2, 2, 2;
  const auto m = compute_metrics(y, f);
  EXPECT_DOUBLE_EQ(m.mae, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.mse, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.r2, 0.0);

  const auto perfect = compute_metrics(y, y);
  EXPECT_EQ(perfect.mae, 0.0);
  EXPECT_EQ(perfect.mse, 0.0);
  EXPECT_EQ(perfect.r2, 1.0);

  Vector z(4);
  z << 3, -1, 7, 2;
  EXPECT_NEAR(compute_metrics(z, Vector::Constant(4, z.mean())).r2, 0.0, 1e-15);
}

TEST(Metrics, Errors) {
  EXPECT_THROW(compute_metrics(Vector::Ones(3), Vector::Ones(2)), Error);
  EXPECT_THROW(compute_metrics(Vector::Ones(3), Vector::Zero(3)), Error);
  EXPECT_THROW(compute_metrics(Vector::Ones(1), Vector::Ones(1)), Error);
}

TEST(Metrics, MatchesNaiveLoopAndInvariants) {
  Rng rng(90);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.index(300));
    const Vector y = support::random_vector(rng, n) * rng.uniform(0.1, 100.0);
    const Vector f = y + support::random_vector(rng, n) * rng.uniform(0.0, 50.0);
    const auto m = compute_metrics(y, f);
    const auto o = naive_metrics(support::to_std(y), support::to_std(f));
    EXPECT_NEAR(m.mae, o.mae, 1e-12 * std::max(1.0, o.mae));
    EXPECT_NEAR(m.mse, o.mse, 1e-12 * std::max(1.0, o.mse));
    EXPECT_NEAR(m.r2, o.r2, 1e-12 * std::max(1.0, std::abs(o.r2)));
    EXPECT_LE(m.mae * m.mae, m.mse * (1 + 1e-12));
    EXPECT_LE(m.r2, 1.0);
  }
}

// Synthetic -----------------------------------------------------------------

TEST(Synthetic, DeterministicAndShaped) {
  const auto a = synthetic::generate_synthetic(synth(5));
  const auto b = synthetic::generate_synthetic(synth(5));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rows(), 600);
  EXPECT_EQ(a.cols(), 40);
  EXPECT_EQ(a.target_name(), "SPREAD");
  EXPECT_EQ(a.dates().front(), data::YearMonth(2008, 1));
  EXPECT_NE(synthetic::generate_synthetic(synth(6)).target(), a.target());
  EXPECT_EQ(synthetic::true_feature_names(synth(5)),
            (std::vector<std::string>{"f01", "f02", "f03", "f04", "f05", "f06"}));
}

TEST(Synthetic, Errors) {
  auto c = synth(1);
  c.n = 39;
  EXPECT_THROW(synthetic::generate_synthetic(c), Error);
  c.n = 40;
  c.d = 4;
  EXPECT_THROW(synthetic::generate_synthetic(c), Error);
  c.d = 5;
  EXPECT_EQ(synthetic::generate_synthetic(c).cols(), 5);
  c.noise = -1;
  EXPECT_THROW(synthetic::generate_synthetic(c), Error);
}

TEST(Synthetic, TrueFeaturesRankInTopTen) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ds = synthetic::generate_synthetic(synth(seed));
    const auto top = info::select_top_k(info::rank_features(ds), 10);
    const auto truth = synthetic::true_feature_names(synth(seed));
    hits += std::all_of(truth.begin(), truth.end(),
                        [&](const auto& f) { return std::find(top.begin(), top.end(), f) != top.end(); });
  }
  EXPECT_GE(hits, 18);
}

TEST(Synthetic, NoiselessLinearRecipeIsRecoveredByOls) {
  auto c = synth(7);
  c.noise = 0.0;
  c.recipe = synthetic::Recipe::Linear;
  const auto ds = synthetic::generate_synthetic(c);
  auto config = quick_backtest();
  config.methods = {Method::Ols};
  const auto report = run_backtest(ds, config).report;
  for (const auto& row : report.rows) ASSERT_TRUE(row.ok()) << row.error;
  // With every feature available the target is an exact linear function.
  const auto* all = report.find(Method::Ols, false);
  ASSERT_NE(all, nullptr);
  EXPECT_GE(all->test->r2, 0.999);
}

// Pipeline ------------------------------------------------------------------

TEST(Pipeline, MethodNames) {
  ASSERT_EQ(all_methods().size(), 5u);
  for (auto m : all_methods()) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_FALSE(parse_method("mlp").has_value());
}

TEST(Pipeline, SaveLoadPredictsIdentically) {
  const auto ds = synthetic::generate_synthetic(synth(8, 150));
  FeatureOptions options;
  options.top_k = 10;
  for (auto method : all_methods()) {
    const auto p = fit_pipeline(ds, 120, method, quick_models(), options);
    std::stringstream buf;
    p.save(buf);
    const auto back = TrainedPipeline::load(buf);
    EXPECT_EQ(back.features(), p.features());
    EXPECT_EQ(back.window(), p.window());
    EXPECT_EQ(back.predict_rows(ds, 120, 150), p.predict_rows(ds, 120, 150)) << to_string(method);
  }
}

TEST(Pipeline, NeverReadsRowsAfterTheTrainingSpan) {
  const auto ds = synthetic::generate_synthetic(synth(9, 200));
  const Index boundary = 140;
  Matrix corrupted_x = ds.features();
  Vector corrupted_y = ds.target();
  Rng rng(91);
  for (Index i = boundary; i < ds.rows(); ++i) {
    corrupted_y[i] = 1e6 * rng.normal();
    for (Index j = 0; j < ds.cols(); ++j) corrupted_x(i, j) = 1e6 * rng.normal();
  }
  const data::Dataset corrupted(ds.dates(), corrupted_x, ds.feature_names(), corrupted_y, ds.target_name());
  FeatureOptions options;
  options.top_k = 20;
  for (auto method : all_methods()) {
    std::stringstream a, b;
    fit_pipeline(ds, boundary, method, quick_models(), options).save(a);
    fit_pipeline(corrupted, boundary, method, quick_models(), options).save(b);
    EXPECT_EQ(a.str(), b.str()) << to_string(method);
  }
}

TEST(Forecast, ShapeAndDates) {
  const auto ds = synthetic::generate_synthetic(synth(10, 120));
  const auto p = fit_pipeline(ds, ds.rows(), Method::KernelRidge, quick_models());
  const auto f = forecast_next(ds, p, 3);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0].month, ds.dates().back().next());
  EXPECT_LT(f[0].month, f[1].month);
  EXPECT_LT(f[1].month, f[2].month);
  EXPECT_THROW(forecast_next(ds, p, 0), Error);
}

TEST(Forecast, HorizonOneEqualsStackedPredictionOnTheLatestRow) {
  const auto ds = synthetic::generate_synthetic(synth(11, 120));
  FeatureOptions options;
  options.top_k = 20;
  const auto p = fit_pipeline(ds, ds.rows(), Method::Stacking, quick_models(), options);
  const auto row = next_design_row(ds, p);
  const auto& stack = std::get<stacking::StackedModel>(p.model());
  const double direct = p.target_scaler().inverse(stacking::predict_stacked(stack, p.transform().apply(row)))[0];
  EXPECT_EQ(forecast_next(ds, p, 1)[0].value, direct);
  // The rolling average in that row uses the last `window` observed spreads.
  const Index w = p.window();
  EXPECT_DOUBLE_EQ(row(0, row.cols() - 1), ds.target().tail(w).mean());
}

TEST(Forecast, RecursionFeedsPredictionsIntoTheAverage) {
  const auto ds = synthetic::generate_synthetic(synth(12, 120));
  FeatureOptions options;
  options.window = 2;
  const auto p = fit_pipeline(ds, ds.rows(), Method::Ols, quick_models(), options);
  const auto f = forecast_next(ds, p, 3);
  Matrix row = next_design_row(ds, p);
  const Index c = row.cols() - 1;
  row(0, c) = (ds.target()[ds.rows() - 1] + f[0].value) / 2.0;
  EXPECT_EQ(p.predict_design(row)[0], f[1].value);
  row(0, c) = (f[0].value + f[1].value) / 2.0;
  EXPECT_EQ(p.predict_design(row)[0], f[2].value);
}

TEST(Forecast, PersistenceProcess) {
  Rng rng(92);
  const Index n = 120;
  Vector y(n);
  y[0] = 300;
  for (Index t = 1; t < n; ++t) y[t] = y[t - 1] + rng.normal();
  const auto ds = support::make_dataset(support::random_matrix(rng, n, 3), y);
  FeatureOptions options;
  options.window = 1;
  const auto p = fit_pipeline(ds, n, Method::Ols, quick_models(), options);
  const auto train = compute_metrics(y.tail(n - 1), p.predict_rows(ds, 1, n));
  const double f = forecast_next(ds, p, 1)[0].value;
  EXPECT_LT(std::abs(f - y[n - 1]), 3.0 * std::sqrt(train.mse));
}

// Backtest ------------------------------------------------------------------

TEST(Backtest, HundredTwentyMonthGrid) {
  const auto ds = synthetic::generate_synthetic(synth(13, 120));
  const auto result = run_backtest(ds, quick_backtest(13));
  const auto& r = result.report;
  ASSERT_EQ(r.rows.size(), 10u);
  EXPECT_EQ(r.meta.train_rows, 84);
  EXPECT_EQ(r.meta.test_rows, 36);
  EXPECT_EQ(r.meta.k, 20u);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    EXPECT_EQ(row.method, all_methods()[i / 2]);
    EXPECT_EQ(row.selection, i % 2 == 1);
    ASSERT_TRUE(row.ok()) << row.error;
    EXPECT_EQ(row.test_rows, 36);
    EXPECT_EQ(row.train_rows, 84 - row.window);
  }
  const auto tests = std::count_if(result.predictions.begin(), result.predictions.end(),
                                   [](const auto& p) { return p.test; });
  EXPECT_EQ(tests, 36 * 10);
}

TEST(Backtest, FailedCellIsRecordedAndGridContinues) {
  const auto ds = synthetic::generate_synthetic(synth(14, 120));
  auto config = quick_backtest();
  config.models.base[0] = config.models.base[0].with({{"learning_rate", "1e6"}, {"epochs", "50"}});
  const auto report = run_backtest(ds, config).report;
  ASSERT_EQ(report.rows.size(), 10u);
  for (const auto& row : report.rows) {
    if (row.method == Method::Stacking) {
      EXPECT_FALSE(row.ok());
      EXPECT_NE(row.error.find("mlp"), std::string::npos) << row.error;
    } else {
      EXPECT_TRUE(row.ok()) << row.error;
    }
  }
  EXPECT_NE(report.to_text().find("error"), std::string::npos);
}

TEST(Backtest, PureNoiseTargetShowsNoSkill) {
  Rng rng(93);
  const Index n = 500;
  const auto ds = support::make_dataset(support::random_matrix(rng, n, 30), 100.0 + 10.0 * support::random_vector(rng, n).array());
  const auto report = run_backtest(ds, quick_backtest()).report;
  for (const auto& row : report.rows) {
    ASSERT_TRUE(row.ok()) << row.error;
    EXPECT_LE(row.test->r2, 0.1) << to_string(row.method) << (row.selection ? " yes" : " no");
  }
}

TEST(Backtest, Reproducible) {
  const auto ds = synthetic::generate_synthetic(synth(15, 120));
  std::stringstream a, b;
  run_backtest(ds, quick_backtest(15)).report.to_csv(a);
  run_backtest(ds, quick_backtest(15)).report.to_csv(b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Report, CsvRoundTripIsLossless) {
  const auto ds = synthetic::generate_synthetic(synth(16, 120));
  auto config = quick_backtest(16);
  config.models.base[0] = config.models.base[0].with({{"learning_rate", "1e6"}, {"epochs", "50"}});
  const auto report = run_backtest(ds, config).report;
  std::stringstream buf;
  report.to_csv(buf);
  const auto back = EvalReport::from_csv(buf);
  EXPECT_EQ(back, report);
  std::stringstream again;
  back.to_csv(again);
  EXPECT_EQ(again.str(), buf.str());
}

TEST(Report, RandomRowsRoundTrip) {
  Rng rng(94);
  for (int trial = 0; trial < 30; ++trial) {
    EvalReport r;
    r.meta.target = "SPREAD";
    r.meta.rows = 1 + static_cast<Index>(rng.index(1000));
    r.meta.train_fraction = rng.uniform(0.1, 0.9);
    r.meta.seed = rng.next();
    r.meta.mode = rng.index(2) ? stacking::StackingMode::KFold : stacking::StackingMode::InSample;
    for (int i = 0; i < 4; ++i) {
      ReportRow row;
      row.method = all_methods()[rng.index(5)];
      row.selection = rng.index(2) == 1;
      row.window = 1 + static_cast<int>(rng.index(12));
      if (rng.index(4) == 0) {
        row.error = "fit failed, \"badly\"";
      } else {
        row.train = Metrics{rng.uniform() * 1e3, rng.uniform() * 1e-7, -rng.normal() * 1e5};
        row.test = Metrics{rng.uniform(), rng.uniform(), rng.normal()};
      }
      r.rows.push_back(row);
    }
    std::stringstream buf;
    r.to_csv(buf);
    EXPECT_EQ(EvalReport::from_csv(buf), r);
  }
}

TEST(Report, TextLayout) {
  const auto ds = synthetic::generate_synthetic(synth(17, 120));
  const auto text = run_backtest(ds, quick_backtest()).report.to_text();
  EXPECT_NE(text.find("Training Set"), std::string::npos);
  EXPECT_NE(text.find("Testing Set"), std::string::npos);
  for (auto m : all_methods()) EXPECT_NE(text.find(std::string(to_string(m))), std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5 + 10);
}

TEST(Predictions, CsvColumns) {
  std::vector<PredictionRecord> recs{{data::YearMonth(2015, 3), Method::Knn, true, 1.5, 2.25, true}};
  std::stringstream out;
  write_predictions_csv(recs, out);
  EXPECT_EQ(out.str(), "date,learner,selection,actual,predicted,split_label\n2015-03,knn,yes,1.5,2.25,test\n");
}
