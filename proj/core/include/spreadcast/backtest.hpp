#pragma once

#include "spreadcast/data.hpp"
#include "spreadcast/metrics.hpp"
#include "spreadcast/pipeline.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spreadcast::eval {

struct BacktestConfig {
  data::SplitSpec split{0.7};
  std::size_t top_k = info::kDefaultTopK;
  FeatureOptions features;  // top_k here is ignored; the grid sets it per row
  ModelConfig models = ModelConfig::defaults();
  std::vector<Method> methods = all_methods();
  std::uint64_t seed = 0;  // recorded in the report
};

struct ReportRow {
  Method method = Method::Ols;
  bool selection = false;
  int window = 0;
  Index train_rows = 0;  // rows the model was fitted on (the split minus the window)
  Index test_rows = 0;
  std::optional<Metrics> train;
  std::optional<Metrics> test;
  std::string error;  // empty when the row succeeded

  bool ok() const noexcept { return error.empty(); }
  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct ReportMeta {
  std::string target;
  Index rows = 0;
  Index train_rows = 0;
  Index test_rows = 0;
  double train_fraction = 0.7;
  std::size_t k = info::kDefaultTopK;
  std::uint64_t seed = 0;
  stacking::StackingMode mode = stacking::StackingMode::InSample;
  int folds = stacking::kDefaultFolds;
  bool whiten = true;

  friend bool operator==(const ReportMeta&, const ReportMeta&) = default;
};

/// One row per (method, selection setting), methods in configured order,
/// "No" before "Yes" within a method.
struct EvalReport {
  ReportMeta meta;
  std::vector<ReportRow> rows;

  const ReportRow* find(Method method, bool selection) const;

  /// Aligned text table in the layout: learner, selection, train MAE/MSE/R^2,
  /// test MAE/MSE/R^2.
  std::string to_text() const;

  /// "# key=value" metadata lines followed by a header and one record per
  /// row. Numbers use the shortest exact representation, so from_csv
  /// restores the report exactly.
  void to_csv(std::ostream& out) const;
  static EvalReport from_csv(std::istream& in);

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct PredictionRecord {
  data::YearMonth date;
  Method method = Method::Ols;
  bool selection = false;
  double actual = 0.0;
  double predicted = 0.0;
  bool test = false;
};

struct BacktestResult {
  EvalReport report;
  std::vector<PredictionRecord> predictions;
};

/// Chronological split, then for every method and selection setting: plan
/// features and the window on the training rows, fit, score train and test.
/// A failing cell is recorded in its row and the grid continues.
BacktestResult run_backtest(const data::Dataset& ds, const BacktestConfig& config = {});

/// Columns: date, learner, selection, actual, predicted, split_label.
void write_predictions_csv(const std::vector<PredictionRecord>& records, std::ostream& out);

}  // namespace spreadcast::eval
