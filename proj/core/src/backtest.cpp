#include "spreadcast/backtest.hpp"

#include "spreadcast/csv.hpp"
#include "spreadcast/error.hpp"
#include "spreadcast/parallel.hpp"

#include <algorithm>
#include <ostream>

namespace spreadcast::eval {

namespace {

struct Cell {
  ReportRow row;
  std::vector<PredictionRecord> predictions;
};

Cell run_cell(const data::Dataset& ds, Index boundary, const FeaturePlan& plan, Method method, bool selection,
              const BacktestConfig& config) {
  Cell cell;
  cell.row.method = method;
  cell.row.selection = selection;
  cell.row.window = plan.window;
  cell.row.test_rows = ds.rows() - boundary;
  try {
    const auto pipeline = fit_pipeline(ds, boundary, plan, method, config.models, config.features);
    const Index first = plan.window;
    cell.row.train_rows = boundary - first;
    const Vector train_pred = pipeline.predict_rows(ds, first, boundary);
    const Vector test_pred = pipeline.predict_rows(ds, boundary, ds.rows());
    const Vector train_y = ds.target().segment(first, boundary - first);
    const Vector test_y = ds.target().tail(ds.rows() - boundary);
    cell.row.train = compute_metrics(train_y, train_pred);
    cell.row.test = compute_metrics(test_y, test_pred);
    for (Index i = first; i < ds.rows(); ++i) {
      const bool test = i >= boundary;
      cell.predictions.push_back({ds.dates()[static_cast<std::size_t>(i)], method, selection, ds.target()[i],
                                  test ? test_pred[i - boundary] : train_pred[i - first], test});
    }
  } catch (const std::exception& e) {
    cell.row.train.reset();
    cell.row.test.reset();
    cell.row.error = e.what();
    std::replace(cell.row.error.begin(), cell.row.error.end(), '\n', ' ');
    cell.predictions.clear();
  }
  return cell;
}

}  // namespace

const ReportRow* EvalReport::find(Method method, bool selection) const {
  for (const auto& r : rows)
    if (r.method == method && r.selection == selection) return &r;
  return nullptr;
}

BacktestResult run_backtest(const data::Dataset& ds, const BacktestConfig& config) {
  require(!config.methods.empty(), ErrorKind::InvalidArgument, "backtest: no methods configured");
  require(config.top_k >= 1, ErrorKind::InvalidArgument, "backtest: selection count k must be >= 1");
  const Index boundary = config.split.boundary(ds.rows());
  const auto train = ds.slice(0, boundary);

  // One plan per selection setting, shared by every method. A failed plan
  // fails every row of its setting.
  std::optional<FeaturePlan> plans[2];
  std::string plan_error[2];
  for (int s = 0; s < 2; ++s) {
    auto options = config.features;
    options.top_k = s == 1 ? std::optional<std::size_t>(config.top_k) : std::nullopt;
    try {
      plans[s] = plan_features(train, options);
    } catch (const std::exception& e) {
      plan_error[s] = e.what();
    }
  }

  const std::size_t count = config.methods.size() * 2;
  std::vector<Cell> cells(count);
  parallel_for(count, [&](std::size_t i) {
    const auto method = config.methods[i / 2];
    const int s = static_cast<int>(i % 2);
    if (plans[s]) {
      cells[i] = run_cell(ds, boundary, *plans[s], method, s == 1, config);
    } else {
      cells[i].row.method = method;
      cells[i].row.selection = s == 1;
      cells[i].row.test_rows = ds.rows() - boundary;
      cells[i].row.error = plan_error[s];
    }
  });

  BacktestResult result;
  auto& meta = result.report.meta;
  meta.target = ds.target_name();
  meta.rows = ds.rows();
  meta.train_rows = boundary;
  meta.test_rows = ds.rows() - boundary;
  meta.train_fraction = config.split.train_fraction();
  meta.k = config.top_k;
  meta.seed = config.seed;
  meta.mode = config.models.mode;
  meta.folds = config.models.folds;
  meta.whiten = config.features.whiten;
  for (auto& cell : cells) {
    result.report.rows.push_back(std::move(cell.row));
    for (auto& p : cell.predictions) result.predictions.push_back(p);
  }
  return result;
}

void write_predictions_csv(const std::vector<PredictionRecord>& records, std::ostream& out) {
  out << "date,learner,selection,actual,predicted,split_label\n";
  for (const auto& r : records) {
    out << r.date.to_string() << ',' << to_string(r.method) << ',' << (r.selection ? "yes" : "no") << ','
        << csv::format_number(r.actual) << ',' << csv::format_number(r.predicted) << ','
        << (r.test ? "test" : "train") << '\n';
  }
}

}  // namespace spreadcast::eval
