#pragma once

#include "spreadcast/data.hpp"
#include "spreadcast/info_select.hpp"
#include "spreadcast/learners.hpp"
#include "spreadcast/preprocess.hpp"
#include "spreadcast/stacking.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace spreadcast::eval {

/// Rows of the backtest grid: four single learners plus the stack.
enum class Method { Ols, Knn, KernelRidge, RandomForest, Stacking };

std::string_view to_string(Method method) noexcept;
std::optional<Method> parse_method(std::string_view name);
const std::vector<Method>& all_methods();

/// Learner settings shared by every pipeline built from one run.
struct ModelConfig {
  std::map<learners::LearnerKind, learners::RegressorSpec> learners;
  std::vector<learners::RegressorSpec> base;
  learners::RegressorSpec meta;
  stacking::StackingMode mode = stacking::StackingMode::InSample;
  int folds = stacking::kDefaultFolds;

  /// Default hyperparameters; every learner gets its own seed derived from
  /// the root seed.
  static ModelConfig defaults(std::uint64_t seed = 0);

  const learners::RegressorSpec& spec(learners::LearnerKind kind) const;
};

struct FeatureOptions {
  std::optional<std::size_t> top_k;  // nullopt: keep every feature
  std::optional<int> window;         // nullopt: search
  preprocess::WindowSearch search;
  bool whiten = true;
  double epsilon = preprocess::kDefaultEpsilon;
};

/// Which raw features are kept and which rolling-average window is used.
/// Decided from training rows only.
struct FeaturePlan {
  std::vector<std::string> features;
  int window = 1;
  std::optional<preprocess::WindowChoice> window_choice;
  std::optional<info::FeatureRanking> ranking;
};

FeaturePlan plan_features(const data::Dataset& train, const FeatureOptions& options,
                          const info::WarningSink& warn = {});

/// Selected features plus the rolling-average column, for rows
/// [window, n) of ds. Row i of the result is row i + window of ds.
Matrix design_matrix(const data::Dataset& ds, const std::vector<std::string>& features, int window);

using TrainedModel = std::variant<learners::FittedRegressor, stacking::StackedModel>;

/// Selection, rolling average, scaling and model, ready to predict.
class TrainedPipeline {
 public:
  TrainedPipeline(Method method, std::vector<std::string> features, int window, std::string target_name,
                  preprocess::FeatureTransform transform, preprocess::TargetScaler scaler, TrainedModel model);

  Method method() const noexcept { return method_; }
  const std::vector<std::string>& features() const noexcept { return features_; }
  int window() const noexcept { return window_; }
  const std::string& target_name() const noexcept { return target_name_; }
  const preprocess::FeatureTransform& transform() const noexcept { return transform_; }
  const preprocess::TargetScaler& target_scaler() const noexcept { return scaler_; }
  const TrainedModel& model() const noexcept { return model_; }

  /// Predicts from raw design rows (selected features then rolling average).
  Vector predict_design(const Matrix& design) const;

  /// Predicts rows [begin, end) of ds; rolling averages use the realised
  /// targets before each row. Needs begin >= window.
  Vector predict_rows(const data::Dataset& ds, Index begin, Index end) const;

  void save(std::ostream& out) const;
  static TrainedPipeline load(std::istream& in);

 private:
  Method method_;
  std::vector<std::string> features_;
  int window_;
  std::string target_name_;
  preprocess::FeatureTransform transform_;
  preprocess::TargetScaler scaler_;
  TrainedModel model_;
};

/// Fits transform and model on rows [window, train_end) of ds. Rows at or
/// after train_end are never read.
TrainedPipeline fit_pipeline(const data::Dataset& ds, Index train_end, const FeaturePlan& plan, Method method,
                             const ModelConfig& models, const FeatureOptions& options = {});

/// Plans features on rows [0, train_end) and fits.
TrainedPipeline fit_pipeline(const data::Dataset& ds, Index train_end, Method method, const ModelConfig& models,
                             const FeatureOptions& options = {});

struct ForecastPoint {
  data::YearMonth month;
  double value = 0.0;
};

/// The latest feature row is held fixed; the rolling average starts from
/// the last `window` observed targets and each step appends the previous
/// prediction. Months start one after the last date of ds.
std::vector<ForecastPoint> forecast_next(const data::Dataset& ds, const TrainedPipeline& pipeline, int horizon);

/// The design row forecast_next feeds to the model for its first step.
Matrix next_design_row(const data::Dataset& ds, const TrainedPipeline& pipeline);

}  // namespace spreadcast::eval
