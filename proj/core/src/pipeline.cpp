#include "spreadcast/pipeline.hpp"

#include "spreadcast/error.hpp"
#include "spreadcast/random.hpp"
#include "spreadcast/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace spreadcast::eval {

using learners::LearnerKind;
using learners::RegressorSpec;

namespace {

constexpr std::string_view kMethodNames[] = {"ols", "knn", "kernel_ridge", "random_forest", "stacking"};

LearnerKind single_kind(Method method) {
  switch (method) {
    case Method::Ols: return LearnerKind::Ols;
    case Method::Knn: return LearnerKind::Knn;
    case Method::KernelRidge: return LearnerKind::KernelRidge;
    case Method::RandomForest: return LearnerKind::RandomForest;
    case Method::Stacking: break;
  }
  fail(ErrorKind::InvalidArgument, "stacking is not a single learner");
}

}  // namespace

std::string_view to_string(Method method) noexcept { return kMethodNames[static_cast<int>(method)]; }

std::optional<Method> parse_method(std::string_view name) {
  for (int i = 0; i < 5; ++i)
    if (kMethodNames[i] == name) return static_cast<Method>(i);
  return std::nullopt;
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::Ols, Method::Knn, Method::KernelRidge, Method::RandomForest,
                                           Method::Stacking};
  return methods;
}

// ModelConfig ---------------------------------------------------------------

ModelConfig ModelConfig::defaults(std::uint64_t seed) {
  ModelConfig c;
  for (auto kind : learners::all_kinds())
    c.learners.emplace(kind, RegressorSpec::defaults(kind, derive_seed(seed, learners::to_string(kind))));
  c.base = stacking::default_base_specs(derive_seed(seed, "stacking"));
  c.meta = stacking::default_meta_spec(derive_seed(seed, "stacking"));
  return c;
}

const RegressorSpec& ModelConfig::spec(LearnerKind kind) const {
  const auto it = learners.find(kind);
  require(it != learners.end(), ErrorKind::InvalidArgument,
          "no settings for learner " + std::string(learners::to_string(kind)));
  return it->second;
}

// Features --------------------------------------------------------------------

FeaturePlan plan_features(const data::Dataset& train, const FeatureOptions& options, const info::WarningSink& warn) {
  FeaturePlan plan;
  if (options.top_k) {
    require(*options.top_k >= 1, ErrorKind::InvalidArgument, "selection count k must be >= 1");
    plan.ranking = info::rank_features(train, warn);
    const auto k = std::min(*options.top_k, plan.ranking->size());
    plan.features = info::select_top_k(*plan.ranking, k);
  } else {
    plan.features = train.feature_names();
  }
  if (options.window) {
    require(*options.window >= 1, ErrorKind::InvalidArgument, "rolling window must be >= 1");
    plan.window = *options.window;
  } else {
    auto search = options.search;
    search.whiten = options.whiten;
    search.epsilon = options.epsilon;
    plan.window_choice = preprocess::choose_window(train.select(plan.features), search);
    plan.window = plan.window_choice->window_months;
  }
  return plan;
}

Matrix design_matrix(const data::Dataset& ds, const std::vector<std::string>& features, int window) {
  return preprocess::add_rolling_average(ds.select(features), window).features();
}

// TrainedPipeline -------------------------------------------------------------

TrainedPipeline::TrainedPipeline(Method method, std::vector<std::string> features, int window,
                                 std::string target_name, preprocess::FeatureTransform transform,
                                 preprocess::TargetScaler scaler, TrainedModel model)
    : method_(method),
      features_(std::move(features)),
      window_(window),
      target_name_(std::move(target_name)),
      transform_(std::move(transform)),
      scaler_(scaler),
      model_(std::move(model)) {
  require(window_ >= 1, ErrorKind::InvalidArgument, "pipeline window must be >= 1");
  require(transform_.input_dim() == static_cast<Index>(features_.size()) + 1, ErrorKind::DimensionMismatch,
          "pipeline: transform expects " + std::to_string(transform_.input_dim()) + " inputs for " +
              std::to_string(features_.size()) + " features plus the rolling average");
  require((method_ == Method::Stacking) == std::holds_alternative<stacking::StackedModel>(model_),
          ErrorKind::InvalidArgument, "pipeline: model type does not match method");
}

Vector TrainedPipeline::predict_design(const Matrix& design) const {
  const Matrix z = transform_.apply(design);
  const Vector raw = std::visit(
      [&](const auto& m) -> Vector {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, stacking::StackedModel>)
          return stacking::predict_stacked(m, z);
        else
          return m.predict(z);
      },
      model_);
  return scaler_.inverse(raw);
}

Vector TrainedPipeline::predict_rows(const data::Dataset& ds, Index begin, Index end) const {
  require(begin >= window_ && begin < end && end <= ds.rows(), ErrorKind::InvalidArgument,
          "pipeline: rows [" + std::to_string(begin) + ", " + std::to_string(end) + ") need " +
              std::to_string(window_) + " rows of history inside a dataset of " + std::to_string(ds.rows()));
  // Only rows before `end` are read: the rolling average looks backwards.
  const Matrix design = design_matrix(ds.slice(0, end), features_, window_);
  return predict_design(design.bottomRows(end - begin));
}

void TrainedPipeline::save(std::ostream& out) const {
  io::Writer w(out);
  w.tag("spreadcast-pipeline").integer(1).newline();
  w.tag(to_string(method_)).integer(window_).text(target_name_).newline();
  w.integer(static_cast<std::int64_t>(features_.size()));
  for (const auto& f : features_) w.text(f);
  w.newline();
  transform_.save(out);
  w.newline();
  w.real(scaler_.mean).real(scaler_.scale).newline();
  std::visit([&](const auto& m) { m.save(out); }, model_);
}

TrainedPipeline TrainedPipeline::load(std::istream& in) {
  io::Reader r(in);
  r.expect("spreadcast-pipeline");
  const auto version = r.integer();
  require(version == 1, ErrorKind::Format, "pipeline artifact: unsupported version " + std::to_string(version));
  const auto method_name = r.token();
  const auto method = parse_method(method_name);
  require(method.has_value(), ErrorKind::Format, "pipeline artifact: unknown method '" + method_name + "'");
  const auto window = static_cast<int>(r.integer());
  auto target = r.text();
  const auto count = r.integer();
  require(count >= 0, ErrorKind::Format, "pipeline artifact: negative feature count");
  std::vector<std::string> features(static_cast<std::size_t>(count));
  for (auto& f : features) f = r.text();
  auto transform = preprocess::FeatureTransform::load(in);
  preprocess::TargetScaler scaler;
  scaler.mean = r.real();
  scaler.scale = r.real();
  TrainedModel model = *method == Method::Stacking ? TrainedModel(stacking::StackedModel::load(in))
                                                   : TrainedModel(learners::FittedRegressor::load(in));
  return TrainedPipeline(*method, std::move(features), window, std::move(target), std::move(transform), scaler,
                         std::move(model));
}

// Fitting -----------------------------------------------------------------------

TrainedPipeline fit_pipeline(const data::Dataset& ds, Index train_end, const FeaturePlan& plan, Method method,
                             const ModelConfig& models, const FeatureOptions& options) {
  require(train_end > plan.window && train_end <= ds.rows(), ErrorKind::InvalidArgument,
          "pipeline: training span of " + std::to_string(train_end) + " rows is too short for window " +
              std::to_string(plan.window));
  const auto train = ds.slice(0, train_end);
  const Matrix x = design_matrix(train, plan.features, plan.window);
  const Vector y = train.target().tail(x.rows());

  auto transform = preprocess::FeatureTransform::fit(x, options.whiten, options.epsilon);
  const auto scaler = preprocess::TargetScaler::fit(y);
  const Matrix z = transform.apply(x);
  const Vector ys = scaler.forward(y);

  TrainedModel model = method == Method::Stacking
                           ? TrainedModel(stacking::fit_stacked(models.base, models.meta, z, ys, models.mode,
                                                                models.folds))
                           : TrainedModel(learners::fit(models.spec(single_kind(method)), z, ys));
  return TrainedPipeline(method, plan.features, plan.window, ds.target_name(), std::move(transform), scaler,
                         std::move(model));
}

TrainedPipeline fit_pipeline(const data::Dataset& ds, Index train_end, Method method, const ModelConfig& models,
                             const FeatureOptions& options) {
  require(train_end >= 2 && train_end <= ds.rows(), ErrorKind::InvalidArgument, "pipeline: bad training span");
  const auto plan = plan_features(ds.slice(0, train_end), options);
  return fit_pipeline(ds, train_end, plan, method, models, options);
}

// Forecasting ---------------------------------------------------------------------

namespace {

Vector latest_features(const data::Dataset& ds, const TrainedPipeline& pipeline) {
  require(ds.rows() >= pipeline.window(), ErrorKind::InvalidArgument,
          "forecast: need at least " + std::to_string(pipeline.window()) + " observed months");
  Vector row(static_cast<Index>(pipeline.features().size()));
  for (std::size_t j = 0; j < pipeline.features().size(); ++j) {
    const auto col = ds.find_feature(pipeline.features()[j]);
    require(col.has_value(), ErrorKind::InvalidArgument,
            "forecast: dataset lacks feature '" + pipeline.features()[j] + "'");
    row[static_cast<Index>(j)] = ds.features()(ds.rows() - 1, *col);
  }
  return row;
}

}  // namespace

Matrix next_design_row(const data::Dataset& ds, const TrainedPipeline& pipeline) {
  const Vector x = latest_features(ds, pipeline);
  Matrix row(1, x.size() + 1);
  row.leftCols(x.size()) = x.transpose();
  // Same summation order as rolling_average_feature.
  double sum = 0.0;
  for (Index i = ds.rows() - pipeline.window(); i < ds.rows(); ++i) sum += ds.target()[i];
  row(0, x.size()) = sum / static_cast<double>(pipeline.window());
  return row;
}

std::vector<ForecastPoint> forecast_next(const data::Dataset& ds, const TrainedPipeline& pipeline, int horizon) {
  require(horizon >= 1, ErrorKind::InvalidArgument, "forecast horizon must be >= 1");
  Matrix row = next_design_row(ds, pipeline);
  const Index avg_col = row.cols() - 1;
  const auto w = static_cast<std::size_t>(pipeline.window());

  std::vector<double> history(ds.target().data() + ds.rows() - static_cast<Index>(w),
                              ds.target().data() + ds.rows());
  std::vector<ForecastPoint> out;
  auto month = ds.dates().back();
  for (int h = 0; h < horizon; ++h) {
    month = month.next();
    const double value = pipeline.predict_design(row)[0];
    require(std::isfinite(value), ErrorKind::Diverged, "forecast: model produced a non-finite prediction");
    out.push_back({month, value});
    history.push_back(value);
    double sum = 0.0;
    for (std::size_t i = history.size() - w; i < history.size(); ++i) sum += history[i];
    row(0, avg_col) = sum / static_cast<double>(w);
  }
  return out;
}

}  // namespace spreadcast::eval
