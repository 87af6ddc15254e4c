#include "spreadcast/stacking.hpp"

#include "spreadcast/error.hpp"
#include "spreadcast/parallel.hpp"
#include "spreadcast/random.hpp"
#include "spreadcast/serialize.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace spreadcast::stacking {
namespace {

using learners::FittedRegressor;
using learners::RegressorSpec;

FittedRegressor fit_base(const RegressorSpec& spec, std::size_t index, const Matrix& x, const Vector& y) {
  try {
    return learners::fit(spec, x, y);
  } catch (const Error& e) {
    throw Error(e.kind(), "base learner " + std::to_string(index) + " (" + std::string(learners::to_string(spec.kind())) +
                              ") failed: " + e.what());
  }
}

std::vector<FittedRegressor> fit_all(const std::vector<RegressorSpec>& specs, const Matrix& x, const Vector& y) {
  std::vector<std::optional<FittedRegressor>> slots(specs.size());
  parallel_for(specs.size(), [&](std::size_t t) { slots[t] = fit_base(specs[t], t, x, y); });
  std::vector<FittedRegressor> out;
  out.reserve(specs.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

Matrix predict_all(const std::vector<FittedRegressor>& models, const Matrix& x) {
  Matrix out(x.rows(), static_cast<Index>(models.size()));
  for (std::size_t t = 0; t < models.size(); ++t) out.col(static_cast<Index>(t)) = models[t].predict(x);
  return out;
}

}  // namespace

std::string_view to_string(StackingMode mode) noexcept {
  return mode == StackingMode::InSample ? "insample" : "kfold";
}

std::optional<StackingMode> parse_mode(std::string_view name) {
  if (name == "insample") return StackingMode::InSample;
  if (name == "kfold") return StackingMode::KFold;
  return std::nullopt;
}

StackedModel::StackedModel(std::vector<FittedRegressor> base, FittedRegressor meta, StackingMode mode, int folds)
    : base_(std::move(base)), meta_(std::move(meta)), mode_(mode), folds_(folds) {
  require(!base_.empty(), ErrorKind::InvalidArgument, "stacked model needs at least one base learner");
  for (const auto& b : base_) {
    require(b.input_dim() == base_.front().input_dim(), ErrorKind::DimensionMismatch,
            "stacked model: base learners disagree on input dimension");
  }
  require(meta_.input_dim() == static_cast<Index>(base_.size()), ErrorKind::DimensionMismatch,
          "stacked model: meta input dimension must equal the number of base learners");
}

Matrix StackedModel::base_predictions(const Matrix& x) const {
  require(x.cols() == input_dim(), ErrorKind::DimensionMismatch,
          "stacked model: expected " + std::to_string(input_dim()) + " input columns, got " + std::to_string(x.cols()));
  return predict_all(base_, x);
}

void StackedModel::save(std::ostream& out) const {
  io::Writer w(out);
  w.tag("spreadcast-stack").integer(1).tag(to_string(mode_)).integer(folds_).integer(
       static_cast<std::int64_t>(base_.size())).newline();
  for (const auto& b : base_) b.save(out);
  meta_.save(out);
  w.tag("end-stack").newline();
}

StackedModel StackedModel::load(std::istream& in) {
  io::Reader r(in);
  r.expect("spreadcast-stack");
  require(r.integer() == 1, ErrorKind::Format, "unsupported stack artifact version");
  const auto mode_name = r.token();
  const auto mode = parse_mode(mode_name);
  require(mode.has_value(), ErrorKind::Format, "unknown stacking mode '" + mode_name + "'");
  const auto folds = static_cast<int>(r.integer());
  const auto count = r.integer();
  require(count >= 1, ErrorKind::Format, "stack artifact has no base learners");
  std::vector<FittedRegressor> base;
  for (std::int64_t i = 0; i < count; ++i) base.push_back(FittedRegressor::load(in));
  auto meta = FittedRegressor::load(in);
  r.expect("end-stack");
  return StackedModel(std::move(base), std::move(meta), *mode, folds);
}

std::vector<RegressorSpec> default_base_specs(std::uint64_t seed) {
  using learners::LearnerKind;
  return {RegressorSpec::defaults(LearnerKind::Mlp, derive_seed(seed, "mlp")),
          RegressorSpec::defaults(LearnerKind::RandomForest, derive_seed(seed, "random_forest")),
          RegressorSpec::defaults(LearnerKind::Knn, derive_seed(seed, "knn"))};
}

RegressorSpec default_meta_spec(std::uint64_t seed) {
  return RegressorSpec::defaults(learners::LearnerKind::KernelRidge, derive_seed(seed, "meta"));
}

std::vector<Index> fold_bounds(Index n, int folds) {
  require(folds >= 2, ErrorKind::InvalidArgument, "k-fold stacking needs at least 2 folds");
  require(n >= folds, ErrorKind::InvalidArgument,
          "k-fold stacking needs at least as many rows (" + std::to_string(n) + ") as folds (" +
              std::to_string(folds) + ")");
  std::vector<Index> bounds(static_cast<std::size_t>(folds) + 1);
  for (int j = 0; j <= folds; ++j) bounds[static_cast<std::size_t>(j)] = n * j / folds;
  return bounds;
}

Matrix meta_features(const std::vector<RegressorSpec>& specs, const Matrix& x, const Vector& y, StackingMode mode,
                     int folds) {
  require(!specs.empty(), ErrorKind::InvalidArgument, "stacking needs at least one base learner");
  require(x.rows() == y.size(), ErrorKind::DimensionMismatch, "stacking: x and y disagree on row count");
  if (mode == StackingMode::InSample) return predict_all(fit_all(specs, x, y), x);

  const Index n = x.rows();
  const auto bounds = fold_bounds(n, folds);
  Matrix out(n, static_cast<Index>(specs.size()));
  for (int j = 0; j < folds; ++j) {
    const Index lo = bounds[static_cast<std::size_t>(j)];
    const Index hi = bounds[static_cast<std::size_t>(j) + 1];
    std::vector<Index> train_rows;
    train_rows.reserve(static_cast<std::size_t>(n - (hi - lo)));
    for (Index i = 0; i < n; ++i)
      if (i < lo || i >= hi) train_rows.push_back(i);
    const Matrix xt = take_rows(x, train_rows);
    const Vector yt = take_rows(y, train_rows);
    const auto models = fit_all(specs, xt, yt);
    out.middleRows(lo, hi - lo) = predict_all(models, x.middleRows(lo, hi - lo));
  }
  return out;
}

StackedModel fit_stacked(const std::vector<RegressorSpec>& specs, const RegressorSpec& meta_spec, const Matrix& x,
                         const Vector& y, StackingMode mode, int folds) {
  require(!specs.empty(), ErrorKind::InvalidArgument, "stacking needs at least one base learner");
  Matrix level_one;
  std::vector<FittedRegressor> base;
  if (mode == StackingMode::InSample) {
    base = fit_all(specs, x, y);
    level_one = predict_all(base, x);
  } else {
    level_one = meta_features(specs, x, y, mode, folds);
    base = fit_all(specs, x, y);
  }
  learners::FittedRegressor meta = [&] {
    try {
      return learners::fit(meta_spec, level_one, y);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string("meta learner (") + std::string(learners::to_string(meta_spec.kind())) +
                                ") failed: " + e.what());
    }
  }();
  return StackedModel(std::move(base), std::move(meta), mode, mode == StackingMode::KFold ? folds : 0);
}

Vector predict_stacked(const StackedModel& model, const Matrix& x) {
  return model.meta_model().predict(model.base_predictions(x));
}

}  // namespace spreadcast::stacking
