#pragma once

#include "spreadcast/learners.hpp"

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace spreadcast::stacking {

enum class StackingMode {
  InSample,  // base learners and meta trained on the same rows
  KFold,     // meta trained on out-of-fold base predictions
};

std::string_view to_string(StackingMode mode) noexcept;
std::optional<StackingMode> parse_mode(std::string_view name);

inline constexpr int kDefaultFolds = 5;

/// Two-layer ensemble: T base regressors whose predictions form the input
/// of a meta regressor.
class StackedModel {
 public:
  StackedModel(std::vector<learners::FittedRegressor> base, learners::FittedRegressor meta, StackingMode mode,
               int folds);

  const std::vector<learners::FittedRegressor>& base_models() const noexcept { return base_; }
  const learners::FittedRegressor& meta_model() const noexcept { return meta_; }
  StackingMode mode() const noexcept { return mode_; }
  int folds() const noexcept { return folds_; }
  Index input_dim() const noexcept { return base_.front().input_dim(); }

  /// q x T matrix of base predictions, columns in base-model order.
  Matrix base_predictions(const Matrix& x) const;

  void save(std::ostream& out) const;
  static StackedModel load(std::istream& in);

 private:
  std::vector<learners::FittedRegressor> base_;
  learners::FittedRegressor meta_;
  StackingMode mode_;
  int folds_;
};

/// Default base set {mlp, random_forest, knn}.
std::vector<learners::RegressorSpec> default_base_specs(std::uint64_t seed = 0);

/// Kernel-ridge meta learner with default hyperparameters.
learners::RegressorSpec default_meta_spec(std::uint64_t seed = 0);

/// Contiguous fold boundaries: fold j covers [bounds[j], bounds[j+1]).
std::vector<Index> fold_bounds(Index n, int folds);

/// The meta-level training matrix D_h. In-sample mode predicts every row
/// with models fitted on all rows; k-fold mode predicts each fold with
/// models fitted on the other folds.
Matrix meta_features(const std::vector<learners::RegressorSpec>& specs, const Matrix& x, const Vector& y,
                     StackingMode mode, int folds);

StackedModel fit_stacked(const std::vector<learners::RegressorSpec>& specs, const learners::RegressorSpec& meta_spec,
                         const Matrix& x, const Vector& y, StackingMode mode = StackingMode::InSample,
                         int folds = kDefaultFolds);

Vector predict_stacked(const StackedModel& model, const Matrix& x);

}  // namespace spreadcast::stacking
