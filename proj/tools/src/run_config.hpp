#pragma once

#include "spreadcast/backtest.hpp"
#include "spreadcast/learners.hpp"
#include "spreadcast/pipeline.hpp"
#include "spreadcast/stacking.hpp"
#include "spreadcast/synthetic.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spreadcast::cli {

/// Settings for one command. Defaults first, then the config file, then
/// command-line flags.
struct RunConfig {
  // [data]
  std::vector<std::filesystem::path> data_paths;
  std::string date_column = "date";
  std::string target_column = "SPREAD";
  bool difference = true;

  // [select]
  std::size_t k = info::kDefaultTopK;
  bool select = true;

  // [split]
  double train_fraction = 0.7;

  // [preprocess]
  std::optional<int> window;
  int min_window = preprocess::kMinWindow;
  int max_window = preprocess::kMaxWindow;
  learners::LearnerKind window_learner = learners::LearnerKind::KernelRidge;
  bool whiten = true;
  double epsilon = preprocess::kDefaultEpsilon;

  // [stacking]
  stacking::StackingMode mode = stacking::StackingMode::InSample;
  int folds = stacking::kDefaultFolds;
  std::vector<learners::LearnerKind> base{learners::LearnerKind::Mlp, learners::LearnerKind::RandomForest,
                                          learners::LearnerKind::Knn};
  learners::LearnerKind meta = learners::LearnerKind::KernelRidge;

  // [ols] [knn] [kernel_ridge] [random_forest] [mlp]
  std::map<learners::LearnerKind, std::map<std::string, std::string>> overrides;

  // [train]
  eval::Method method = eval::Method::Stacking;

  // [forecast]
  int horizon = 1;
  bool refit = false;

  // [synth]
  synthetic::SyntheticConfig synth;

  // [run]
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out;

  /// Reads an INI file; unknown sections or keys are errors.
  void load_file(const std::filesystem::path& path);

  /// Applies "section.key=value" (or "learner.key=value") settings.
  void set(const std::string& section, const std::string& key, const std::string& value);

  /// Learner settings with per-learner seeds derived from `seed`.
  eval::ModelConfig model_config() const;

  eval::FeatureOptions feature_options() const;

  eval::BacktestConfig backtest_config() const;
};

}  // namespace spreadcast::cli
