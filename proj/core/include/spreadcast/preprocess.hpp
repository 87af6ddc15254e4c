#pragma once

#include "spreadcast/data.hpp"
#include "spreadcast/learners.hpp"
#include "spreadcast/linalg.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace spreadcast::preprocess {

inline constexpr double kDefaultEpsilon = 1e-8;
inline constexpr double kEigenvalueFloor = 1e-10;
inline constexpr int kMinWindow = 1;
inline constexpr int kMaxWindow = 12;

/// out[t] = mean(target[t - window .. t - 1]); the first `window` entries
/// are missing (NaN). Only strictly earlier values are used.
std::vector<double> rolling_average_feature(std::span<const double> target, int window);

/// Name of the appended rolling-average column for a given target.
std::string rolling_feature_name(const std::string& target_name);

/// Appends the rolling average of the target as the last feature column and
/// drops the first `window` rows, which have no complete history.
data::Dataset add_rolling_average(const data::Dataset& ds, int window);

// Column scaling ------------------------------------------------------------

/// Per-column z-score. Zero-variance columns are centred but not scaled.
struct Standardizer {
  Vector means;
  Vector scales;

  static Standardizer fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;
};

/// Affine target scaling used inside the training pipeline.
struct TargetScaler {
  double mean = 0.0;
  double scale = 1.0;

  static TargetScaler fit(const Vector& y);
  Vector forward(const Vector& y) const { return (y.array() - mean) / scale; }
  Vector inverse(const Vector& z) const { return (z.array() * scale + mean).matrix(); }
};

/// PCA whitening: x -> (x - means) * basis * diag(scales).
/// basis holds the retained covariance eigenvectors (largest eigenvalue
/// first) as orthonormal columns; scales = 1 / sqrt(eigenvalue + epsilon).
struct WhiteningTransform {
  Vector means;
  Matrix basis;  // d x r
  Vector scales;
  Vector eigenvalues;
  double epsilon = kDefaultEpsilon;

  Index input_dim() const noexcept { return basis.rows(); }
  Index rank() const noexcept { return basis.cols(); }
};

/// Centres the columns and eigendecomposes the sample covariance (n - 1
/// normalisation). Components with eigenvalue below 1e-10 are dropped.
WhiteningTransform fit_whitening(const Matrix& x, double epsilon = kDefaultEpsilon);

Matrix apply_whitening(const WhiteningTransform& t, const Matrix& x);

/// z-score followed by optional whitening, fitted on training rows only.
class FeatureTransform {
 public:
  static FeatureTransform fit(const Matrix& x, bool whiten = true, double epsilon = kDefaultEpsilon);

  Matrix apply(const Matrix& x) const;

  Index input_dim() const noexcept { return standardizer_.means.size(); }
  Index output_dim() const noexcept;
  bool whitens() const noexcept { return whiten_; }
  const Standardizer& standardizer() const noexcept { return standardizer_; }
  const WhiteningTransform& whitening() const noexcept { return whitening_; }

  void save(std::ostream& out) const;
  static FeatureTransform load(std::istream& in);

 private:
  Standardizer standardizer_;
  bool whiten_ = true;
  WhiteningTransform whitening_;
};

// Window search ---------------------------------------------------------------

struct WindowChoice {
  int window_months = 1;
  double validation_mse = 0.0;
  std::vector<double> sweep_mse;  // one entry per candidate window, in order
};

struct WindowSearch {
  int min_window = kMinWindow;
  int max_window = kMaxWindow;
  learners::RegressorSpec learner = learners::RegressorSpec::defaults(learners::LearnerKind::KernelRidge);
  bool whiten = true;
  double epsilon = kDefaultEpsilon;
  double validation_fraction = 0.2;
};

/// Minimum number of rows left after the largest window.
inline constexpr Index kMinWindowSearchRows = 10;

/// Tries every window in [min_window, max_window]. For each, the rolling
/// average is appended, the leading max_window rows are dropped (so every
/// candidate is scored on the same rows), the learner is fitted on the
/// first 80% of what remains and scored by MSE on the last 20%. Ties go to
/// the smaller window.
WindowChoice choose_window(const data::Dataset& ds, const WindowSearch& search = {});

/// Validation MSE for one window, exactly as choose_window computes it.
double window_validation_mse(const data::Dataset& ds, int window, const WindowSearch& search);

}  // namespace spreadcast::preprocess
