#pragma once

#include "spreadcast/linalg.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace spreadcast::learners {

enum class LearnerKind { Ols, Knn, KernelRidge, RandomForest, Mlp };

std::string_view to_string(LearnerKind kind) noexcept;
std::optional<LearnerKind> parse_kind(std::string_view name);
const std::vector<LearnerKind>& all_kinds();

/// Least squares with an intercept column.
struct OlsParams {};

struct KnnParams {
  int k = 5;  // clamped to the training size at fit time
};

enum class Kernel {
  Rbf,     // exp(-gamma * |a - b|^2)
  Linear,  // a . b + 1; the constant term plays the role of an intercept
};

struct KernelRidgeParams {
  Kernel kernel = Kernel::Rbf;
  double lambda = 0.1;
  std::optional<double> gamma;  // default 1 / input_dim
};

struct ForestParams {
  int trees = 100;
  bool bootstrap = true;
  std::optional<int> max_features;  // default max(1, floor(d / 3))
  int min_leaf = 1;
  int max_depth = 0;  // 0 = unlimited
};

struct MlpParams {
  int hidden_units = 64;
  double learning_rate = 1e-3;
  int epochs = 500;
  int batch_size = 16;
};

using Hyperparameters = std::variant<OlsParams, KnnParams, KernelRidgeParams, ForestParams, MlpParams>;

struct RegressorSpec {
  Hyperparameters params;
  std::uint64_t seed = 0;

  LearnerKind kind() const noexcept;

  static RegressorSpec defaults(LearnerKind kind, std::uint64_t seed = 0);

  /// Applies string overrides such as {"k", "7"}; unknown keys and
  /// malformed values throw.
  RegressorSpec with(const std::map<std::string, std::string>& overrides) const;

  /// Throws when a hyperparameter is out of range.
  void validate() const;

  /// Hyperparameters as key=value pairs (the inverse of with()).
  std::map<std::string, std::string> describe() const;

  friend bool operator==(const RegressorSpec& a, const RegressorSpec& b);
};

namespace detail {

class Model {
 public:
  virtual ~Model() = default;
  virtual Vector predict(const Matrix& x) const = 0;
  virtual void save_state(std::ostream& out) const = 0;
};

}  // namespace detail

/// Trained regressor. Immutable and cheap to copy; safe for concurrent
/// prediction.
class FittedRegressor {
 public:
  FittedRegressor(RegressorSpec spec, Index input_dim, std::shared_ptr<const detail::Model> model);

  LearnerKind kind() const noexcept { return spec_.kind(); }
  const RegressorSpec& spec() const noexcept { return spec_; }
  Index input_dim() const noexcept { return input_dim_; }

  /// One prediction per row of x; x must have input_dim() columns.
  Vector predict(const Matrix& x) const;

  /// Text artifact, versioned, bit-exact on reload.
  void save(std::ostream& out) const;
  static FittedRegressor load(std::istream& in);

 private:
  RegressorSpec spec_;
  Index input_dim_;
  std::shared_ptr<const detail::Model> model_;
};

/// Deterministic in (spec, x, y).
FittedRegressor fit(const RegressorSpec& spec, const Matrix& x, const Vector& y);

inline Vector predict(const FittedRegressor& model, const Matrix& x) { return model.predict(x); }

}  // namespace spreadcast::learners
