#include "spreadcast/learners.hpp"

#include "models.hpp"
#include "spreadcast/csv.hpp"
#include "spreadcast/error.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

namespace spreadcast::learners {
namespace {

constexpr std::string_view kArtifactMagic = "spreadcast-regressor";
constexpr int kArtifactVersion = 1;

int parse_int_value(const std::string& key, const std::string& text) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  require(ec == std::errc{} && ptr == text.data() + text.size(), ErrorKind::InvalidArgument,
          "hyperparameter '" + key + "' expects an integer, got '" + text + "'");
  return v;
}

double parse_real_value(const std::string& key, const std::string& text) {
  const auto v = csv::parse_number(text);
  require(v.has_value(), ErrorKind::InvalidArgument,
          "hyperparameter '" + key + "' expects a number, got '" + text + "'");
  return *v;
}

bool parse_bool_value(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  fail(ErrorKind::InvalidArgument, "hyperparameter '" + key + "' expects a boolean, got '" + text + "'");
}

[[noreturn]] void unknown_key(LearnerKind kind, const std::string& key) {
  fail(ErrorKind::InvalidArgument,
       "unknown hyperparameter '" + key + "' for learner " + std::string(to_string(kind)));
}

}  // namespace

std::string_view to_string(LearnerKind kind) noexcept {
  switch (kind) {
    case LearnerKind::Ols: return "ols";
    case LearnerKind::Knn: return "knn";
    case LearnerKind::KernelRidge: return "kernel_ridge";
    case LearnerKind::RandomForest: return "random_forest";
    case LearnerKind::Mlp: return "mlp";
  }
  return "?";
}

std::optional<LearnerKind> parse_kind(std::string_view name) {
  for (auto k : all_kinds())
    if (to_string(k) == name) return k;
  return std::nullopt;
}

const std::vector<LearnerKind>& all_kinds() {
  static const std::vector<LearnerKind> kinds = {LearnerKind::Ols, LearnerKind::Knn, LearnerKind::KernelRidge,
                                                 LearnerKind::RandomForest, LearnerKind::Mlp};
  return kinds;
}

// RegressorSpec -----------------------------------------------------------

LearnerKind RegressorSpec::kind() const noexcept { return static_cast<LearnerKind>(params.index()); }

RegressorSpec RegressorSpec::defaults(LearnerKind kind, std::uint64_t seed) {
  RegressorSpec spec;
  spec.seed = seed;
  switch (kind) {
    case LearnerKind::Ols: spec.params = OlsParams{}; break;
    case LearnerKind::Knn: spec.params = KnnParams{}; break;
    case LearnerKind::KernelRidge: spec.params = KernelRidgeParams{}; break;
    case LearnerKind::RandomForest: spec.params = ForestParams{}; break;
    case LearnerKind::Mlp: spec.params = MlpParams{}; break;
  }
  return spec;
}

RegressorSpec RegressorSpec::with(const std::map<std::string, std::string>& overrides) const {
  RegressorSpec out = *this;
  const auto k = kind();
  for (const auto& [key, value] : overrides) {
    std::visit(
        [&](auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, OlsParams>) {
            unknown_key(k, key);
          } else if constexpr (std::is_same_v<P, KnnParams>) {
            if (key == "k") p.k = parse_int_value(key, value);
            else unknown_key(k, key);
          } else if constexpr (std::is_same_v<P, KernelRidgeParams>) {
            if (key == "lambda") p.lambda = parse_real_value(key, value);
            else if (key == "gamma") {
              if (value == "auto") p.gamma.reset();
              else p.gamma = parse_real_value(key, value);
            } else if (key == "kernel") {
              if (value == "rbf") p.kernel = Kernel::Rbf;
              else if (value == "linear") p.kernel = Kernel::Linear;
              else fail(ErrorKind::InvalidArgument, "kernel must be 'rbf' or 'linear', got '" + value + "'");
            } else unknown_key(k, key);
          } else if constexpr (std::is_same_v<P, ForestParams>) {
            if (key == "trees") p.trees = parse_int_value(key, value);
            else if (key == "bootstrap") p.bootstrap = parse_bool_value(key, value);
            else if (key == "max_features") {
              if (value == "auto") p.max_features.reset();
              else p.max_features = parse_int_value(key, value);
            } else if (key == "min_leaf") p.min_leaf = parse_int_value(key, value);
            else if (key == "max_depth") p.max_depth = parse_int_value(key, value);
            else unknown_key(k, key);
          } else if constexpr (std::is_same_v<P, MlpParams>) {
            if (key == "hidden_units") p.hidden_units = parse_int_value(key, value);
            else if (key == "learning_rate") p.learning_rate = parse_real_value(key, value);
            else if (key == "epochs") p.epochs = parse_int_value(key, value);
            else if (key == "batch_size") p.batch_size = parse_int_value(key, value);
            else unknown_key(k, key);
          }
        },
        out.params);
  }
  out.validate();
  return out;
}

void RegressorSpec::validate() const {
  const std::string who = std::string(to_string(kind())) + ": ";
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, KnnParams>) {
          require(p.k >= 1, ErrorKind::InvalidArgument, who + "k must be >= 1");
        } else if constexpr (std::is_same_v<P, KernelRidgeParams>) {
          require(p.lambda > 0.0 && std::isfinite(p.lambda), ErrorKind::InvalidArgument, who + "lambda must be > 0");
          require(!p.gamma || (*p.gamma > 0.0 && std::isfinite(*p.gamma)), ErrorKind::InvalidArgument,
                  who + "gamma must be > 0");
        } else if constexpr (std::is_same_v<P, ForestParams>) {
          require(p.trees >= 1, ErrorKind::InvalidArgument, who + "trees must be >= 1");
          require(!p.max_features || *p.max_features >= 1, ErrorKind::InvalidArgument,
                  who + "max_features must be >= 1");
          require(p.min_leaf >= 1, ErrorKind::InvalidArgument, who + "min_leaf must be >= 1");
          require(p.max_depth >= 0, ErrorKind::InvalidArgument, who + "max_depth must be >= 0");
        } else if constexpr (std::is_same_v<P, MlpParams>) {
          require(p.hidden_units >= 1, ErrorKind::InvalidArgument, who + "hidden_units must be >= 1");
          require(p.learning_rate > 0.0 && std::isfinite(p.learning_rate), ErrorKind::InvalidArgument,
                  who + "learning_rate must be > 0");
          require(p.epochs >= 1, ErrorKind::InvalidArgument, who + "epochs must be >= 1");
          require(p.batch_size >= 1, ErrorKind::InvalidArgument, who + "batch_size must be >= 1");
        }
      },
      params);
}

std::map<std::string, std::string> RegressorSpec::describe() const {
  std::map<std::string, std::string> out;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, KnnParams>) {
          out["k"] = std::to_string(p.k);
        } else if constexpr (std::is_same_v<P, KernelRidgeParams>) {
          out["kernel"] = p.kernel == Kernel::Rbf ? "rbf" : "linear";
          out["lambda"] = csv::format_number(p.lambda);
          out["gamma"] = p.gamma ? csv::format_number(*p.gamma) : "auto";
        } else if constexpr (std::is_same_v<P, ForestParams>) {
          out["trees"] = std::to_string(p.trees);
          out["bootstrap"] = p.bootstrap ? "true" : "false";
          out["max_features"] = p.max_features ? std::to_string(*p.max_features) : "auto";
          out["min_leaf"] = std::to_string(p.min_leaf);
          out["max_depth"] = std::to_string(p.max_depth);
        } else if constexpr (std::is_same_v<P, MlpParams>) {
          out["hidden_units"] = std::to_string(p.hidden_units);
          out["learning_rate"] = csv::format_number(p.learning_rate);
          out["epochs"] = std::to_string(p.epochs);
          out["batch_size"] = std::to_string(p.batch_size);
        }
      },
      params);
  return out;
}

bool operator==(const RegressorSpec& a, const RegressorSpec& b) {
  return a.seed == b.seed && a.kind() == b.kind() && a.describe() == b.describe();
}

// FittedRegressor ---------------------------------------------------------

FittedRegressor::FittedRegressor(RegressorSpec spec, Index input_dim, std::shared_ptr<const detail::Model> model)
    : spec_(std::move(spec)), input_dim_(input_dim), model_(std::move(model)) {
  require(model_ != nullptr, ErrorKind::InvalidArgument, "fitted regressor without a model");
}

Vector FittedRegressor::predict(const Matrix& x) const {
  require(x.cols() == input_dim_, ErrorKind::DimensionMismatch,
          std::string(to_string(kind())) + ": expected " + std::to_string(input_dim_) + " input columns, got " +
              std::to_string(x.cols()));
  require(x.allFinite(), ErrorKind::InvalidArgument, "predict: non-finite input");
  if (x.rows() == 0) return Vector(0);
  Vector out = model_->predict(x);
  require(out.allFinite(), ErrorKind::Diverged, std::string(to_string(kind())) + ": non-finite prediction");
  return out;
}

void FittedRegressor::save(std::ostream& out) const {
  io::Writer w(out);
  w.tag(kArtifactMagic).integer(kArtifactVersion).newline();
  w.tag("kind").tag(to_string(kind())).newline();
  w.tag("seed").tag(std::to_string(spec_.seed)).newline();
  const auto params = spec_.describe();
  w.tag("params").integer(static_cast<std::int64_t>(params.size()));
  for (const auto& [k, v] : params) w.text(k).text(v);
  w.newline();
  w.tag("input_dim").integer(input_dim_).newline();
  w.tag("state").newline();
  model_->save_state(out);
  w.tag("end").newline();
}

FittedRegressor FittedRegressor::load(std::istream& in) {
  io::Reader r(in);
  r.expect(kArtifactMagic);
  const auto version = r.integer();
  require(version == kArtifactVersion, ErrorKind::Format,
          "unsupported regressor artifact version " + std::to_string(version));
  r.expect("kind");
  const auto kind_name = r.token();
  const auto kind = parse_kind(kind_name);
  require(kind.has_value(), ErrorKind::Format, "unknown learner kind '" + kind_name + "'");
  r.expect("seed");
  const auto seed_text = r.token();
  std::uint64_t seed = 0;
  {
    const auto [ptr, ec] = std::from_chars(seed_text.data(), seed_text.data() + seed_text.size(), seed);
    require(ec == std::errc{} && ptr == seed_text.data() + seed_text.size(), ErrorKind::Format,
            "bad seed '" + seed_text + "'");
  }
  r.expect("params");
  const auto count = r.integer();
  std::map<std::string, std::string> params;
  for (std::int64_t i = 0; i < count; ++i) {
    auto key = r.text();
    params[key] = r.text();
  }
  auto spec = RegressorSpec::defaults(*kind, seed).with(params);
  r.expect("input_dim");
  const auto input_dim = r.integer();
  r.expect("state");

  detail::ModelPtr model;
  switch (*kind) {
    case LearnerKind::Ols: model = detail::load_ols(r); break;
    case LearnerKind::Knn: model = detail::load_knn(r); break;
    case LearnerKind::KernelRidge: model = detail::load_kernel_ridge(r); break;
    case LearnerKind::RandomForest: model = detail::load_forest(r); break;
    case LearnerKind::Mlp: model = detail::load_mlp(r); break;
  }
  r.expect("end");
  return FittedRegressor(std::move(spec), input_dim, std::move(model));
}

FittedRegressor fit(const RegressorSpec& spec, const Matrix& x, const Vector& y) {
  spec.validate();
  const std::string who(to_string(spec.kind()));
  require(x.rows() == y.size(), ErrorKind::DimensionMismatch, who + ": x and y disagree on row count");
  require(x.rows() >= 2, ErrorKind::InvalidArgument, who + ": need at least 2 training rows");
  require(x.cols() >= 1, ErrorKind::InvalidArgument, who + ": need at least 1 input column");
  require(x.allFinite() && y.allFinite(), ErrorKind::InvalidArgument, who + ": non-finite training data");

  detail::ModelPtr model;
  switch (spec.kind()) {
    case LearnerKind::Ols: model = detail::fit_ols(x, y); break;
    case LearnerKind::Knn: model = detail::fit_knn(std::get<KnnParams>(spec.params), x, y); break;
    case LearnerKind::KernelRidge:
      model = detail::fit_kernel_ridge(std::get<KernelRidgeParams>(spec.params), x, y);
      break;
    case LearnerKind::RandomForest:
      model = detail::fit_forest(std::get<ForestParams>(spec.params), spec.seed, x, y);
      break;
    case LearnerKind::Mlp: model = detail::fit_mlp(std::get<MlpParams>(spec.params), spec.seed, x, y); break;
  }
  return FittedRegressor(spec, x.cols(), std::move(model));
}

}  // namespace spreadcast::learners
