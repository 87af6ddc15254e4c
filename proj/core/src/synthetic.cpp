#include "spreadcast/synthetic.hpp"

#include "spreadcast/error.hpp"
#include "spreadcast/random.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace spreadcast::synthetic {

namespace {

// Population standard deviations under z ~ N(0, 1).
constexpr double kSdTanh = 0.735288;  // tanh(1.5 z)
constexpr double kSdSquare = std::numbers::sqrt2;  // z^2 - 1
constexpr double kSdSin = 0.686974;  // sin(1.2 z)
constexpr double kSdAbs = 0.602810;  // |z|
constexpr double kSdRelu = 0.583819;  // max(z, 0)

constexpr double kLinearWeights[] = {1.0, -0.8, 0.6, 0.5, -0.4, 0.3};

std::vector<double> ar1(Rng& rng, Index n, double phi, double sd = 1.0) {
  std::vector<double> out(static_cast<std::size_t>(n));
  const double innovation = std::sqrt(1.0 - phi * phi);
  double z = rng.normal();
  for (auto& v : out) {
    v = sd * z;
    z = phi * z + innovation * rng.normal();
  }
  return out;
}

std::string feature_name(Index j) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "f%02ld", static_cast<long>(j + 1));
  return buf;
}

double nonlinear_term(Index j, double z) {
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  switch (j) {
    case 0: return z;
    case 1: return std::tanh(1.5 * z) / kSdTanh;
    case 2: return (z * z - 1.0) / kSdSquare;
    case 3: return std::sin(1.2 * z) / kSdSin;
    case 4: return (std::abs(z) - std::sqrt(2.0 / std::numbers::pi)) / kSdAbs;
    default: return (std::max(z, 0.0) - inv_sqrt_2pi) / kSdRelu;
  }
}

}  // namespace

std::string_view to_string(Recipe recipe) noexcept { return recipe == Recipe::Linear ? "linear" : "nonlinear"; }

std::optional<Recipe> parse_recipe(std::string_view name) {
  if (name == "nonlinear") return Recipe::Nonlinear;
  if (name == "linear") return Recipe::Linear;
  return std::nullopt;
}

std::vector<std::string> true_feature_names(const SyntheticConfig& config) {
  std::vector<std::string> names;
  for (Index j = 0; j < std::min(kTrueFeatures, config.d); ++j) names.push_back(feature_name(j));
  return names;
}

data::Dataset generate_synthetic(const SyntheticConfig& config) {
  require(config.n >= 40, ErrorKind::InvalidArgument,
          "synthetic: n must be >= 40, got " + std::to_string(config.n));
  require(config.d >= 5, ErrorKind::InvalidArgument, "synthetic: d must be >= 5, got " + std::to_string(config.d));
  require(std::isfinite(config.noise) && config.noise >= 0.0, ErrorKind::InvalidArgument,
          "synthetic: noise must be a non-negative number");

  const Index n = config.n;
  const Index d = config.d;
  const Index truth = std::min(kTrueFeatures, d);
  Rng rng(config.seed);

  Matrix x(n, d);
  for (Index j = 0; j < truth; ++j) {
    const auto z = ar1(rng, n, 0.6);
    for (Index t = 0; t < n; ++t) x(t, j) = z[static_cast<std::size_t>(t)];
  }

  Vector u = Vector::Zero(n);
  for (Index j = 0; j < truth; ++j)
    for (Index t = 0; t < n; ++t)
      u[t] += config.recipe == Recipe::Linear ? kLinearWeights[j] * x(t, j) : nonlinear_term(j, x(t, j));
  if (config.recipe == Recipe::Nonlinear) {
    const auto a = ar1(rng, n, 0.8, 0.5);
    for (Index t = 0; t < n; ++t) u[t] += a[static_cast<std::size_t>(t)];
  }
  for (Index t = 0; t < n; ++t) u[t] += config.noise * rng.normal();

  const auto common = ar1(rng, n, 0.9);
  for (Index j = truth; j < d; ++j) {
    const auto v = ar1(rng, n, 0.5);
    for (Index t = 0; t < n; ++t)
      x(t, j) = 0.6 * common[static_cast<std::size_t>(t)] + 0.8 * v[static_cast<std::size_t>(t)];
  }

  std::vector<data::YearMonth> dates;
  std::vector<std::string> names;
  for (Index t = 0; t < n; ++t) dates.push_back(data::YearMonth(2008, 1).plus_months(t));
  for (Index j = 0; j < d; ++j) names.push_back(feature_name(j));
  Vector y = (200.0 + 40.0 * u.array()).matrix();
  return data::Dataset(std::move(dates), std::move(x), std::move(names), std::move(y), "SPREAD");
}

}  // namespace spreadcast::synthetic
