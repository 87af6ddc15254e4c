#pragma once

#include "spreadcast/data.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spreadcast::synthetic {

enum class Recipe {
  Nonlinear,  // sparse nonlinear signal + AR(1) component + noise
  Linear,     // linear in the true features + noise, no AR component
};

std::string_view to_string(Recipe recipe) noexcept;
std::optional<Recipe> parse_recipe(std::string_view name);

inline constexpr Index kTrueFeatures = 6;

struct SyntheticConfig {
  std::uint64_t seed = 0;
  Index n = 600;
  Index d = 40;
  double noise = 0.3;
  Recipe recipe = Recipe::Nonlinear;
};

/// Monthly dataset starting 2008-01 with features f01..fNN and target
/// SPREAD (basis points).
///
/// Latent drivers z_1..z_6 are independent AR(1) series (phi 0.6, unit
/// variance); they are published unchanged as f01..f06. With s(.) the
/// population standard deviation of each term under z ~ N(0,1):
///   nonlinear: g = z1 + tanh(1.5 z2)/s + (z3^2 - 1)/s + sin(1.2 z4)/s
///                  + (|z5| - sqrt(2/pi))/s + (relu(z6) - 1/sqrt(2 pi))/s
///              u = g + a + noise * e,  a AR(1) with phi 0.8 and sd 0.5
///   linear:    u = 1.0 z1 - 0.8 z2 + 0.6 z3 + 0.5 z4 - 0.4 z5 + 0.3 z6 + noise * e
///   SPREAD = 200 + 40 u
/// The remaining d - 6 features are distractors 0.6 c + 0.8 v_j, where c is
/// a shared AR(1) (phi 0.9) and each v_j an AR(1) (phi 0.5); they are
/// correlated with each other but independent of the target. With d = 5
/// only the first five drivers are used.
data::Dataset generate_synthetic(const SyntheticConfig& config);

/// Names of the features that enter the target.
std::vector<std::string> true_feature_names(const SyntheticConfig& config);

}  // namespace spreadcast::synthetic
