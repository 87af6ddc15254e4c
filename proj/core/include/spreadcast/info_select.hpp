#pragma once

#include "spreadcast/data.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace spreadcast::info {

/// Bins per axis for the marginal entropy estimate: max(2, floor(sqrt(n))).
std::size_t entropy_bins(std::size_t n);

/// Bins per axis for the joint mutual-information grid: max(2, floor(cbrt(n))).
/// The plug-in bias of a B x B grid grows like (B-1)^2 / 2n, so the joint
/// grid is coarser than the marginal one.
std::size_t mi_bins(std::size_t n);

/// Equal-frequency bin of every sample. Tied values share a bin (the bin of
/// their lowest rank), so any strictly increasing transform of the input
/// yields the same assignment.
std::vector<std::size_t> equal_frequency_bins(std::span<const double> samples, std::size_t bins);

/// Differential entropy in nats from an equal-frequency histogram:
///   h = -sum_i p_i * log(p_i / w_i)
/// i.e. the discrete entropy of the bin frequencies plus the
/// frequency-weighted mean log bin width. Needs >= 8 non-constant samples.
double entropy(std::span<const double> samples);

/// Plug-in mutual information (nats) of the equal-frequency binned pair,
/// clamped at zero. Exactly symmetric in its arguments.
double mutual_information(std::span<const double> x, std::span<const double> y);

struct MiEstimate {
  std::string feature_name;
  double mi_nats = 0.0;
};

/// Entries sorted by descending MI; ties keep the original column order.
struct FeatureRanking {
  std::vector<MiEstimate> entries;

  std::size_t size() const noexcept { return entries.size(); }
};

using WarningSink = std::function<void(const std::string&)>;

/// Scores every feature column against the target. Zero-variance columns
/// get a score of 0 and a warning instead of aborting the ranking.
FeatureRanking rank_features(const data::Dataset& ds, const WarningSink& warn = {});

inline constexpr std::size_t kDefaultTopK = 20;

std::vector<std::string> select_top_k(const FeatureRanking& ranking, std::size_t k = kDefaultTopK);

}  // namespace spreadcast::info
