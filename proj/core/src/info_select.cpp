#include "spreadcast/info_select.hpp"

#include "spreadcast/error.hpp"
#include "spreadcast/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

namespace spreadcast::info {
namespace {

constexpr std::size_t kMinSamples = 8;

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
}

void check_samples(std::span<const double> v, const char* what) {
  require(v.size() >= kMinSamples, ErrorKind::InvalidArgument,
          std::string(what) + ": need at least 8 samples, got " + std::to_string(v.size()));
  require(std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); }),
          ErrorKind::InvalidArgument, std::string(what) + ": non-finite sample");
  require(!is_constant(v), ErrorKind::InvalidArgument, std::string(what) + ": zero-variance input");
}

std::vector<std::size_t> sorted_order(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return order;
}

}  // namespace

std::size_t entropy_bins(std::size_t n) {
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)))));
}

std::size_t mi_bins(std::size_t n) {
  auto b = static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(n))));
  // cbrt can land a hair under an exact cube.
  while ((b + 1) * (b + 1) * (b + 1) <= n) ++b;
  return std::max<std::size_t>(2, b);
}

std::vector<std::size_t> equal_frequency_bins(std::span<const double> samples, std::size_t bins) {
  const std::size_t n = samples.size();
  require(bins >= 1, ErrorKind::InvalidArgument, "bin count must be positive");
  const auto order = sorted_order(samples);
  std::vector<std::size_t> out(n);
  std::size_t tie_rank = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (r > 0 && samples[order[r]] != samples[order[r - 1]]) tie_rank = r;
    out[order[r]] = tie_rank * bins / n;
  }
  return out;
}

double entropy(std::span<const double> samples) {
  check_samples(samples, "entropy");
  const std::size_t n = samples.size();
  const std::size_t bins = entropy_bins(n);

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());

  // Bin i holds sorted[start_i, start_{i+1}); interior edges sit halfway
  // between the neighbouring order statistics, outer edges at min and max.
  std::vector<std::size_t> start(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) start[i] = i * n / bins;
  std::vector<double> edge(bins + 1);
  edge.front() = sorted.front();
  edge.back() = sorted.back();
  for (std::size_t i = 1; i < bins; ++i) edge[i] = 0.5 * (sorted[start[i] - 1] + sorted[start[i]]);

  double h = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    const double count = static_cast<double>(start[i + 1] - start[i]);
    const double width = edge[i + 1] - edge[i];
    if (count == 0.0 || width <= 0.0) continue;  // a tied run collapsed this bin
    const double p = count / static_cast<double>(n);
    h -= p * std::log(p / width);
  }
  return h;
}

double mutual_information(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorKind::DimensionMismatch,
          "mutual_information: length mismatch (" + std::to_string(x.size()) + " vs " +
              std::to_string(y.size()) + ")");
  check_samples(x, "mutual_information");
  check_samples(y, "mutual_information");

  const std::size_t n = x.size();
  const std::size_t bins = mi_bins(n);
  const auto bx = equal_frequency_bins(x, bins);
  const auto by = equal_frequency_bins(y, bins);

  std::vector<std::size_t> joint(bins * bins, 0);
  std::vector<std::size_t> mx(bins, 0);
  std::vector<std::size_t> my(bins, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++joint[bx[i] * bins + by[i]];
    ++mx[bx[i]];
    ++my[by[i]];
  }

  // Each term depends on the cell count and the product of its marginals,
  // both symmetric under swapping x and y. Summing the terms in sorted
  // order makes the total bit-identical either way round.
  std::vector<double> terms;
  terms.reserve(bins * bins);
  const double total = static_cast<double>(n);
  for (std::size_t a = 0; a < bins; ++a) {
    for (std::size_t b = 0; b < bins; ++b) {
      const auto c = joint[a * bins + b];
      if (c == 0) continue;
      const double cd = static_cast<double>(c);
      const double marginal = static_cast<double>(mx[a] * my[b]);
      terms.push_back(cd * std::log(cd * total / marginal));
    }
  }
  std::sort(terms.begin(), terms.end());
  double mi = 0.0;
  for (double t : terms) mi += t;
  mi /= total;
  return std::max(0.0, mi);
}

FeatureRanking rank_features(const data::Dataset& ds, const WarningSink& warn) {
  const auto d = static_cast<std::size_t>(ds.cols());
  const auto& names = ds.feature_names();
  const auto target = as_span(ds.target());
  require(!is_constant(target), ErrorKind::InvalidArgument, "rank_features: target has zero variance");
  std::vector<double> scores(d, 0.0);
  std::vector<std::string> warnings(d);

  parallel_for(d, [&](std::size_t j) {
    const auto col = ds.features().col(static_cast<Index>(j));
    const std::span<const double> x(col.data(), static_cast<std::size_t>(col.size()));
    if (is_constant(x)) {
      warnings[j] = "feature '" + names[j] + "' has zero variance; scored 0";
      return;
    }
    scores[j] = mutual_information(x, target);
  });

  for (const auto& w : warnings) {
    if (w.empty()) continue;
    if (warn)
      warn(w);
    else
      std::clog << "warning: " << w << '\n';
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  FeatureRanking ranking;
  ranking.entries.reserve(d);
  for (auto j : order) ranking.entries.push_back({names[j], scores[j]});
  return ranking;
}

std::vector<std::string> select_top_k(const FeatureRanking& ranking, std::size_t k) {
  require(k >= 1 && k <= ranking.size(), ErrorKind::InvalidArgument,
          "k = " + std::to_string(k) + " outside [1, " + std::to_string(ranking.size()) + "]");
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(ranking.entries[i].feature_name);
  return out;
}

}  // namespace spreadcast::info
