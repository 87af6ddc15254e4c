#include "spreadcast/preprocess.hpp"

#include "spreadcast/error.hpp"
#include "spreadcast/parallel.hpp"
#include "spreadcast/serialize.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <istream>
#include <ostream>

namespace spreadcast::preprocess {

std::vector<double> rolling_average_feature(std::span<const double> target, int window) {
  require(window >= 1, ErrorKind::InvalidArgument, "rolling average window must be >= 1");
  require(static_cast<std::size_t>(window) < target.size(), ErrorKind::InvalidArgument,
          "rolling average window " + std::to_string(window) + " needs more than " + std::to_string(window) +
              " observations, got " + std::to_string(target.size()));
  const auto w = static_cast<std::size_t>(window);
  std::vector<double> out(target.size(), data::kMissing);
  for (std::size_t t = w; t < target.size(); ++t) {
    double sum = 0.0;
    for (std::size_t i = t - w; i < t; ++i) sum += target[i];
    out[t] = sum / static_cast<double>(w);
  }
  return out;
}

std::string rolling_feature_name(const std::string& target_name) { return "avg_" + target_name; }

data::Dataset add_rolling_average(const data::Dataset& ds, int window) {
  const auto avg = rolling_average_feature(as_span(ds.target()), window);
  const Index n = ds.rows();
  const Index w = window;
  Matrix x(n - w, ds.cols() + 1);
  x.leftCols(ds.cols()) = ds.features().bottomRows(n - w);
  for (Index i = w; i < n; ++i) x(i - w, ds.cols()) = avg[static_cast<std::size_t>(i)];
  auto names = ds.feature_names();
  names.push_back(rolling_feature_name(ds.target_name()));
  return data::Dataset({ds.dates().begin() + w, ds.dates().end()}, std::move(x), std::move(names),
                       ds.target().tail(n - w), ds.target_name());
}

// Standardizer --------------------------------------------------------------

Standardizer Standardizer::fit(const Matrix& x) {
  require(x.rows() >= 1, ErrorKind::InvalidArgument, "standardizer needs at least one row");
  Standardizer s;
  s.means = x.colwise().mean().transpose();
  s.scales.resize(x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.means[j]).square().sum() / static_cast<double>(x.rows());
    const double sd = std::sqrt(var);
    s.scales[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  require(x.cols() == means.size(), ErrorKind::DimensionMismatch, "standardizer: column count mismatch");
  return (x.rowwise() - means.transpose()).array().rowwise() / scales.transpose().array();
}

TargetScaler TargetScaler::fit(const Vector& y) {
  require(y.size() >= 1, ErrorKind::InvalidArgument, "target scaler needs at least one value");
  TargetScaler s;
  s.mean = y.mean();
  const double sd = std::sqrt((y.array() - s.mean).square().sum() / static_cast<double>(y.size()));
  s.scale = sd > 0.0 ? sd : 1.0;
  return s;
}

// Whitening -----------------------------------------------------------------

WhiteningTransform fit_whitening(const Matrix& x, double epsilon) {
  require(x.rows() >= 2, ErrorKind::InvalidArgument, "whitening needs at least 2 rows");
  require(x.allFinite(), ErrorKind::InvalidArgument, "whitening: non-finite input");
  require(epsilon >= 0.0, ErrorKind::InvalidArgument, "whitening: epsilon must be non-negative");

  WhiteningTransform t;
  t.epsilon = epsilon;
  t.means = x.colwise().mean().transpose();
  const Matrix centered = x.rowwise() - t.means.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);

  const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  require(eig.info() == Eigen::Success, ErrorKind::InvalidArgument, "whitening: eigendecomposition failed");

  // Eigen returns ascending eigenvalues; keep the large ones, largest first.
  const Index d = x.cols();
  std::vector<Index> kept;
  for (Index i = d - 1; i >= 0; --i)
    if (eig.eigenvalues()[i] >= kEigenvalueFloor) kept.push_back(i);

  const auto r = static_cast<Index>(kept.size());
  t.basis.resize(d, r);
  t.scales.resize(r);
  t.eigenvalues.resize(r);
  for (Index c = 0; c < r; ++c) {
    Vector v = eig.eigenvectors().col(kept[static_cast<std::size_t>(c)]);
    Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    if (v[pivot] < 0.0) v = -v;  // fixed sign convention
    const double lambda = eig.eigenvalues()[kept[static_cast<std::size_t>(c)]];
    t.basis.col(c) = v;
    t.eigenvalues[c] = lambda;
    t.scales[c] = 1.0 / std::sqrt(lambda + epsilon);
  }
  return t;
}

Matrix apply_whitening(const WhiteningTransform& t, const Matrix& x) {
  require(x.cols() == t.input_dim(), ErrorKind::DimensionMismatch,
          "whitening: expected " + std::to_string(t.input_dim()) + " columns, got " + std::to_string(x.cols()));
  return ((x.rowwise() - t.means.transpose()) * t.basis) * t.scales.asDiagonal();
}

// FeatureTransform ----------------------------------------------------------

FeatureTransform FeatureTransform::fit(const Matrix& x, bool whiten, double epsilon) {
  FeatureTransform t;
  t.standardizer_ = Standardizer::fit(x);
  t.whiten_ = whiten;
  if (whiten) {
    t.whitening_ = fit_whitening(t.standardizer_.apply(x), epsilon);
    require(t.whitening_.rank() >= 1, ErrorKind::RankDeficient, "whitening: every feature has zero variance");
  }
  return t;
}

Matrix FeatureTransform::apply(const Matrix& x) const {
  Matrix z = standardizer_.apply(x);
  return whiten_ ? apply_whitening(whitening_, z) : z;
}

Index FeatureTransform::output_dim() const noexcept { return whiten_ ? whitening_.rank() : input_dim(); }

void FeatureTransform::save(std::ostream& out) const {
  io::Writer w(out);
  w.tag("feature-transform").integer(whiten_ ? 1 : 0).newline();
  w.vector(standardizer_.means).vector(standardizer_.scales);
  if (whiten_) {
    w.real(whitening_.epsilon).newline();
    w.vector(whitening_.means).matrix(whitening_.basis).vector(whitening_.scales).vector(whitening_.eigenvalues);
  }
}

FeatureTransform FeatureTransform::load(std::istream& in) {
  io::Reader r(in);
  r.expect("feature-transform");
  FeatureTransform t;
  t.whiten_ = r.integer() != 0;
  t.standardizer_.means = r.vector();
  t.standardizer_.scales = r.vector();
  if (t.whiten_) {
    t.whitening_.epsilon = r.real();
    t.whitening_.means = r.vector();
    t.whitening_.basis = r.matrix();
    t.whitening_.scales = r.vector();
    t.whitening_.eigenvalues = r.vector();
    require(t.whitening_.basis.rows() == t.standardizer_.means.size() &&
                t.whitening_.scales.size() == t.whitening_.basis.cols(),
            ErrorKind::Format, "feature transform artifact: inconsistent dimensions");
  }
  return t;
}

// Window search ---------------------------------------------------------------

double window_validation_mse(const data::Dataset& ds, int window, const WindowSearch& search) {
  const Index skip = search.max_window;
  const Index n = ds.rows();
  const Index m = n - skip;
  const auto avg = rolling_average_feature(as_span(ds.target()), window);

  Matrix x(m, ds.cols() + 1);
  x.leftCols(ds.cols()) = ds.features().bottomRows(m);
  for (Index i = 0; i < m; ++i) x(i, ds.cols()) = avg[static_cast<std::size_t>(i + skip)];
  const Vector y = ds.target().tail(m);

  const auto fit_rows = std::clamp<Index>(
      static_cast<Index>(std::floor((1.0 - search.validation_fraction) * static_cast<double>(m) + 1e-9)), 2, m - 1);
  const Index val_rows = m - fit_rows;

  const auto transform = FeatureTransform::fit(x.topRows(fit_rows), search.whiten, search.epsilon);
  const auto scaler = TargetScaler::fit(y.head(fit_rows));
  const auto model = learners::fit(search.learner, transform.apply(x.topRows(fit_rows)), scaler.forward(y.head(fit_rows)));
  const Vector pred = scaler.inverse(model.predict(transform.apply(x.bottomRows(val_rows))));
  return (pred - y.tail(val_rows)).squaredNorm() / static_cast<double>(val_rows);
}

WindowChoice choose_window(const data::Dataset& ds, const WindowSearch& search) {
  require(search.min_window >= 1 && search.min_window <= search.max_window, ErrorKind::InvalidArgument,
          "window search range is empty");
  require(search.validation_fraction > 0.0 && search.validation_fraction < 1.0, ErrorKind::InvalidArgument,
          "validation fraction must lie in (0, 1)");
  require(ds.rows() - search.max_window >= kMinWindowSearchRows, ErrorKind::InvalidArgument,
          "window search needs at least " + std::to_string(kMinWindowSearchRows) + " rows beyond the largest window (" +
              std::to_string(search.max_window) + "), dataset has " + std::to_string(ds.rows()));

  const auto count = static_cast<std::size_t>(search.max_window - search.min_window + 1);
  WindowChoice choice;
  choice.sweep_mse.assign(count, 0.0);
  parallel_for(count, [&](std::size_t i) {
    choice.sweep_mse[i] = window_validation_mse(ds, search.min_window + static_cast<int>(i), search);
  });

  // A later window must beat the incumbent by more than rounding noise.
  std::size_t best = 0;
  for (std::size_t i = 1; i < count; ++i) {
    const double incumbent = choice.sweep_mse[best];
    if (choice.sweep_mse[i] < incumbent - 1e-12 * std::max(1.0, std::abs(incumbent))) best = i;
  }
  choice.window_months = search.min_window + static_cast<int>(best);
  choice.validation_mse = choice.sweep_mse[best];
  require(std::isfinite(choice.validation_mse), ErrorKind::Diverged, "window search produced a non-finite MSE");
  return choice;
}

}  // namespace spreadcast::preprocess
