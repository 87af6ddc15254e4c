#include "spreadcast/metrics.hpp"

#include "spreadcast/error.hpp"

#include <cmath>

namespace spreadcast::eval {

Metrics compute_metrics(const Vector& y, const Vector& yhat) {
  require(y.size() == yhat.size(), ErrorKind::DimensionMismatch,
          "metrics: " + std::to_string(y.size()) + " targets vs " + std::to_string(yhat.size()) + " predictions");
  require(y.size() >= 2, ErrorKind::InvalidArgument, "metrics: R^2 needs at least 2 observations");
  const double n = static_cast<double>(y.size());
  const double mean = y.mean();
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  double total = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    const double r = y[i] - yhat[i];
    abs_sum += std::abs(r);
    sq_sum += r * r;
    total += (y[i] - mean) * (y[i] - mean);
  }
  require(total > 0.0, ErrorKind::InvalidArgument, "metrics: R^2 is undefined for a constant target");
  return {abs_sum / n, sq_sum / n, 1.0 - sq_sum / total};
}

}  // namespace spreadcast::eval
