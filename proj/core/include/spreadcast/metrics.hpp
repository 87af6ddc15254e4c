#pragma once

#include "spreadcast/linalg.hpp"

namespace spreadcast::eval {

struct Metrics {
  double mae = 0.0;
  double mse = 0.0;
  double r2 = 0.0;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// MAE = mean |y - yhat|, MSE = mean (y - yhat)^2,
/// R^2 = 1 - sum (y - yhat)^2 / sum (y - mean(y))^2.
/// Throws on length mismatch, empty input, or constant y (R^2 undefined).
Metrics compute_metrics(const Vector& y, const Vector& yhat);

}  // namespace spreadcast::eval
