#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace spreadcast {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Copies the listed rows of `x` in the given order.
Matrix take_rows(const Matrix& x, std::span<const Index> rows);
Vector take_rows(const Vector& y, std::span<const Index> rows);

/// Returns true when every entry is finite.
bool all_finite(const Matrix& x);
bool all_finite(const Vector& x);

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

inline Vector to_vector(std::span<const double> values) {
  Vector v(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Index>(i)] = values[i];
  return v;
}

}  // namespace spreadcast
