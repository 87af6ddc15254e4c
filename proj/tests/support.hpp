#pragma once

#include "spreadcast/data.hpp"
#include "spreadcast/linalg.hpp"
#include "spreadcast/random.hpp"

#include <Eigen/SVD>

#include <filesystem>
#include <string>
#include <vector>

namespace spreadcast::support {

inline Matrix random_matrix(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline Vector random_vector(Rng& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

/// Least squares with intercept through the SVD pseudo-inverse. Written
/// independently of the library's normal-equation solver.
inline Vector pinv_ols_predict(const Matrix& x, const Vector& y, const Matrix& query) {
  Matrix a(x.rows(), x.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(x.cols()) = x;
  const Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector s = svd.singularValues();
  const double tol = s[0] * 1e-12 * static_cast<double>(std::max(a.rows(), a.cols()));
  Vector inv_s = Vector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i)
    if (s[i] > tol) inv_s[i] = 1.0 / s[i];
  const Vector beta = svd.matrixV() * inv_s.asDiagonal() * svd.matrixU().transpose() * y;
  Matrix q(query.rows(), query.cols() + 1);
  q.col(0).setOnes();
  q.rightCols(query.cols()) = query;
  return q * beta;
}

/// Monthly dataset with `d` standard-normal features and the given target.
inline data::Dataset make_dataset(const Matrix& x, const Vector& y, data::YearMonth start = {2008, 1}) {
  std::vector<data::YearMonth> dates;
  std::vector<std::string> names;
  for (Index t = 0; t < x.rows(); ++t) dates.push_back(start.plus_months(t));
  for (Index j = 0; j < x.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  return data::Dataset(std::move(dates), x, std::move(names), y, "SPREAD");
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("spreadcast_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace spreadcast::support
