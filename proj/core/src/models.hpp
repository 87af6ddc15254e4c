#pragma once

#include "spreadcast/learners.hpp"
#include "spreadcast/serialize.hpp"

#include <memory>

namespace spreadcast::learners::detail {

using ModelPtr = std::shared_ptr<const Model>;

ModelPtr fit_ols(const Matrix& x, const Vector& y);
ModelPtr load_ols(io::Reader& in);

ModelPtr fit_knn(const KnnParams& params, const Matrix& x, const Vector& y);
ModelPtr load_knn(io::Reader& in);

ModelPtr fit_kernel_ridge(const KernelRidgeParams& params, const Matrix& x, const Vector& y);
ModelPtr load_kernel_ridge(io::Reader& in);

ModelPtr fit_forest(const ForestParams& params, std::uint64_t seed, const Matrix& x, const Vector& y);
ModelPtr load_forest(io::Reader& in);

ModelPtr fit_mlp(const MlpParams& params, std::uint64_t seed, const Matrix& x, const Vector& y);
ModelPtr load_mlp(io::Reader& in);

}  // namespace spreadcast::learners::detail
