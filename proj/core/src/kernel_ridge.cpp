#include "models.hpp"
#include "spreadcast/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace spreadcast::learners::detail {
namespace {

// The Gram matrix and dual solve run in extended precision. With a linear
// kernel and a tiny ridge the dual system is nearly singular; in double the
// rounding of K alone moves predictions by ~1e-4.
using Real = long double;
using MatrixL = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VectorL = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

MatrixL cross_kernel(Kernel kernel, Real gamma, const MatrixL& a, const MatrixL& b) {
  MatrixL k = a * b.transpose();
  if (kernel == Kernel::Linear) {
    k.array() += Real(1);
    return k;
  }
  const VectorL na = a.rowwise().squaredNorm();
  const VectorL nb = b.rowwise().squaredNorm();
  for (Index i = 0; i < k.rows(); ++i) {
    for (Index j = 0; j < k.cols(); ++j) {
      const Real sq = std::max(Real(0), na[i] + nb[j] - 2 * k(i, j));
      k(i, j) = std::exp(-gamma * sq);
    }
  }
  return k;
}

class KernelRidgeModel final : public Model {
 public:
  KernelRidgeModel(Kernel kernel, Real gamma, MatrixL support, VectorL alpha)
      : kernel_(kernel), gamma_(gamma), support_(std::move(support)), alpha_(std::move(alpha)) {}

  Vector predict(const Matrix& x) const override {
    const MatrixL k = cross_kernel(kernel_, gamma_, x.cast<Real>(), support_);
    return (k * alpha_).cast<double>();
  }

  void save_state(std::ostream& out) const override {
    io::Writer w(out);
    w.tag(kernel_ == Kernel::Rbf ? "rbf" : "linear").real(gamma_).newline();
    w.integer(support_.rows()).integer(support_.cols()).newline();
    for (Index i = 0; i < support_.rows(); ++i)
      for (Index j = 0; j < support_.cols(); ++j) w.real(static_cast<double>(support_(i, j)));
    w.newline();
    w.integer(alpha_.size());
    for (Index i = 0; i < alpha_.size(); ++i) w.real(alpha_[i]);
    w.newline();
  }

 private:
  Kernel kernel_;
  Real gamma_;
  MatrixL support_;
  VectorL alpha_;
};

}  // namespace

ModelPtr fit_kernel_ridge(const KernelRidgeParams& params, const Matrix& x, const Vector& y) {
  const Real gamma = params.gamma ? Real(*params.gamma) : Real(1) / Real(x.cols());
  MatrixL support = x.cast<Real>();
  MatrixL gram = cross_kernel(params.kernel, gamma, support, support);
  gram.diagonal().array() += Real(params.lambda);
  const Eigen::LDLT<MatrixL> solver(gram);
  require(solver.info() == Eigen::Success, ErrorKind::RankDeficient, "kernel_ridge: dual system is singular");
  VectorL alpha = solver.solve(y.cast<Real>());
  require(alpha.allFinite(), ErrorKind::RankDeficient, "kernel_ridge: dual solve produced non-finite weights");
  return std::make_shared<KernelRidgeModel>(params.kernel, gamma, std::move(support), std::move(alpha));
}

ModelPtr load_kernel_ridge(io::Reader& in) {
  const auto kernel_name = in.token();
  require(kernel_name == "rbf" || kernel_name == "linear", ErrorKind::Format,
          "kernel_ridge artifact: unknown kernel '" + kernel_name + "'");
  const Real gamma = in.long_real();
  const auto rows = in.integer();
  const auto cols = in.integer();
  MatrixL support(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) support(i, j) = in.real();
  const auto n = in.integer();
  require(n == rows, ErrorKind::Format, "kernel_ridge artifact: weight count mismatch");
  VectorL alpha(n);
  for (Index i = 0; i < n; ++i) alpha[i] = in.long_real();
  return std::make_shared<KernelRidgeModel>(kernel_name == "rbf" ? Kernel::Rbf : Kernel::Linear, gamma,
                                            std::move(support), std::move(alpha));
}

}  // namespace spreadcast::learners::detail
