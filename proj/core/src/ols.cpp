#include "models.hpp"
#include "spreadcast/error.hpp"

#include <Eigen/Cholesky>

namespace spreadcast::learners::detail {
namespace {

constexpr double kGramJitter = 1e-10;
// Reciprocal condition estimate of the unit-diagonal Gram below which the
// design is treated as rank deficient.
constexpr double kRankTolerance = 1e-13;

class OlsModel final : public Model {
 public:
  OlsModel(Vector coef, double intercept) : coef_(std::move(coef)), intercept_(intercept) {}

  Vector predict(const Matrix& x) const override {
    return (x * coef_).array() + intercept_;
  }

  void save_state(std::ostream& out) const override {
    io::Writer(out).real(intercept_).vector(coef_);
  }

  Vector coef_;
  double intercept_;
};

}  // namespace

ModelPtr fit_ols(const Matrix& x, const Vector& y) {
  const Index n = x.rows();
  const Index d = x.cols();
  Matrix design(n, d + 1);
  design.leftCols(d) = x;
  design.col(d).setOnes();

  Matrix gram = design.transpose() * design;

  // Scale to unit diagonal before judging rank so the test does not depend
  // on the units of the columns.
  const Vector inv_scale = gram.diagonal().cwiseSqrt().cwiseInverse();
  if (!inv_scale.allFinite()) {
    fail(ErrorKind::RankDeficient, "ols: a feature column is identically zero (singular normal equations)");
  }
  const Matrix scaled = inv_scale.asDiagonal() * gram * inv_scale.asDiagonal();
  const Eigen::LDLT<Matrix> check(scaled);
  if (check.info() != Eigen::Success || !(check.rcond() > kRankTolerance)) {
    fail(ErrorKind::RankDeficient, "ols: singular normal equations (design matrix is rank deficient)");
  }

  gram.diagonal().array() += kGramJitter;
  const Eigen::LDLT<Matrix> solver(gram);
  const Vector beta = solver.solve(design.transpose() * y);
  require(beta.allFinite(), ErrorKind::RankDeficient, "ols: normal equations produced non-finite coefficients");
  return std::make_shared<OlsModel>(beta.head(d), beta[d]);
}

ModelPtr load_ols(io::Reader& in) {
  const double intercept = in.real();
  Vector coef = in.vector();
  return std::make_shared<OlsModel>(std::move(coef), intercept);
}

}  // namespace spreadcast::learners::detail
