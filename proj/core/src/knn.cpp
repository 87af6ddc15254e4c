#include "models.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace spreadcast::learners::detail {
namespace {

class KnnModel final : public Model {
 public:
  KnnModel(int k, Matrix x, Vector y) : k_(k), x_(std::move(x)), y_(std::move(y)) {}

  Vector predict(const Matrix& q) const override {
    const Index n = x_.rows();
    const auto k = static_cast<std::size_t>(std::min<Index>(k_, n));
    Vector out(q.rows());
    std::vector<std::pair<double, Index>> dist(static_cast<std::size_t>(n));
    for (Index r = 0; r < q.rows(); ++r) {
      for (Index i = 0; i < n; ++i) {
        dist[static_cast<std::size_t>(i)] = {(x_.row(i) - q.row(r)).squaredNorm(), i};
      }
      // Pair ordering breaks distance ties by the lower training index.
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) sum += y_[dist[j].second];
      out[r] = sum / static_cast<double>(k);
    }
    return out;
  }

  void save_state(std::ostream& out) const override {
    io::Writer(out).integer(k_).newline().matrix(x_).vector(y_);
  }

 private:
  int k_;
  Matrix x_;
  Vector y_;
};

}  // namespace

ModelPtr fit_knn(const KnnParams& params, const Matrix& x, const Vector& y) {
  return std::make_shared<KnnModel>(params.k, x, y);
}

ModelPtr load_knn(io::Reader& in) {
  const auto k = static_cast<int>(in.integer());
  Matrix x = in.matrix();
  Vector y = in.vector();
  return std::make_shared<KnnModel>(k, std::move(x), std::move(y));
}

}  // namespace spreadcast::learners::detail
