#include "models.hpp"
#include "spreadcast/error.hpp"
#include "spreadcast/parallel.hpp"
#include "spreadcast/random.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace spreadcast::learners::detail {
namespace {

struct Node {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

using Tree = std::vector<Node>;

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // sum_l^2/n_l + sum_r^2/n_r; larger means lower child SSE
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const Vector& y, int max_features, int min_leaf, int max_depth, Rng& rng)
      : x_(x), y_(y), max_features_(max_features), min_leaf_(min_leaf), max_depth_(max_depth), rng_(rng) {
    features_.resize(static_cast<std::size_t>(x.cols()));
    std::iota(features_.begin(), features_.end(), 0);
  }

  Tree build(std::vector<Index> rows) {
    tree_.clear();
    grow(rows, 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<Index>& rows, int depth) {
    const int id = static_cast<int>(tree_.size());
    tree_.emplace_back();

    double sum = 0.0;
    for (auto r : rows) sum += y_[r];
    tree_[static_cast<std::size_t>(id)].value = sum / static_cast<double>(rows.size());

    const bool depth_left = max_depth_ == 0 || depth < max_depth_;
    if (!depth_left || static_cast<int>(rows.size()) < 2 * min_leaf_ || is_pure(rows)) return id;

    const auto split = best_split(rows);
    if (split.feature < 0) return id;

    std::vector<Index> left;
    std::vector<Index> right;
    for (auto r : rows) (x_(r, split.feature) <= split.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const int l = grow(left, depth + 1);
    const int rgt = grow(right, depth + 1);
    auto& node = tree_[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = rgt;
    return id;
  }

  bool is_pure(const std::vector<Index>& rows) const {
    const double first = y_[rows.front()];
    return std::all_of(rows.begin(), rows.end(), [&](Index r) { return y_[r] == first; });
  }

  // Features are visited in a fresh random order. The first max_features
  // are always scored; if none of them admits a split (all constant in this
  // node) the scan continues through the remaining features until one does.
  Split best_split(const std::vector<Index>& rows) {
    rng_.shuffle(features_.begin(), features_.end());
    Split best;
    int scored = 0;
    for (int f : features_) {
      if (scored >= max_features_ && best.feature >= 0) break;
      ++scored;
      scan_feature(rows, f, best);
    }
    return best;
  }

  void scan_feature(const std::vector<Index>& rows, int f, Split& best) {
    buffer_.clear();
    for (auto r : rows) buffer_.emplace_back(x_(r, f), y_[r]);
    std::sort(buffer_.begin(), buffer_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (buffer_.front().first == buffer_.back().first) return;

    const std::size_t n = buffer_.size();
    const auto min_leaf = static_cast<std::size_t>(min_leaf_);
    double total = 0.0;
    for (const auto& p : buffer_) total += p.second;
    double left_sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left_sum += buffer_[i].second;
      const std::size_t nl = i + 1;
      if (buffer_[i].first == buffer_[i + 1].first) continue;
      if (nl < min_leaf || n - nl < min_leaf) continue;
      const double right_sum = total - left_sum;
      const double score = left_sum * left_sum / static_cast<double>(nl) +
                           right_sum * right_sum / static_cast<double>(n - nl);
      if (best.feature < 0 || score > best.score) {
        const double lo = buffer_[i].first;
        const double hi = buffer_[i + 1].first;
        double mid = lo + 0.5 * (hi - lo);
        if (!(mid < hi)) mid = lo;
        best = {f, mid, score};
      }
    }
  }

  const Matrix& x_;
  const Vector& y_;
  int max_features_;
  int min_leaf_;
  int max_depth_;
  Rng& rng_;
  std::vector<int> features_;
  std::vector<std::pair<double, double>> buffer_;
  Tree tree_;
};

double tree_predict(const Tree& tree, const Matrix& x, Index row) {
  int id = 0;
  while (true) {
    const auto& node = tree[static_cast<std::size_t>(id)];
    if (node.feature < 0) return node.value;
    id = x(row, node.feature) <= node.threshold ? node.left : node.right;
  }
}

class ForestModel final : public Model {
 public:
  explicit ForestModel(std::vector<Tree> trees) : trees_(std::move(trees)) {}

  Vector predict(const Matrix& x) const override {
    Vector out = Vector::Zero(x.rows());
    for (Index r = 0; r < x.rows(); ++r) {
      double sum = 0.0;
      for (const auto& tree : trees_) sum += tree_predict(tree, x, r);  // tree-index order
      out[r] = sum / static_cast<double>(trees_.size());
    }
    return out;
  }

  void save_state(std::ostream& out) const override {
    io::Writer w(out);
    w.integer(static_cast<std::int64_t>(trees_.size())).newline();
    for (const auto& tree : trees_) {
      w.integer(static_cast<std::int64_t>(tree.size())).newline();
      for (const auto& node : tree) {
        w.integer(node.feature).real(node.threshold).integer(node.left).integer(node.right).real(node.value);
        w.newline();
      }
    }
  }

 private:
  std::vector<Tree> trees_;
};

}  // namespace

ModelPtr fit_forest(const ForestParams& params, std::uint64_t seed, const Matrix& x, const Vector& y) {
  const Index n = x.rows();
  const auto d = static_cast<int>(x.cols());
  const int max_features = std::min(d, params.max_features.value_or(std::max(1, d / 3)));

  std::vector<Tree> trees(static_cast<std::size_t>(params.trees));
  parallel_for(trees.size(), [&](std::size_t t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<Index> rows(static_cast<std::size_t>(n));
    if (params.bootstrap) {
      for (auto& r : rows) r = static_cast<Index>(rng.index(static_cast<std::uint64_t>(n)));
      std::sort(rows.begin(), rows.end());
    } else {
      std::iota(rows.begin(), rows.end(), Index{0});
    }
    TreeBuilder builder(x, y, max_features, params.min_leaf, params.max_depth, rng);
    trees[t] = builder.build(std::move(rows));
  });
  return std::make_shared<ForestModel>(std::move(trees));
}

ModelPtr load_forest(io::Reader& in) {
  const auto count = in.integer();
  require(count >= 1, ErrorKind::Format, "forest artifact: no trees");
  std::vector<Tree> trees(static_cast<std::size_t>(count));
  for (auto& tree : trees) {
    const auto nodes = in.integer();
    require(nodes >= 1, ErrorKind::Format, "forest artifact: empty tree");
    tree.resize(static_cast<std::size_t>(nodes));
    for (auto& node : tree) {
      node.feature = static_cast<int>(in.integer());
      node.threshold = in.real();
      node.left = static_cast<int>(in.integer());
      node.right = static_cast<int>(in.integer());
      node.value = in.real();
      if (node.feature >= 0) {
        require(node.left > 0 && node.left < nodes && node.right > 0 && node.right < nodes, ErrorKind::Format,
                "forest artifact: child index out of range");
      }
    }
  }
  return std::make_shared<ForestModel>(std::move(trees));
}

}  // namespace spreadcast::learners::detail
