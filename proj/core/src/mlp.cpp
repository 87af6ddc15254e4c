#include "spreadcast/mlp.hpp"

#include "models.hpp"
#include "spreadcast/error.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace spreadcast::learners {

MlpNetwork::MlpNetwork(Index inputs, Index hidden, Rng& rng)
    : w1_(hidden, inputs), b1_(Vector::Zero(hidden)), w2_(hidden), b2_(0.0) {
  const double hidden_limit = std::sqrt(6.0 / static_cast<double>(inputs));
  const double output_limit = std::sqrt(3.0 / static_cast<double>(hidden));
  for (Index i = 0; i < hidden; ++i)
    for (Index j = 0; j < inputs; ++j) w1_(i, j) = rng.uniform(-hidden_limit, hidden_limit);
  for (Index i = 0; i < hidden; ++i) w2_[i] = rng.uniform(-output_limit, output_limit);
}

MlpNetwork::MlpNetwork(Matrix w1, Vector b1, Vector w2, double b2)
    : w1_(std::move(w1)), b1_(std::move(b1)), w2_(std::move(w2)), b2_(b2) {
  require(b1_.size() == w1_.rows() && w2_.size() == w1_.rows(), ErrorKind::DimensionMismatch,
          "mlp: inconsistent layer sizes");
}

Vector MlpNetwork::forward(const Matrix& x) const {
  Matrix h = x * w1_.transpose();
  h.rowwise() += b1_.transpose();
  h = h.cwiseMax(0.0);
  return (h * w2_).array() + b2_;
}

double MlpNetwork::loss(const Matrix& x, const Vector& y) const {
  const Vector r = forward(x) - y;
  return 0.5 * r.squaredNorm() / static_cast<double>(x.rows());
}

double MlpNetwork::loss_and_gradient(const Matrix& x, const Vector& y, Gradient& grad) const {
  const auto m = static_cast<double>(x.rows());
  Matrix z = x * w1_.transpose();
  z.rowwise() += b1_.transpose();
  const Matrix h = z.cwiseMax(0.0);
  const Vector r = ((h * w2_).array() + b2_).matrix() - y;

  const Vector delta_out = r / m;
  grad.w2.noalias() = h.transpose() * delta_out;
  grad.b2 = delta_out.sum();
  // Relu derivative taken as 0 at exactly 0.
  const Matrix delta_hidden = (delta_out * w2_.transpose()).cwiseProduct((z.array() > 0.0).cast<double>().matrix());
  grad.w1.noalias() = delta_hidden.transpose() * x;
  grad.b1 = delta_hidden.colwise().sum().transpose();
  return 0.5 * r.squaredNorm() / m;
}

void MlpNetwork::step(const Gradient& grad, double learning_rate) {
  w1_.noalias() -= learning_rate * grad.w1;
  b1_.noalias() -= learning_rate * grad.b1;
  w2_.noalias() -= learning_rate * grad.w2;
  b2_ -= learning_rate * grad.b2;
}

double& MlpNetwork::slot(Index i) {
  require(i >= 0 && i < parameter_count(), ErrorKind::InvalidArgument, "mlp: parameter index out of range");
  if (i < w1_.size()) return w1_.data()[i];
  i -= w1_.size();
  if (i < b1_.size()) return b1_[i];
  i -= b1_.size();
  if (i < w2_.size()) return w2_[i];
  return b2_;
}

double MlpNetwork::parameter(Index i) const { return const_cast<MlpNetwork*>(this)->slot(i); }

void MlpNetwork::set_parameter(Index i, double value) { slot(i) = value; }

double MlpNetwork::gradient_entry(const Gradient& grad, Index i) {
  if (i < grad.w1.size()) return grad.w1.data()[i];
  i -= grad.w1.size();
  if (i < grad.b1.size()) return grad.b1[i];
  i -= grad.b1.size();
  if (i < grad.w2.size()) return grad.w2[i];
  return grad.b2;
}

namespace detail {
namespace {

// The target is standardised before training and mapped back at
// prediction time, so the learning rate means the same thing whatever the
// units of the target.
class MlpModel final : public Model {
 public:
  MlpModel(MlpNetwork net, double y_mean, double y_scale)
      : net_(std::move(net)), y_mean_(y_mean), y_scale_(y_scale) {}

  Vector predict(const Matrix& x) const override {
    return (net_.forward(x).array() * y_scale_ + y_mean_).matrix();
  }

  void save_state(std::ostream& out) const override {
    io::Writer w(out);
    w.real(y_mean_).real(y_scale_).real(net_.b2()).newline();
    w.matrix(net_.w1()).vector(net_.b1()).vector(net_.w2());
  }

 private:
  MlpNetwork net_;
  double y_mean_;
  double y_scale_;
};

}  // namespace

ModelPtr fit_mlp(const MlpParams& params, std::uint64_t seed, const Matrix& x, const Vector& y) {
  const Index n = x.rows();
  const double y_mean = y.mean();
  const double sd = std::sqrt((y.array() - y_mean).square().sum() / static_cast<double>(n));
  // A constant target leaves nothing to fit; scale 0 makes the prediction
  // exactly the constant whatever the network outputs.
  const double y_scale = sd > 0.0 ? sd : 0.0;
  const Vector ys = sd > 0.0 ? Vector((y.array() - y_mean) / sd) : Vector::Zero(n);

  Rng rng(seed);
  MlpNetwork net(x.cols(), params.hidden_units, rng);
  MlpNetwork::Gradient grad;

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const auto batch = static_cast<Index>(params.batch_size);
  Matrix xb;
  Vector yb;

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    double epoch_loss = 0.0;
    for (Index start = 0; start < n; start += batch) {
      const Index m = std::min(batch, n - start);
      xb.resize(m, x.cols());
      yb.resize(m);
      for (Index i = 0; i < m; ++i) {
        const Index src = order[static_cast<std::size_t>(start + i)];
        xb.row(i) = x.row(src);
        yb[i] = ys[src];
      }
      epoch_loss += net.loss_and_gradient(xb, yb, grad) * static_cast<double>(m);
      net.step(grad, params.learning_rate);
    }
    if (!std::isfinite(epoch_loss)) {
      fail(ErrorKind::Diverged, "mlp: training loss became non-finite at epoch " + std::to_string(epoch + 1));
    }
  }
  require(net.forward(x).allFinite(), ErrorKind::Diverged, "mlp: trained network produces non-finite output");
  return std::make_shared<MlpModel>(std::move(net), y_mean, y_scale);
}

ModelPtr load_mlp(io::Reader& in) {
  const double y_mean = in.real();
  const double y_scale = in.real();
  const double b2 = in.real();
  Matrix w1 = in.matrix();
  Vector b1 = in.vector();
  Vector w2 = in.vector();
  return std::make_shared<MlpModel>(MlpNetwork(std::move(w1), std::move(b1), std::move(w2), b2), y_mean, y_scale);
}

}  // namespace detail
}  // namespace spreadcast::learners
