#pragma once

#include "spreadcast/linalg.hpp"
#include "spreadcast/random.hpp"

namespace spreadcast::learners {

/// Single-hidden-layer perceptron: relu(x W1^T + b1) w2 + b2.
///
/// Loss is the half mean squared error, L = 1/(2m) sum (yhat - y)^2, so the
/// output-layer error signal is (yhat - y) / m. Parameters can also be
/// addressed through one flat index (W1 column-major, then b1, w2, b2),
/// which is what the finite-difference gradient check walks over.
class MlpNetwork {
 public:
  struct Gradient {
    Matrix w1;
    Vector b1;
    Vector w2;
    double b2 = 0.0;
  };

  /// Symmetric-uniform fan-in scaled initialisation: the hidden layer draws
  /// from +-sqrt(6 / inputs) (relu gain), the output layer from
  /// +-sqrt(3 / hidden); biases start at zero.
  MlpNetwork(Index inputs, Index hidden, Rng& rng);
  MlpNetwork(Matrix w1, Vector b1, Vector w2, double b2);

  Index inputs() const noexcept { return w1_.cols(); }
  Index hidden() const noexcept { return w1_.rows(); }

  Vector forward(const Matrix& x) const;
  double loss(const Matrix& x, const Vector& y) const;
  double loss_and_gradient(const Matrix& x, const Vector& y, Gradient& grad) const;

  /// Plain gradient-descent update.
  void step(const Gradient& grad, double learning_rate);

  Index parameter_count() const noexcept { return w1_.size() + b1_.size() + w2_.size() + 1; }
  double parameter(Index i) const;
  void set_parameter(Index i, double value);
  static double gradient_entry(const Gradient& grad, Index i);

  const Matrix& w1() const noexcept { return w1_; }
  const Vector& b1() const noexcept { return b1_; }
  const Vector& w2() const noexcept { return w2_; }
  double b2() const noexcept { return b2_; }

 private:
  double& slot(Index i);

  Matrix w1_;  // hidden x inputs
  Vector b1_;
  Vector w2_;
  double b2_ = 0.0;
};

}  // namespace spreadcast::learners
