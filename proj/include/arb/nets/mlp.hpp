#ifndef ARB_NETS_MLP_HPP
#define ARB_NETS_MLP_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "arb/core/rng.hpp"

namespace arb {

enum class Activation { ReLU, Tanh };

/// Fully connected network, hidden activations + identity output.
///
/// Parameters live in one flat vector, layer by layer: W_l (out x in,
/// column-major) followed by b_l. Inputs and outputs are column batches.
template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;
  using VectorMap = Eigen::Map<Vector>;
  using ConstVectorMap = Eigen::Map<const Vector>;

  /// Layer activations recorded by a forward pass for backward().
  struct Tape {
    std::vector<Matrix> activations;
  };

  Mlp() = default;

  explicit Mlp(std::vector<Eigen::Index> dims, Activation activation = Activation::ReLU)
      : dims_(std::move(dims)), activation_(activation) {
    if (dims_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output dims");
    Eigen::Index count = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
      if (dims_[l] < 1 || dims_[l + 1] < 1) throw std::invalid_argument("Mlp: layer dims must be >= 1");
      offsets_.push_back(count);
      count += dims_[l] * dims_[l + 1] + dims_[l + 1];
    }
    params_ = Vector::Zero(count);
  }

  /// W, b ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  void init_uniform(Rng& rng) {
    for (std::size_t l = 0; l < num_layers(); ++l) {
      const Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(dims_[l]));
      auto w = weight(l);
      for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = static_cast<Scalar>(rng.uniform(-bound, bound));
      auto b = bias(l);
      for (Eigen::Index k = 0; k < b.size(); ++k) b(k) = static_cast<Scalar>(rng.uniform(-bound, bound));
    }
  }

  std::size_t num_layers() const { return offsets_.size(); }
  Eigen::Index input_dim() const { return dims_.front(); }
  Eigen::Index output_dim() const { return dims_.back(); }
  Eigen::Index parameter_count() const { return params_.size(); }
  const std::vector<Eigen::Index>& dims() const { return dims_; }
  Activation activation() const { return activation_; }

  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }

  MatrixMap weight(std::size_t l) { return MatrixMap(params_.data() + offsets_[l], dims_[l + 1], dims_[l]); }
  ConstMatrixMap weight(std::size_t l) const {
    return ConstMatrixMap(params_.data() + offsets_[l], dims_[l + 1], dims_[l]);
  }
  VectorMap bias(std::size_t l) { return VectorMap(params_.data() + bias_offset(l), dims_[l + 1]); }
  ConstVectorMap bias(std::size_t l) const { return ConstVectorMap(params_.data() + bias_offset(l), dims_[l + 1]); }

  Matrix forward(const Eigen::Ref<const Matrix>& x) const {
    check_input(x);
    Matrix a = x;
    for (std::size_t l = 0; l < num_layers(); ++l) {
      Matrix z = weight(l) * a;
      z.colwise() += bias(l);
      if (l + 1 < num_layers()) activate(z);
      a = std::move(z);
    }
    return a;
  }

  Matrix forward(const Eigen::Ref<const Matrix>& x, Tape& tape) const {
    check_input(x);
    tape.activations.resize(num_layers() + 1);
    tape.activations[0] = x;
    for (std::size_t l = 0; l < num_layers(); ++l) {
      Matrix& z = tape.activations[l + 1];
      z.noalias() = weight(l) * tape.activations[l];
      z.colwise() += bias(l);
      if (l + 1 < num_layers()) activate(z);
    }
    return tape.activations.back();
  }

  /// Reverse pass for the forward call that filled `tape`. Adds dL/dparams
  /// into `grad` and returns dL/dinput.
  Matrix backward(const Tape& tape, const Eigen::Ref<const Matrix>& grad_out, Eigen::Ref<Vector> grad) const {
    if (grad.size() != params_.size()) throw std::invalid_argument("Mlp::backward: gradient size mismatch");
    if (tape.activations.size() != num_layers() + 1) throw std::invalid_argument("Mlp::backward: empty tape");
    Matrix delta = grad_out;
    for (std::size_t l = num_layers(); l-- > 0;) {
      if (l + 1 < num_layers()) apply_derivative(tape.activations[l + 1], delta);
      MatrixMap gw(grad.data() + offsets_[l], dims_[l + 1], dims_[l]);
      VectorMap gb(grad.data() + bias_offset(l), dims_[l + 1]);
      gw.noalias() += delta * tape.activations[l].transpose();
      gb.noalias() += delta.rowwise().sum();
      Matrix next = weight(l).transpose() * delta;
      delta = std::move(next);
    }
    return delta;
  }

 private:
  Eigen::Index bias_offset(std::size_t l) const { return offsets_[l] + dims_[l] * dims_[l + 1]; }

  void check_input(const Eigen::Ref<const Matrix>& x) const {
    if (x.rows() != input_dim()) {
      throw std::invalid_argument("Mlp: input has " + std::to_string(x.rows()) + " rows, expected " +
                                  std::to_string(input_dim()));
    }
  }

  void activate(Matrix& z) const {
    if (activation_ == Activation::ReLU) {
      z = z.cwiseMax(Scalar(0));
    } else {
      z = z.array().tanh().matrix();
    }
  }

  // `out` is the post-activation value, which determines the local slope.
  void apply_derivative(const Matrix& out, Matrix& delta) const {
    if (activation_ == Activation::ReLU) {
      delta = (out.array() > Scalar(0)).select(delta, Scalar(0));
    } else {
      delta.array() *= Scalar(1) - out.array().square();
    }
  }

  std::vector<Eigen::Index> dims_;
  std::vector<Eigen::Index> offsets_;
  Activation activation_ = Activation::ReLU;
  Vector params_;
};

}  // namespace arb

#endif  // ARB_NETS_MLP_HPP
