#ifndef ARB_ALGO_LOSSES_HPP
#define ARB_ALGO_LOSSES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "arb/nets/mlp.hpp"

namespace arb {

/// |tau - 1{diff < 0}| * diff^2
template <typename Scalar>
Scalar expectile_loss(Scalar diff, Scalar tau) {
  const Scalar w = diff < Scalar(0) ? Scalar(1) - tau : tau;
  return w * diff * diff;
}

/// Mean expectile regression of `targets` onto v(states); gradient added into `grad`.
template <typename Scalar>
Scalar value_loss(const Mlp<Scalar>& v, const Eigen::Ref<const typename Mlp<Scalar>::Matrix>& states,
                  const Eigen::Ref<const typename Mlp<Scalar>::Vector>& targets, Scalar tau,
                  Eigen::Ref<typename Mlp<Scalar>::Vector> grad) {
  using Matrix = typename Mlp<Scalar>::Matrix;
  const Eigen::Index batch = states.cols();
  if (targets.size() != batch) throw std::invalid_argument("value_loss: target size mismatch");
  typename Mlp<Scalar>::Tape tape;
  const Matrix pred = v.forward(states, tape);
  const Scalar inv_b = Scalar(1) / static_cast<Scalar>(batch);
  Matrix dpred(1, batch);
  Scalar loss = 0;
  for (Eigen::Index i = 0; i < batch; ++i) {
    const Scalar diff = targets(i) - pred(0, i);
    const Scalar w = diff < Scalar(0) ? Scalar(1) - tau : tau;
    loss += w * diff * diff;
    dpred(0, i) = Scalar(-2) * w * diff * inv_b;
  }
  v.backward(tape, dpred, grad);
  return loss * inv_b;
}

/// Mean squared TD error of q(inputs) against fixed `targets`; gradient added into `grad`.
template <typename Scalar>
Scalar q_loss(const Mlp<Scalar>& q, const Eigen::Ref<const typename Mlp<Scalar>::Matrix>& inputs,
              const Eigen::Ref<const typename Mlp<Scalar>::Vector>& targets,
              Eigen::Ref<typename Mlp<Scalar>::Vector> grad) {
  using Matrix = typename Mlp<Scalar>::Matrix;
  const Eigen::Index batch = inputs.cols();
  if (targets.size() != batch) throw std::invalid_argument("q_loss: target size mismatch");
  typename Mlp<Scalar>::Tape tape;
  const Matrix pred = q.forward(inputs, tape);
  const Matrix err = pred - targets.transpose();
  const Scalar inv_b = Scalar(1) / static_cast<Scalar>(batch);
  q.backward(tape, Scalar(2) * inv_b * err, grad);
  return err.squaredNorm() * inv_b;
}

/// exp(min(beta * advantage, max_exponent)) per sample.
template <typename Scalar>
typename Mlp<Scalar>::Vector advantage_weights(const Eigen::Ref<const typename Mlp<Scalar>::Vector>& advantages,
                                               Scalar beta, Scalar max_exponent) {
  return (beta * advantages).array().min(max_exponent).exp().matrix();
}

}  // namespace arb

#endif  // ARB_ALGO_LOSSES_HPP
