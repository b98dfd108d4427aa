#ifndef ARB_NETS_ADAM_HPP
#define ARB_NETS_ADAM_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace arb {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected adaptive-moment optimizer over one flat parameter vector.
template <typename Scalar>
class Adam {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Adam() = default;
  Adam(Eigen::Index size, AdamConfig cfg = {}) : cfg_(cfg), m_(Vector::Zero(size)), v_(Vector::Zero(size)) {}

  void step(Eigen::Ref<Vector> params, const Eigen::Ref<const Vector>& grad) {
    if (params.size() != m_.size() || grad.size() != m_.size()) {
      throw std::invalid_argument("Adam::step: shape mismatch");
    }
    ++t_;
    const auto b1 = static_cast<Scalar>(cfg_.beta1);
    const auto b2 = static_cast<Scalar>(cfg_.beta2);
    m_ = b1 * m_ + (Scalar(1) - b1) * grad;
    v_ = b2 * v_ + (Scalar(1) - b2) * grad.cwiseAbs2();
    const Scalar c1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(t_));
    const Scalar c2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(t_));
    const auto lr = static_cast<Scalar>(cfg_.lr);
    const auto eps = static_cast<Scalar>(cfg_.eps);
    params.array() -= lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps);
  }

  std::int64_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }
  const Vector& first_moment() const { return m_; }
  const Vector& second_moment() const { return v_; }

 private:
  AdamConfig cfg_{};
  Vector m_;
  Vector v_;
  std::int64_t t_ = 0;
};

}  // namespace arb

#endif  // ARB_NETS_ADAM_HPP
