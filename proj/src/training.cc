#include "rovist/training.h"

#include <cmath>
#include <numeric>

#include "rovist/random.h"

namespace rovist {

void Adam::Update(std::size_t slot, Eigen::Ref<Eigen::MatrixXd> param,
                  const Eigen::Ref<const Eigen::MatrixXd>& grad) {
  if (slot >= first_moment_.size()) {
    first_moment_.resize(slot + 1);
    second_moment_.resize(slot + 1);
  }
  Eigen::MatrixXd& m = first_moment_[slot];
  Eigen::MatrixXd& v = second_moment_[slot];
  if (m.size() == 0) {
    m = Eigen::MatrixXd::Zero(param.rows(), param.cols());
    v = Eigen::MatrixXd::Zero(param.rows(), param.cols());
  }

  Eigen::MatrixXd g = grad;
  if (options_.weight_decay != 0.0) g += options_.weight_decay * param;

  m = options_.beta1 * m + (1.0 - options_.beta1) * g;
  v = options_.beta2 * v + (1.0 - options_.beta2) * g.cwiseProduct(g);

  const double t = static_cast<double>(step_ < 1 ? 1 : step_);
  const double bias1 = 1.0 - std::pow(options_.beta1, t);
  const double bias2 = 1.0 - std::pow(options_.beta2, t);
  const double step_size = options_.learning_rate / bias1;
  const double sqrt_bias2 = std::sqrt(bias2);

  param.array() -= step_size * m.array() / (v.array().sqrt() / sqrt_bias2 + options_.epsilon);
}

bool EarlyStopping::Record(double validation_loss) {
  ++epochs_seen_;
  if (best_epoch_ == 0 || validation_loss < best_loss_) {
    best_loss_ = validation_loss;
    best_epoch_ = epochs_seen_;
    epochs_without_improvement_ = 0;
    return true;
  }
  ++epochs_without_improvement_;
  return false;
}

DataSplit SplitTrainValidation(std::size_t n, double validation_fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  DeterministicRng rng(seed);
  rng.Shuffle(order);

  std::size_t n_val = 0;
  if (n >= 2) {
    n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * validation_fraction));
    if (n_val < 1) n_val = 1;
    if (n_val > n - 1) n_val = n - 1;
  }
  DataSplit split;
  split.train.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
  split.validation.assign(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
  return split;
}

}  // namespace rovist
