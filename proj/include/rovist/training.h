#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace rovist {

// Adam with coupled L2 weight decay: the decay term is added to the gradient
// before the moment updates, as torch.optim.Adam does.
struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

class Adam {
 public:
  explicit Adam(AdamOptions options) : options_(options) {}

  double learning_rate() const { return options_.learning_rate; }
  void set_learning_rate(double lr) { options_.learning_rate = lr; }

  // Advances the step counter. Call once per batch before Update().
  void BeginStep() { ++step_; }

  // Updates one parameter block. `slot` identifies the block's moment state
  // and must be used consistently across steps.
  void Update(std::size_t slot, Eigen::Ref<Eigen::MatrixXd> param,
              const Eigen::Ref<const Eigen::MatrixXd>& grad);

 private:
  AdamOptions options_;
  long step_ = 0;
  std::vector<Eigen::MatrixXd> first_moment_;
  std::vector<Eigen::MatrixXd> second_moment_;
};

// Patience-based early stopping on a validation loss sequence.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience) : patience_(patience) {}

  // Records the loss of the next epoch. Returns true when it is a new best
  // (strictly lower than every earlier loss).
  bool Record(double validation_loss);

  bool ShouldStop() const { return epochs_without_improvement_ >= patience_; }
  int best_epoch() const { return best_epoch_; }  // 1-based, 0 before any record
  double best_loss() const { return best_loss_; }
  int epochs_seen() const { return epochs_seen_; }

 private:
  int patience_;
  int epochs_seen_ = 0;
  int best_epoch_ = 0;
  int epochs_without_improvement_ = 0;
  double best_loss_ = 0.0;
};

struct DataSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Deterministic shuffled split of [0, n). The validation part holds
// round(n * validation_fraction) items, at least one when n >= 2 and never
// all of them. With n == 1 the validation part is empty.
DataSplit SplitTrainValidation(std::size_t n, double validation_fraction, std::uint64_t seed);

// Per-epoch record of a training run.
struct TrainingHistory {
  double initial_train_loss = 0.0;
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  int best_epoch = 0;
  bool stopped_early = false;
};

}  // namespace rovist
