#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rovist/corpus.h"
#include "rovist/training.h"

namespace rovist {

inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";

// "[CLS] prev [SEP] next [SEP]" over Tokenize() tokens. When the sequence is
// longer than max_length, tokens are dropped from the end of the currently
// longer sentence (the second one on ties) until it fits; each sentence
// keeps at least one token. Throws InputError for an empty sentence and
// ConfigError when max_length < 5.
std::vector<std::string> FormatPair(std::string_view prev, std::string_view next,
                                    std::size_t max_length);

// Language-model backend: pooled vector of a formatted pair.
class PairEncoder {
 public:
  virtual ~PairEncoder() = default;
  // Identifier stored in model artifacts; MakePairEncoder() inverts it.
  virtual std::string id() const = 0;
  virtual std::size_t pooled_dim() const = 0;
  virtual std::size_t max_length() const = 0;
  // Throws BackendError on failure.
  virtual Eigen::VectorXd Pool(const std::vector<std::string>& formatted) const = 0;
};

// Stub backend. Every non-special token is hashed together with the index of
// the segment it sits in ("A:" before the first [SEP], "B:" after), into a
// signed bucket of a pooled_dim vector; the sum is scaled by 1/sqrt(count).
// Word order across the two sentences therefore changes the vector, which
// is what an order classifier needs. Weight-free and frozen.
class HashedPairEncoder : public PairEncoder {
 public:
  explicit HashedPairEncoder(std::size_t pooled_dim = 256, std::size_t max_length = 128);

  std::string id() const override;
  std::size_t pooled_dim() const override { return pooled_dim_; }
  std::size_t max_length() const override { return max_length_; }
  Eigen::VectorXd Pool(const std::vector<std::string>& formatted) const override;

 private:
  std::size_t pooled_dim_;
  std::size_t max_length_;
};

// Rebuilds a backend from its id. Throws BackendError for backends this
// build cannot instantiate.
std::shared_ptr<const PairEncoder> MakePairEncoder(const std::string& id);

// Linear two-way classification head; class 0 is "in order".
struct SopHeadParams {
  Eigen::MatrixXd weight;  // 2 x pooled_dim
  Eigen::Vector2d bias = Eigen::Vector2d::Zero();
};

struct CoherenceModel {
  std::shared_ptr<const PairEncoder> backend;
  SopHeadParams head;

  std::size_t pooled_dim() const { return backend ? backend->pooled_dim() : 0; }
  void Validate() const;  // throws DimensionError / ConfigError

  // JSON artifact: format tag, version, backend id, backend weights
  // reference, pooled dim, max length, head weight and bias.
  void Save(const std::filesystem::path& path) const;
  static CoherenceModel Load(const std::filesystem::path& path);
};

struct PairProbability {
  double p_hat = 0.0;  // probability that the second sentence follows the first
  std::size_t pair_index = 0;
};

// Softmax over the head's two logits; component 0 is the in-order class.
Eigen::Vector2d SopClassProbabilities(const CoherenceModel& model, std::string_view prev,
                                      std::string_view next);
PairProbability SopPredict(const CoherenceModel& model, std::string_view prev,
                           std::string_view next, std::size_t pair_index = 0);

inline constexpr double kProbabilityClamp = 1e-7;

// -y ln p - (1 - y) ln(1 - p) with p clamped to [1e-7, 1 - 1e-7].
double BceLoss(double p_hat, int label);
// d BceLoss / d p_hat inside the clamp range.
double BceLossDerivative(double p_hat, int label);

// Defaults: Adam with 1e-5 weight decay, learning rate 1e-5 shrinking 5% per
// epoch, batches of 32, 85/15 split, early stopping after 5 epochs without
// validation improvement.
struct CoherenceTrainConfig {
  double learning_rate = 1e-5;
  double weight_decay = 1e-5;
  double lr_decay = 0.05;
  std::size_t batch_size = 32;
  int patience = 5;
  int max_epochs = 30;
  double validation_fraction = 0.15;
  std::uint64_t seed = 0;

  void Validate() const;  // throws ConfigError
};

struct CoherenceTrainResult {
  CoherenceModel model;  // head of the best validation epoch
  TrainingHistory history;
  double validation_accuracy = 0.0;  // of the returned model
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> validation_indices;
};

// Fits the classification head on SOP examples by minimizing the mean
// binary cross-entropy of the in-order probability. The backend is used
// frozen, so pooled vectors are computed once up front.
CoherenceTrainResult TrainCoherence(const std::vector<SopExample>& dataset,
                                    std::shared_ptr<const PairEncoder> backend,
                                    const CoherenceTrainConfig& config);

// Fraction of examples whose predicted label (p_hat > 0.5) matches.
double SopAccuracy(const CoherenceModel& model, const std::vector<SopExample>& examples);

struct CoherenceScore {
  double score = 1.0;
  std::vector<PairProbability> pairs;
  bool degenerate = false;  // fewer than two sentences; score fixed at 1
};

using PairProbabilityFn = std::function<double(std::string_view, std::string_view)>;

// Mean in-order probability over the story's adjacent sentence pairs.
CoherenceScore ScoreCoherence(const Story& story, const PairProbabilityFn& pair_probability);
CoherenceScore ScoreCoherence(const Story& story, const CoherenceModel& model);

}  // namespace rovist
