#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rovist/corpus.h"
#include "rovist/training.h"
#include "rovist/vg.h"

namespace rovist {

// Defaults: Adam with 1e-5 weight decay, learning rate 5e-5 shrinking 5% per
// epoch, batches of 64, 85/15 train/validation split, early stopping after 3
// epochs without validation improvement. Embeddings are not normalized.
struct VgTrainConfig {
  double learning_rate = 5e-5;
  double weight_decay = 1e-5;
  double lr_decay = 0.05;  // lr *= (1 - lr_decay) after every epoch
  std::size_t batch_size = 64;
  int patience = 3;
  int max_epochs = 30;
  double validation_fraction = 0.15;
  std::size_t embed_dim = kJointEmbeddingDim;
  std::uint64_t seed = 0;

  void Validate() const;  // throws ConfigError
};

struct VgTrainResult {
  VgEncoderParams params;  // parameters of the best validation epoch
  TrainingHistory history;
  std::size_t skipped_out_of_vocabulary = 0;
  std::vector<std::size_t> train_indices;       // rows of the feature matrices
  std::vector<std::size_t> validation_indices;
};

// Trains on precomputed inputs: row k of `region_features` (n x F) is the
// image side of pair k and row k of `word_features` (n x W) its averaged
// word vector. Throws ConfigError for an empty set or bad config and
// NumericError (with epoch and batch) on a non-finite loss.
VgTrainResult TrainVgOnFeatures(const Eigen::MatrixXd& region_features,
                                const Eigen::MatrixXd& word_features,
                                const VgTrainConfig& config);

// Resolves features for every pair (crop payloads go through `vision`),
// drops pairs whose entity has no word vector, then trains.
VgTrainResult TrainVg(const std::vector<EntityRegionPair>& pairs, const WordVectors& words,
                      const VisionBackend* vision, const VgTrainConfig& config);

}  // namespace rovist
