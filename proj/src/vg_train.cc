#include "rovist/vg_train.h"

#include <cmath>
#include <numeric>
#include <string>

#include "rovist/errors.h"
#include "rovist/random.h"

namespace rovist {
namespace {

Eigen::MatrixXd GatherRows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows,
                           std::size_t begin, std::size_t end) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(end - begin), m.cols());
  for (std::size_t i = begin; i < end; ++i) {
    out.row(static_cast<Eigen::Index>(i - begin)) = m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

// Mean batch loss over `rows` in fixed order.
double EvaluateLoss(const VgEncoderParams& params, const Eigen::MatrixXd& regions,
                    const Eigen::MatrixXd& words, const std::vector<std::size_t>& rows,
                    std::size_t batch_size) {
  double total = 0.0;
  std::size_t batches = 0;
  for (std::size_t b = 0; b < rows.size(); b += batch_size) {
    const std::size_t e = std::min(rows.size(), b + batch_size);
    total += VgBatchLoss(params, GatherRows(regions, rows, b, e), GatherRows(words, rows, b, e));
    ++batches;
  }
  return batches ? total / static_cast<double>(batches) : 0.0;
}

}  // namespace

void VgTrainConfig::Validate() const {
  if (batch_size == 0) throw ConfigError("batch size must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (weight_decay < 0.0) throw ConfigError("weight decay must be non-negative");
  if (lr_decay < 0.0 || lr_decay >= 1.0) throw ConfigError("lr decay must lie in [0, 1)");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (max_epochs < 1) throw ConfigError("max epochs must be at least 1");
  if (validation_fraction < 0.0 || validation_fraction >= 1.0) {
    throw ConfigError("validation fraction must lie in [0, 1)");
  }
  if (embed_dim == 0) throw ConfigError("embedding dimension must be at least 1");
}

VgTrainResult TrainVgOnFeatures(const Eigen::MatrixXd& region_features,
                                const Eigen::MatrixXd& word_features,
                                const VgTrainConfig& config) {
  config.Validate();
  if (region_features.rows() == 0) throw ConfigError("no training pairs");
  if (region_features.rows() != word_features.rows()) {
    throw DimensionError("region and word feature matrices have different row counts");
  }
  const auto n = static_cast<std::size_t>(region_features.rows());

  VgTrainResult result;
  result.params =
      VgEncoderParams::Initialize(static_cast<std::size_t>(region_features.cols()),
                                  static_cast<std::size_t>(word_features.cols()),
                                  config.embed_dim, config.seed);
  DataSplit split = SplitTrainValidation(n, config.validation_fraction, config.seed);
  result.train_indices = split.train;
  result.validation_indices = split.validation;
  const std::vector<std::size_t>& monitor =
      split.validation.empty() ? split.train : split.validation;

  VgEncoderParams params = result.params;
  Adam adam({.learning_rate = config.learning_rate, .weight_decay = config.weight_decay});
  EarlyStopping stopper(config.patience);
  DeterministicRng rng(SplitMix64(config.seed));

  result.history.initial_train_loss =
      EvaluateLoss(params, region_features, word_features, split.train, config.batch_size);

  std::vector<std::size_t> order = split.train;
  VgGradients grads;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.Shuffle(order);
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t e = std::min(order.size(), b + config.batch_size);
      const double loss = VgBatchLoss(params, GatherRows(region_features, order, b, e),
                                      GatherRows(word_features, order, b, e), &grads);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite grounding loss at epoch " + std::to_string(epoch) +
                           ", batch starting at " + std::to_string(b) + " (lr " +
                           std::to_string(adam.learning_rate()) + ")");
      }
      adam.BeginStep();
      adam.Update(0, params.image_weight, grads.image_weight);
      adam.Update(1, params.image_bias, grads.image_bias);
      adam.Update(2, params.text_weight, grads.text_weight);
      adam.Update(3, params.text_bias, grads.text_bias);
    }
    adam.set_learning_rate(adam.learning_rate() * (1.0 - config.lr_decay));

    const double train_loss =
        EvaluateLoss(params, region_features, word_features, split.train, config.batch_size);
    const double val_loss =
        EvaluateLoss(params, region_features, word_features, monitor, config.batch_size);
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
      throw NumericError("non-finite grounding loss after epoch " + std::to_string(epoch));
    }
    result.history.train_loss.push_back(train_loss);
    result.history.validation_loss.push_back(val_loss);
    if (stopper.Record(val_loss)) result.params = params;
    if (stopper.ShouldStop()) {
      result.history.stopped_early = epoch < config.max_epochs;
      break;
    }
  }
  result.history.best_epoch = stopper.best_epoch();
  return result;
}

VgTrainResult TrainVg(const std::vector<EntityRegionPair>& pairs, const WordVectors& words,
                      const VisionBackend* vision, const VgTrainConfig& config) {
  config.Validate();
  if (pairs.empty()) throw ConfigError("no entity-region pairs to train on");

  std::vector<Eigen::VectorXd> region_rows;
  std::vector<Eigen::VectorXd> word_rows;
  std::size_t skipped = 0;
  for (const auto& pair : pairs) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(words.dim()));
    std::size_t found = 0;
    for (const auto& token : WordTokens(pair.entity_text)) {
      if (auto v = words.Lookup(token)) {
        sum += *v;
        ++found;
      }
    }
    if (found == 0) {
      ++skipped;
      continue;
    }
    Eigen::VectorXd features = RegionFeatures(pair.region, vision);
    if (!region_rows.empty() && features.size() != region_rows.front().size()) {
      throw DimensionError("region of image " + pair.region.image_id + " has " +
                           std::to_string(features.size()) + " features, earlier regions have " +
                           std::to_string(region_rows.front().size()));
    }
    region_rows.push_back(std::move(features));
    word_rows.push_back(sum / static_cast<double>(found));
  }
  if (region_rows.empty()) throw ConfigError("every training entity is out of vocabulary");

  Eigen::MatrixXd regions(static_cast<Eigen::Index>(region_rows.size()), region_rows[0].size());
  Eigen::MatrixXd word_matrix(static_cast<Eigen::Index>(word_rows.size()), word_rows[0].size());
  for (std::size_t i = 0; i < region_rows.size(); ++i) {
    regions.row(static_cast<Eigen::Index>(i)) = region_rows[i];
    word_matrix.row(static_cast<Eigen::Index>(i)) = word_rows[i];
  }
  VgTrainResult result = TrainVgOnFeatures(regions, word_matrix, config);
  result.skipped_out_of_vocabulary = skipped;
  return result;
}

}  // namespace rovist
