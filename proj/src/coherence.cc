#include "rovist/coherence.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <regex>

#include <json.hpp>

#include "rovist/errors.h"
#include "rovist/random.h"
#include "rovist/text_analysis.h"

namespace rovist {

std::vector<std::string> FormatPair(std::string_view prev, std::string_view next,
                                    std::size_t max_length) {
  if (max_length < 5) throw ConfigError("pair max length must be at least 5");
  std::vector<std::string> a = Tokenize(prev);
  std::vector<std::string> b = Tokenize(next);
  if (a.empty() || b.empty()) throw InputError("cannot format a pair with an empty sentence");

  while (a.size() + b.size() + 3 > max_length) {
    if (a.size() > b.size()) {
      a.pop_back();
    } else {
      b.pop_back();
    }
  }

  std::vector<std::string> out;
  out.reserve(a.size() + b.size() + 3);
  out.emplace_back(kClsToken);
  out.insert(out.end(), a.begin(), a.end());
  out.emplace_back(kSepToken);
  out.insert(out.end(), b.begin(), b.end());
  out.emplace_back(kSepToken);
  return out;
}

HashedPairEncoder::HashedPairEncoder(std::size_t pooled_dim, std::size_t max_length)
    : pooled_dim_(pooled_dim), max_length_(max_length) {
  if (pooled_dim_ == 0) throw ConfigError("pooled dimension must be at least 1");
  if (max_length_ < 5) throw ConfigError("pair max length must be at least 5");
}

std::string HashedPairEncoder::id() const {
  return "hashed-pair-stub:dim=" + std::to_string(pooled_dim_) +
         ":max=" + std::to_string(max_length_);
}

Eigen::VectorXd HashedPairEncoder::Pool(const std::vector<std::string>& formatted) const {
  Eigen::VectorXd pooled = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pooled_dim_));
  int segment = 0;
  std::size_t count = 0;
  for (const auto& token : formatted) {
    if (token == kClsToken) continue;
    if (token == kSepToken) {
      ++segment;
      continue;
    }
    const std::string feature = (segment == 0 ? "A:" : "B:") + token;
    const std::uint64_t h = SplitMix64(Fnv1a64(feature));
    const auto bucket = static_cast<Eigen::Index>(h % pooled_dim_);
    pooled[bucket] += (h >> 63) ? -1.0 : 1.0;
    ++count;
  }
  if (count > 0) pooled /= std::sqrt(static_cast<double>(count));
  return pooled;
}

std::shared_ptr<const PairEncoder> MakePairEncoder(const std::string& id) {
  static const std::regex kStub(R"(hashed-pair-stub:dim=(\d+):max=(\d+))");
  std::smatch m;
  if (std::regex_match(id, m, kStub)) {
    return std::make_shared<HashedPairEncoder>(std::stoul(m[1].str()), std::stoul(m[2].str()));
  }
  throw BackendError("language-model backend '" + id + "' is not available in this build");
}

void CoherenceModel::Validate() const {
  if (!backend) throw ConfigError("coherence model has no backend");
  if (head.weight.rows() != 2 ||
      static_cast<std::size_t>(head.weight.cols()) != backend->pooled_dim()) {
    throw DimensionError("head expects " + std::to_string(head.weight.cols()) +
                         " inputs but the backend pools " +
                         std::to_string(backend->pooled_dim()) + " dims");
  }
}

namespace {
constexpr const char* kModelFormat = "rovist-coherence-model";
constexpr int kModelVersion = 1;
}  // namespace

void CoherenceModel::Save(const std::filesystem::path& path) const {
  Validate();
  nlohmann::ordered_json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["backend"] = backend->id();
  j["backend_weights"] = nullptr;  // the stub carries no weights
  j["pooled_dim"] = backend->pooled_dim();
  j["max_length"] = backend->max_length();
  nlohmann::ordered_json weight = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < head.weight.rows(); ++r) {
    std::vector<double> row(head.weight.cols());
    for (Eigen::Index c = 0; c < head.weight.cols(); ++c) row[c] = head.weight(r, c);
    weight.push_back(row);
  }
  j["head"]["weight"] = std::move(weight);
  j["head"]["bias"] = {head.bias[0], head.bias[1]};
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump() << '\n';
}

CoherenceModel CoherenceModel::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    if (j.at("format") != kModelFormat) {
      throw SchemaError(path.string(), 0, "format", "not a coherence model artifact");
    }
    if (j.at("version") != kModelVersion) {
      throw SchemaError(path.string(), 0, "version", "unsupported artifact version");
    }
    CoherenceModel model;
    model.backend = MakePairEncoder(j.at("backend").get<std::string>());
    if (j.at("pooled_dim").get<std::size_t>() != model.backend->pooled_dim()) {
      throw SchemaError(path.string(), 0, "pooled_dim", "disagrees with the backend id");
    }
    const auto& weight = j.at("head").at("weight");
    model.head.weight.resize(2, static_cast<Eigen::Index>(model.backend->pooled_dim()));
    if (weight.size() != 2) throw SchemaError(path.string(), 0, "head.weight", "expected 2 rows");
    for (Eigen::Index r = 0; r < 2; ++r) {
      const auto row = weight[static_cast<std::size_t>(r)].get<std::vector<double>>();
      if (row.size() != model.backend->pooled_dim()) {
        throw SchemaError(path.string(), 0, "head.weight", "row width disagrees with pooled_dim");
      }
      for (Eigen::Index c = 0; c < model.head.weight.cols(); ++c) {
        model.head.weight(r, c) = row[static_cast<std::size_t>(c)];
      }
    }
    const auto bias = j.at("head").at("bias").get<std::vector<double>>();
    if (bias.size() != 2) throw SchemaError(path.string(), 0, "head.bias", "expected 2 values");
    model.head.bias = {bias[0], bias[1]};
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string(), 0, "<artifact>", e.what());
  }
}

namespace {

Eigen::Vector2d Softmax2(const Eigen::Vector2d& z) {
  const double mx = z.maxCoeff();
  Eigen::Vector2d e = (z.array() - mx).exp();
  return e / e.sum();
}

Eigen::Vector2d HeadProbabilities(const SopHeadParams& head, const Eigen::VectorXd& pooled) {
  return Softmax2(head.weight * pooled + head.bias);
}

Eigen::VectorXd PoolPair(const PairEncoder& backend, std::string_view prev,
                         std::string_view next) {
  Eigen::VectorXd pooled = backend.Pool(FormatPair(prev, next, backend.max_length()));
  if (static_cast<std::size_t>(pooled.size()) != backend.pooled_dim()) {
    throw BackendError("backend " + backend.id() + " returned a vector of the wrong size");
  }
  return pooled;
}

}  // namespace

Eigen::Vector2d SopClassProbabilities(const CoherenceModel& model, std::string_view prev,
                                      std::string_view next) {
  model.Validate();
  return HeadProbabilities(model.head, PoolPair(*model.backend, prev, next));
}

PairProbability SopPredict(const CoherenceModel& model, std::string_view prev,
                           std::string_view next, std::size_t pair_index) {
  return {SopClassProbabilities(model, prev, next)[0], pair_index};
}

double BceLoss(double p_hat, int label) {
  const double p = std::clamp(p_hat, kProbabilityClamp, 1.0 - kProbabilityClamp);
  const double y = label ? 1.0 : 0.0;
  return -y * std::log(p) - (1.0 - y) * std::log(1.0 - p);
}

double BceLossDerivative(double p_hat, int label) {
  const double y = label ? 1.0 : 0.0;
  return -y / p_hat + (1.0 - y) / (1.0 - p_hat);
}

void CoherenceTrainConfig::Validate() const {
  if (batch_size == 0) throw ConfigError("batch size must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (weight_decay < 0.0) throw ConfigError("weight decay must be non-negative");
  if (lr_decay < 0.0 || lr_decay >= 1.0) throw ConfigError("lr decay must lie in [0, 1)");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (max_epochs < 1) throw ConfigError("max epochs must be at least 1");
  if (validation_fraction < 0.0 || validation_fraction >= 1.0) {
    throw ConfigError("validation fraction must lie in [0, 1)");
  }
}

namespace {

struct PooledSet {
  Eigen::MatrixXd pooled;  // n x pooled_dim
  Eigen::VectorXd labels;
};

// Mean BCE over `rows`; fills gradients of the mean when requested.
double HeadLoss(const SopHeadParams& head, const PooledSet& data,
                const std::vector<std::size_t>& rows, std::size_t begin, std::size_t end,
                Eigen::MatrixXd* d_weight, Eigen::Vector2d* d_bias) {
  const double count = static_cast<double>(end - begin);
  double loss = 0.0;
  if (d_weight) {
    d_weight->setZero(head.weight.rows(), head.weight.cols());
    d_bias->setZero();
  }
  for (std::size_t i = begin; i < end; ++i) {
    const auto row = static_cast<Eigen::Index>(rows[i]);
    const Eigen::VectorXd h = data.pooled.row(row).transpose();
    const double y = data.labels[row];
    const double p = HeadProbabilities(head, h)[0];
    loss += BceLoss(p, static_cast<int>(y));
    if (d_weight) {
      // d/dz0 = p - y and d/dz1 = y - p for the two-way softmax.
      const double g = (p - y) / count;
      d_weight->row(0) += g * h.transpose();
      d_weight->row(1) -= g * h.transpose();
      (*d_bias)[0] += g;
      (*d_bias)[1] -= g;
    }
  }
  return loss / count;
}

double MeanLoss(const SopHeadParams& head, const PooledSet& data,
                const std::vector<std::size_t>& rows) {
  if (rows.empty()) return 0.0;
  return HeadLoss(head, data, rows, 0, rows.size(), nullptr, nullptr);
}

double Accuracy(const SopHeadParams& head, const PooledSet& data,
                const std::vector<std::size_t>& rows) {
  if (rows.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t r : rows) {
    const auto row = static_cast<Eigen::Index>(r);
    const double p = HeadProbabilities(head, data.pooled.row(row).transpose())[0];
    correct += ((p > 0.5) == (data.labels[row] > 0.5));
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

}  // namespace

CoherenceTrainResult TrainCoherence(const std::vector<SopExample>& dataset,
                                    std::shared_ptr<const PairEncoder> backend,
                                    const CoherenceTrainConfig& config) {
  config.Validate();
  if (!backend) throw ConfigError("coherence training needs a backend");
  if (dataset.empty()) throw ConfigError("no SOP examples to train on");

  const std::size_t n = dataset.size();
  const auto dim = static_cast<Eigen::Index>(backend->pooled_dim());
  PooledSet data{Eigen::MatrixXd(static_cast<Eigen::Index>(n), dim),
                 Eigen::VectorXd(static_cast<Eigen::Index>(n))};
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    data.pooled.row(row) = PoolPair(*backend, dataset[i].first, dataset[i].second).transpose();
    data.labels[row] = dataset[i].label ? 1.0 : 0.0;
  }

  CoherenceTrainResult result;
  result.model.backend = backend;
  DeterministicRng init(config.seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  SopHeadParams head{Eigen::MatrixXd(2, dim), Eigen::Vector2d::Zero()};
  for (Eigen::Index r = 0; r < 2; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) head.weight(r, c) = init.Uniform(-bound, bound);
  }
  for (Eigen::Index r = 0; r < 2; ++r) head.bias[r] = init.Uniform(-bound, bound);
  result.model.head = head;

  DataSplit split = SplitTrainValidation(n, config.validation_fraction, config.seed);
  result.train_indices = split.train;
  result.validation_indices = split.validation;
  const std::vector<std::size_t>& monitor =
      split.validation.empty() ? split.train : split.validation;

  Adam adam({.learning_rate = config.learning_rate, .weight_decay = config.weight_decay});
  EarlyStopping stopper(config.patience);
  DeterministicRng rng(SplitMix64(config.seed));
  result.history.initial_train_loss = MeanLoss(head, data, split.train);

  std::vector<std::size_t> order = split.train;
  Eigen::MatrixXd d_weight;
  Eigen::Vector2d d_bias;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.Shuffle(order);
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t e = std::min(order.size(), b + config.batch_size);
      const double loss = HeadLoss(head, data, order, b, e, &d_weight, &d_bias);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite coherence loss at epoch " + std::to_string(epoch) +
                           ", batch starting at " + std::to_string(b));
      }
      adam.BeginStep();
      adam.Update(0, head.weight, d_weight);
      adam.Update(1, head.bias, d_bias);
    }
    adam.set_learning_rate(adam.learning_rate() * (1.0 - config.lr_decay));

    const double train_loss = MeanLoss(head, data, split.train);
    const double val_loss = MeanLoss(head, data, monitor);
    result.history.train_loss.push_back(train_loss);
    result.history.validation_loss.push_back(val_loss);
    if (stopper.Record(val_loss)) result.model.head = head;
    if (stopper.ShouldStop()) {
      result.history.stopped_early = epoch < config.max_epochs;
      break;
    }
  }
  result.history.best_epoch = stopper.best_epoch();
  result.validation_accuracy = Accuracy(result.model.head, data, monitor);
  return result;
}

double SopAccuracy(const CoherenceModel& model, const std::vector<SopExample>& examples) {
  if (examples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& e : examples) {
    const double p = SopPredict(model, e.first, e.second).p_hat;
    correct += ((p > 0.5) == (e.label == 1));
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

CoherenceScore ScoreCoherence(const Story& story, const PairProbabilityFn& pair_probability) {
  CoherenceScore result;
  if (story.sentences.size() < 2) {
    result.degenerate = true;
    result.score = 1.0;
    return result;
  }
  double sum = 0.0;
  for (std::size_t i = 1; i < story.sentences.size(); ++i) {
    const double p = pair_probability(story.sentences[i - 1], story.sentences[i]);
    result.pairs.push_back({p, i - 1});
    sum += p;
  }
  result.score = sum / static_cast<double>(result.pairs.size());
  return result;
}

CoherenceScore ScoreCoherence(const Story& story, const CoherenceModel& model) {
  model.Validate();
  return ScoreCoherence(story, [&](std::string_view prev, std::string_view next) {
    return SopPredict(model, prev, next).p_hat;
  });
}

}  // namespace rovist
