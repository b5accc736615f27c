#include "rovist/vg.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>

#include "rovist/errors.h"
#include "rovist/random.h"

namespace rovist {
namespace {

// Fills a vector with N(0, 1/dim) entries drawn from a generator keyed by `key`.
Eigen::VectorXd PseudoRandomVector(std::uint64_t key, std::size_t dim) {
  DeterministicRng rng(SplitMix64(key));
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.Normal() * scale;
  return v;
}

Eigen::MatrixXd RowSoftmax(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd p(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double mx = z.row(i).maxCoeff();
    p.row(i) = (z.row(i).array() - mx).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

Eigen::MatrixXd RowLogSoftmax(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd lp(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double mx = z.row(i).maxCoeff();
    const double lse = mx + std::log((z.row(i).array() - mx).exp().sum());
    lp.row(i) = z.row(i).array() - lse;
  }
  return lp;
}

// Backward through a row softmax: dS = Y o (dY - rowsum(dY o Y)).
Eigen::MatrixXd RowSoftmaxBackward(const Eigen::MatrixXd& y, const Eigen::MatrixXd& dy) {
  Eigen::VectorXd inner = (dy.array() * y.array()).rowwise().sum();
  return y.array() * (dy.colwise() - inner).array();
}

Eigen::MatrixXd Project(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w,
                        const Eigen::VectorXd& b) {
  Eigen::MatrixXd pre = x * w.transpose();
  pre.rowwise() += b.transpose();
  return pre.array().tanh();
}

template <typename T>
void WritePod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T ReadPod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

constexpr char kParamsMagic[8] = {'R', 'O', 'V', 'I', 'S', 'T', 'V', 'G'};
constexpr std::uint32_t kParamsVersion = 1;

}  // namespace

MapWordVectors MapWordVectors::FromTextFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open word vectors " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::optional<MapWordVectors> table;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    std::vector<double> values{std::istream_iterator<double>(fields),
                               std::istream_iterator<double>()};
    if (values.empty()) throw SchemaError(path.string(), line_no, token, "no vector values");
    if (!table) table.emplace(values.size());
    if (values.size() != table->dim()) {
      throw SchemaError(path.string(), line_no, token,
                        "expected " + std::to_string(table->dim()) + " values, got " +
                            std::to_string(values.size()));
    }
    table->Add(token, Eigen::Map<Eigen::VectorXd>(values.data(),
                                                  static_cast<Eigen::Index>(values.size())));
  }
  if (!table) throw SchemaError(path.string(), 0, "", "file holds no vectors");
  return std::move(*table);
}

void MapWordVectors::Add(const std::string& token, Eigen::VectorXd vector) {
  if (static_cast<std::size_t>(vector.size()) != dim_) {
    throw DimensionError("word vector for '" + token + "' has " +
                         std::to_string(vector.size()) + " entries, expected " +
                         std::to_string(dim_));
  }
  table_[token] = std::move(vector);
}

std::optional<Eigen::VectorXd> MapWordVectors::Lookup(const std::string& token) const {
  auto it = table_.find(token);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::optional<Eigen::VectorXd> HashedWordVectors::Lookup(const std::string& token) const {
  return PseudoRandomVector(Fnv1a64(token) ^ salt_, dim_);
}

Eigen::VectorXd HashedVisionBackend::Extract(const CropReference& crop) const {
  std::ifstream in(crop.path, std::ios::binary);
  if (!in) throw BackendError("cannot read crop " + crop.path);
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (bytes.empty()) throw BackendError("crop " + crop.path + " is empty and cannot be decoded");
  return PseudoRandomVector(Fnv1a64(bytes), dim_);
}

VgEncoderParams VgEncoderParams::Zeros(std::size_t feature_dim, std::size_t word_dim,
                                       std::size_t embed_dim) {
  const auto e = static_cast<Eigen::Index>(embed_dim);
  return {Eigen::MatrixXd::Zero(e, static_cast<Eigen::Index>(feature_dim)),
          Eigen::VectorXd::Zero(e),
          Eigen::MatrixXd::Zero(e, static_cast<Eigen::Index>(word_dim)),
          Eigen::VectorXd::Zero(e)};
}

VgEncoderParams VgEncoderParams::Initialize(std::size_t feature_dim, std::size_t word_dim,
                                            std::size_t embed_dim, std::uint64_t seed) {
  VgEncoderParams p = Zeros(feature_dim, word_dim, embed_dim);
  DeterministicRng rng(seed);
  auto fill = [&](auto& block, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
      for (Eigen::Index c = 0; c < block.cols(); ++c) block(r, c) = rng.Uniform(-bound, bound);
    }
  };
  fill(p.image_weight, feature_dim);
  fill(p.image_bias, feature_dim);
  fill(p.text_weight, word_dim);
  fill(p.text_bias, word_dim);
  return p;
}

void VgEncoderParams::Validate() const {
  if (image_bias.size() != image_weight.rows() || text_weight.rows() != image_weight.rows() ||
      text_bias.size() != image_weight.rows()) {
    throw DimensionError("encoder blocks disagree on the embedding dimension");
  }
  if (image_weight.rows() == 0 || image_weight.cols() == 0 || text_weight.cols() == 0) {
    throw DimensionError("encoder has an empty projection");
  }
}

void VgEncoderParams::Save(const std::filesystem::path& path) const {
  static_assert(std::endian::native == std::endian::little, "archive assumes little-endian");
  Validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kParamsMagic, sizeof(kParamsMagic));
  WritePod<std::uint32_t>(out, kParamsVersion);
  WritePod<std::uint64_t>(out, embed_dim());
  WritePod<std::uint64_t>(out, feature_dim());
  WritePod<std::uint64_t>(out, word_dim());
  auto write_block = [&](const auto& block) {
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
      for (Eigen::Index c = 0; c < block.cols(); ++c) WritePod<double>(out, block(r, c));
    }
  };
  write_block(image_weight);
  write_block(image_bias);
  write_block(text_weight);
  write_block(text_bias);
  if (!out) throw Error("failed writing " + path.string());
}

VgEncoderParams VgEncoderParams::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[sizeof(kParamsMagic)] = {};
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(std::begin(magic), std::end(magic), std::begin(kParamsMagic))) {
    throw SchemaError(path.string(), 0, "magic", "not a grounding encoder archive");
  }
  const auto version = ReadPod<std::uint32_t>(in);
  if (version != kParamsVersion) {
    throw SchemaError(path.string(), 0, "version",
                      "unsupported archive version " + std::to_string(version));
  }
  const auto embed = ReadPod<std::uint64_t>(in);
  const auto feature = ReadPod<std::uint64_t>(in);
  const auto word = ReadPod<std::uint64_t>(in);
  constexpr std::uint64_t kMaxDim = 1u << 20;
  if (!in || embed == 0 || feature == 0 || word == 0 || embed > kMaxDim || feature > kMaxDim ||
      word > kMaxDim) {
    throw SchemaError(path.string(), 0, "dims", "invalid declared dimensions");
  }
  VgEncoderParams p = Zeros(feature, word, embed);
  auto read_block = [&](auto& block) {
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
      for (Eigen::Index c = 0; c < block.cols(); ++c) block(r, c) = ReadPod<double>(in);
    }
  };
  read_block(p.image_weight);
  read_block(p.image_bias);
  read_block(p.text_weight);
  read_block(p.text_bias);
  if (!in) throw SchemaError(path.string(), 0, "data", "archive is truncated");
  return p;
}

Eigen::VectorXd EncodeText(const std::vector<std::string>& tokens, const WordVectors& words,
                           const VgEncoderParams& params) {
  if (words.dim() != params.word_dim()) {
    throw DimensionError("word vectors have " + std::to_string(words.dim()) +
                         " dims, text projection expects " + std::to_string(params.word_dim()));
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(words.dim()));
  std::size_t found = 0;
  for (const auto& token : tokens) {
    if (auto v = words.Lookup(token)) {
      sum += *v;
      ++found;
    }
  }
  if (found == 0) {
    std::string joined;
    for (const auto& t : tokens) joined += (joined.empty() ? "" : " ") + t;
    throw OutOfVocabularyError("no word vector for any token of '" + joined + "'");
  }
  const Eigen::VectorXd mean = sum / static_cast<double>(found);
  return (params.text_weight * mean + params.text_bias).array().tanh();
}

Eigen::VectorXd EncodeText(const NounMention& noun, const WordVectors& words,
                           const VgEncoderParams& params) {
  return EncodeText(noun.Tokens(), words, params);
}

Eigen::VectorXd RegionFeatures(const RegionProposal& region, const VisionBackend* vision) {
  if (const auto* features = std::get_if<FeatureVector>(&region.payload)) {
    return Eigen::Map<const Eigen::VectorXd>(features->data(),
                                             static_cast<Eigen::Index>(features->size()));
  }
  if (vision == nullptr) {
    throw BackendError("region of image " + region.image_id +
                       " carries a crop but no vision backend is configured");
  }
  return vision->Extract(std::get<CropReference>(region.payload));
}

Eigen::VectorXd EncodeRegion(const RegionProposal& region, const VisionBackend* vision,
                             const VgEncoderParams& params) {
  const Eigen::VectorXd f = RegionFeatures(region, vision);
  if (static_cast<std::size_t>(f.size()) != params.feature_dim()) {
    throw DimensionError("region of image " + region.image_id + " has " +
                         std::to_string(f.size()) + " features, image projection expects " +
                         std::to_string(params.feature_dim()));
  }
  return (params.image_weight * f + params.image_bias).array().tanh();
}

SymmetricLossGradient SymmetricLossWithGradient(const Eigen::MatrixXd& image_embs,
                                                const Eigen::MatrixXd& text_embs) {
  if (image_embs.rows() != text_embs.rows() || image_embs.cols() != text_embs.cols() ||
      image_embs.rows() == 0) {
    throw DimensionError("symmetric loss needs two non-empty batches of equal shape");
  }
  if (!image_embs.allFinite() || !text_embs.allFinite()) {
    throw NumericError("symmetric loss received non-finite embeddings");
  }
  const Eigen::MatrixXd& img = image_embs;
  const Eigen::MatrixXd& txt = text_embs;
  const double m = static_cast<double>(img.rows());

  const Eigen::MatrixXd logits = txt * img.transpose();
  const Eigen::MatrixXd sim = 0.5 * (img * img.transpose() + txt * txt.transpose());
  const Eigen::MatrixXd logits_t = logits.transpose();

  const Eigen::MatrixXd targets_text = RowSoftmax(sim);
  const Eigen::MatrixXd targets_image = targets_text.transpose();
  const Eigen::MatrixXd logp_text = RowLogSoftmax(logits);
  const Eigen::MatrixXd logp_image = RowLogSoftmax(logits_t);

  const double loss_text = -(targets_text.array() * logp_text.array()).sum() / m;
  const double loss_image = -(targets_image.array() * logp_image.array()).sum() / m;

  SymmetricLossGradient out;
  out.loss = 0.5 * (loss_image + loss_text);

  // Cross-entropy with soft targets: dCE/dz = p * rowsum(y) - y, dCE/dy = -log p.
  const double scale = 0.5 / m;
  auto d_logits_of = [&](const Eigen::MatrixXd& logp, const Eigen::MatrixXd& y) {
    Eigen::MatrixXd p = logp.array().exp();
    Eigen::VectorXd mass = y.rowwise().sum();
    return Eigen::MatrixXd(scale * (p.array().colwise() * mass.array() - y.array()));
  };
  Eigen::MatrixXd d_logits = d_logits_of(logp_text, targets_text);
  d_logits += d_logits_of(logp_image, targets_image).transpose();

  const Eigen::MatrixXd d_targets = -scale * (logp_text + logp_image.transpose());
  const Eigen::MatrixXd d_sim = RowSoftmaxBackward(targets_text, d_targets);
  const Eigen::MatrixXd d_sim_sym = 0.5 * (d_sim + d_sim.transpose());

  out.d_image = d_sim_sym * img + d_logits.transpose() * txt;
  out.d_text = d_sim_sym * txt + d_logits * img;
  return out;
}

double SymmetricLoss(const Eigen::MatrixXd& image_embs, const Eigen::MatrixXd& text_embs) {
  return SymmetricLossWithGradient(image_embs, text_embs).loss;
}

double VgBatchLoss(const VgEncoderParams& params, const Eigen::MatrixXd& region_features,
                   const Eigen::MatrixXd& word_features, VgGradients* grads) {
  if (static_cast<std::size_t>(region_features.cols()) != params.feature_dim() ||
      static_cast<std::size_t>(word_features.cols()) != params.word_dim()) {
    throw DimensionError("batch feature widths do not match the encoder");
  }
  const Eigen::MatrixXd img = Project(region_features, params.image_weight, params.image_bias);
  const Eigen::MatrixXd txt = Project(word_features, params.text_weight, params.text_bias);
  if (grads == nullptr) return SymmetricLoss(img, txt);

  const SymmetricLossGradient g = SymmetricLossWithGradient(img, txt);
  const Eigen::MatrixXd d_pre_img = g.d_image.array() * (1.0 - img.array().square());
  const Eigen::MatrixXd d_pre_txt = g.d_text.array() * (1.0 - txt.array().square());
  grads->image_weight = d_pre_img.transpose() * region_features;
  grads->image_bias = d_pre_img.colwise().sum().transpose();
  grads->text_weight = d_pre_txt.transpose() * word_features;
  grads->text_bias = d_pre_txt.colwise().sum().transpose();
  return g.loss;
}

double ScaleScore(double raw) { return 2.0 / (1.0 + std::exp(-0.5 * raw)) - 1.0; }

double CosineSimilarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

GroundingScore VgScore(const Story& story, const RegionIndex& regions, const IdfTable* idf,
                       const VgEncoderParams& params, const VgBackends& backends,
                       const VgScoringOptions& options) {
  if (backends.tagger == nullptr || backends.words == nullptr) {
    throw ConfigError("grounding scorer needs a tagger and word vectors");
  }
  if (options.top_regions == 0) throw ConfigError("top_regions must be at least 1");

  // Pool the top regions of every image in the story.
  std::vector<std::string> missing;
  std::vector<std::string> pool_ids;
  std::vector<Eigen::VectorXd> pool;
  std::set<std::string> seen_images;
  for (const auto& image_id : story.image_ids) {
    if (!seen_images.insert(image_id).second) continue;
    auto it = regions.find(image_id);
    if (it == regions.end() || it->second.empty()) {
      missing.push_back(image_id);
      continue;
    }
    const std::size_t take = std::min(options.top_regions, it->second.size());
    for (std::size_t r = 0; r < take; ++r) {
      pool.push_back(EncodeRegion(it->second[r], backends.vision, params));
      pool_ids.push_back(image_id + "#" + std::to_string(r));
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw Error("story " + story.story_id + ": no regions for image(s) " + list);
  }
  if (pool.empty()) throw Error("story " + story.story_id + " lists no images");

  GroundingScore score;
  std::vector<double> weighted;
  for (std::size_t s = 0; s < story.sentences.size(); ++s) {
    for (const NounMention& noun : ExtractNouns(story.sentences[s], *backends.tagger, s)) {
      NounGrounding g;
      g.noun = noun.text;
      g.sentence_index = s;
      Eigen::VectorXd text;
      try {
        text = EncodeText(noun, *backends.words, params);
      } catch (const OutOfVocabularyError&) {
        g.out_of_vocabulary = true;
        ++score.skipped_out_of_vocabulary;
        score.per_noun.push_back(std::move(g));
        continue;
      }
      std::size_t best = 0;
      double best_cos = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < pool.size(); ++j) {
        const double c = CosineSimilarity(text, pool[j]);
        if (c > best_cos) {
          best_cos = c;
          best = j;
        }
      }
      g.best_region = pool_ids[best];
      g.cosine = best_cos;
      if (options.use_idf && idf != nullptr) {
        const auto tokens = noun.Tokens();
        double sum = 0.0;
        for (const auto& t : tokens) sum += idf->Idf(t);
        g.idf_weight = sum / static_cast<double>(tokens.size());
      }
      g.weighted = g.idf_weight * g.cosine;
      weighted.push_back(g.weighted);
      score.per_noun.push_back(std::move(g));
    }
  }

  if (weighted.empty()) {
    score.no_nouns = true;
    return score;
  }
  double mx = weighted.front();
  for (double w : weighted) mx = std::max(mx, w);
  double acc = 0.0;
  for (double w : weighted) acc += std::exp(w - mx);
  score.raw = mx + std::log(acc);
  score.scaled = ScaleScore(score.raw);
  return score;
}

}  // namespace rovist
