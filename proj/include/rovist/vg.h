#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "rovist/corpus.h"
#include "rovist/text_analysis.h"

namespace rovist {

inline constexpr std::size_t kJointEmbeddingDim = 1024;
inline constexpr std::size_t kWordVectorDim = 300;
inline constexpr std::size_t kVisionFeatureDim = 768;

// Word-vector lookup backend (GloVe-style, one vector per lowercase token).
class WordVectors {
 public:
  virtual ~WordVectors() = default;
  virtual std::size_t dim() const = 0;
  virtual std::optional<Eigen::VectorXd> Lookup(const std::string& token) const = 0;
};

// In-memory table. FromTextFile reads the GloVe text format: a token followed
// by `dim` numbers per line.
class MapWordVectors : public WordVectors {
 public:
  explicit MapWordVectors(std::size_t dim) : dim_(dim) {}

  static MapWordVectors FromTextFile(const std::filesystem::path& path);

  void Add(const std::string& token, Eigen::VectorXd vector);
  std::size_t size() const { return table_.size(); }

  std::size_t dim() const override { return dim_; }
  std::optional<Eigen::VectorXd> Lookup(const std::string& token) const override;

 private:
  std::size_t dim_;
  std::unordered_map<std::string, Eigen::VectorXd> table_;
};

// Stub backend: every token maps to a fixed pseudo-random vector with
// N(0, 1/dim) entries, generated from the FNV-1a hash of the token. No
// token is out of vocabulary.
class HashedWordVectors : public WordVectors {
 public:
  explicit HashedWordVectors(std::size_t dim = kWordVectorDim, std::uint64_t salt = 0)
      : dim_(dim), salt_(salt) {}

  std::size_t dim() const override { return dim_; }
  std::optional<Eigen::VectorXd> Lookup(const std::string& token) const override;

 private:
  std::size_t dim_;
  std::uint64_t salt_;
};

// Image feature extractor for regions carried as crops.
class VisionBackend {
 public:
  virtual ~VisionBackend() = default;
  virtual std::size_t feature_dim() const = 0;
  // Throws BackendError when the crop cannot be read or decoded.
  virtual Eigen::VectorXd Extract(const CropReference& crop) const = 0;
};

// Stub extractor: reads the crop file's bytes and expands their FNV-1a hash
// into a fixed pseudo-random feature vector. Identical bytes give identical
// features; unreadable or empty files are undecodable.
class HashedVisionBackend : public VisionBackend {
 public:
  explicit HashedVisionBackend(std::size_t dim = kVisionFeatureDim) : dim_(dim) {}

  std::size_t feature_dim() const override { return dim_; }
  Eigen::VectorXd Extract(const CropReference& crop) const override;

 private:
  std::size_t dim_;
};

// Projection heads of the dual encoder. Both map into an embed_dim space
// through tanh(W x + b); embed_dim is kJointEmbeddingDim for trained models.
struct VgEncoderParams {
  Eigen::MatrixXd image_weight;  // embed_dim x feature_dim
  Eigen::VectorXd image_bias;    // embed_dim
  Eigen::MatrixXd text_weight;   // embed_dim x word_dim
  Eigen::VectorXd text_bias;     // embed_dim

  std::size_t embed_dim() const { return static_cast<std::size_t>(image_weight.rows()); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(image_weight.cols()); }
  std::size_t word_dim() const { return static_cast<std::size_t>(text_weight.cols()); }

  static VgEncoderParams Zeros(std::size_t feature_dim, std::size_t word_dim,
                               std::size_t embed_dim = kJointEmbeddingDim);
  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  static VgEncoderParams Initialize(std::size_t feature_dim, std::size_t word_dim,
                                    std::size_t embed_dim, std::uint64_t seed);

  // Throws DimensionError when the four blocks disagree.
  void Validate() const;

  // Binary archive: "ROVISTVG" magic, u32 version, u64 embed/feature/word
  // dims, then the four blocks as little-endian doubles (weights row-major).
  void Save(const std::filesystem::path& path) const;
  static VgEncoderParams Load(const std::filesystem::path& path);
};

// Text embedding of a token sequence: mean of the available word vectors,
// projected. Tokens without a vector are ignored; if none has one, throws
// OutOfVocabularyError.
Eigen::VectorXd EncodeText(const std::vector<std::string>& tokens, const WordVectors& words,
                           const VgEncoderParams& params);
Eigen::VectorXd EncodeText(const NounMention& noun, const WordVectors& words,
                           const VgEncoderParams& params);

// Raw features of a region: the precomputed vector, or the backend's output
// for a crop (BackendError if `vision` is null).
Eigen::VectorXd RegionFeatures(const RegionProposal& region, const VisionBackend* vision);

// tanh(W_i f + b_i). Throws DimensionError when f does not match the params.
Eigen::VectorXd EncodeRegion(const RegionProposal& region, const VisionBackend* vision,
                             const VgEncoderParams& params);

// Contrastive loss over a batch of m matched (image, text) embedding rows:
//   logits = T I^T, targets = row_softmax((I I^T + T T^T) / 2),
//   L_text = mean_i CE(targets_i, softmax(logits_i)),
//   L_image = the same on the transposed matrices,
//   loss = (L_image + L_text) / 2.
// Throws DimensionError on shape mismatch, NumericError on non-finite input.
double SymmetricLoss(const Eigen::MatrixXd& image_embs, const Eigen::MatrixXd& text_embs);

struct SymmetricLossGradient {
  double loss = 0.0;
  Eigen::MatrixXd d_image;  // dloss / d image_embs, including the target path
  Eigen::MatrixXd d_text;
};
SymmetricLossGradient SymmetricLossWithGradient(const Eigen::MatrixXd& image_embs,
                                                const Eigen::MatrixXd& text_embs);

// Gradients of the batch loss with respect to every projection parameter.
struct VgGradients {
  Eigen::MatrixXd image_weight;
  Eigen::VectorXd image_bias;
  Eigen::MatrixXd text_weight;
  Eigen::VectorXd text_bias;
};

// Forward pass of a batch: region features (m x feature_dim) and averaged
// word vectors (m x word_dim). Fills `grads` when non-null.
double VgBatchLoss(const VgEncoderParams& params, const Eigen::MatrixXd& region_features,
                   const Eigen::MatrixXd& word_features, VgGradients* grads = nullptr);

// 2 * sigmoid(raw / 2) - 1; strictly increasing onto (-1, 1).
double ScaleScore(double raw);

// Cosine similarity; 0 when either vector has zero magnitude.
double CosineSimilarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct NounGrounding {
  std::string noun;
  std::size_t sentence_index = 0;
  bool out_of_vocabulary = false;
  std::string best_region;  // "<image_id>#<rank>", empty when out of vocabulary
  double cosine = 0.0;
  double idf_weight = 1.0;
  double weighted = 0.0;    // idf_weight * cosine
};

struct GroundingScore {
  double raw = 0.0;
  double scaled = 0.0;
  std::vector<NounGrounding> per_noun;  // one entry per extracted noun
  std::size_t skipped_out_of_vocabulary = 0;
  bool no_nouns = false;                // no scorable noun: raw = scaled = 0
};

struct VgScoringOptions {
  std::size_t top_regions = 10;
  bool use_idf = true;
};

struct VgBackends {
  const PosTagger* tagger = nullptr;
  const WordVectors* words = nullptr;
  const VisionBackend* vision = nullptr;  // only needed for crop payloads
};

// Grounding score of one story. Regions from all of the story's images are
// pooled (top `top_regions` per image by confidence) and every noun is
// matched to its most similar region anywhere in the pool. Then
//   raw = ln sum_i exp(w_i * max_j cos(noun_i, region_j)),
// where w_i is the mean idf of the noun's tokens (1 with idf disabled or
// `idf` null). Out-of-vocabulary nouns are left out of the sum. Throws Error
// naming every story image that has no regions.
GroundingScore VgScore(const Story& story, const RegionIndex& regions, const IdfTable* idf,
                       const VgEncoderParams& params, const VgBackends& backends,
                       const VgScoringOptions& options = {});

}  // namespace rovist
