#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace rovist {

// An ordered sequence of sentences written for an ordered photo sequence.
// `model_id` is optional in story files; it names the system that produced
// the story and joins reports to human judgments.
struct Story {
  std::string story_id;
  std::string model_id;
  std::vector<std::string> sentences;
  std::vector<std::string> image_ids;
};

struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;
};

// Reference to an image crop on disk. Relative paths in region files are
// resolved against the directory of the file that names them.
struct CropReference {
  std::string path;
};

using FeatureVector = std::vector<double>;

// One detector-proposed region of an image.
struct RegionProposal {
  std::string image_id;
  BoundingBox bbox;
  double confidence = 0.0;
  std::variant<CropReference, FeatureVector> payload;

  bool has_features() const { return std::holds_alternative<FeatureVector>(payload); }
};

// image_id -> proposals sorted by confidence, highest first.
using RegionIndex = std::map<std::string, std::vector<RegionProposal>>;

// A noun phrase aligned to an image region (grounding encoder training unit).
struct EntityRegionPair {
  std::string entity_text;
  RegionProposal region;
};

// Sentence-order-prediction example. label 1: `second` followed `first` in
// the source story. label 0: the pair was swapped.
struct SopExample {
  std::string first;
  std::string second;
  int label = 1;
};

struct HumanJudgment {
  std::string story_id;
  std::string model_id;
  std::string annotator_id;
  int grounding = 0;
  int coherence = 0;
  int non_redundancy = 0;
  bool voted_best = false;
};

struct LikertScale {
  int min = 1;
  int max = 5;
};

// Loaders for line-delimited JSON files. Blank lines are skipped. Schema
// violations throw SchemaError carrying the 1-based line and field name; an
// unreadable file throws rovist::Error.
std::vector<Story> LoadStories(const std::filesystem::path& path);
RegionIndex LoadRegions(const std::filesystem::path& path);
std::vector<HumanJudgment> LoadJudgments(const std::filesystem::path& path,
                                         LikertScale scale = {});

// Entity-region pair file: one region record per line (same fields as the
// region file, confidence optional and defaulting to 1) plus "entity_text".
// Stopwords are removed from the entity text; a line whose entity is left
// empty is a schema error.
std::vector<EntityRegionPair> LoadEntityRegionPairs(const std::filesystem::path& path);

// Builds SOP training data: every adjacent sentence pair of every story
// yields one in-order example and its swap. Stories with fewer than two
// sentences contribute nothing. The result is shuffled with
// DeterministicRng(seed), so the same seed gives the same order.
std::vector<SopExample> BuildSopDataset(const std::vector<Story>& stories, std::uint64_t seed);

void WriteSopDataset(const std::filesystem::path& path, const std::vector<SopExample>& examples);
std::vector<SopExample> LoadSopDataset(const std::filesystem::path& path);

}  // namespace rovist
