#pragma once

// Small synthetic corpora shared by the unit and acceptance tests.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rovist/corpus.h"
#include "rovist/vg.h"

namespace rovist::testing {

// Concept k has a latent code z_k; its noun "concept<k>" gets the word
// vector A z_k + noise and its region the feature vector B z_k + noise, so
// a linear encoder pair can align them and held-out pairs generalize.
struct ToyVgSet {
  std::vector<EntityRegionPair> pairs;
  MapWordVectors words{1};
};

ToyVgSet MakeToyVgSet(std::size_t concepts, std::size_t feature_dim, std::size_t word_dim,
                      std::uint64_t seed);

// Four-sentence stories whose sentences open with "first", "then", "later",
// "finally"; the rest of each sentence is drawn from a shared word pool.
std::vector<Story> MakeOrderedStories(std::size_t count, std::uint64_t seed);

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void WriteText(const std::filesystem::path& path, const std::string& text);
std::string ReadText(const std::filesystem::path& path);

}  // namespace rovist::testing
