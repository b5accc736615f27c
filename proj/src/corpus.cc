#include "rovist/corpus.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <tuple>

#include <json.hpp>

#include "rovist/errors.h"
#include "rovist/random.h"
#include "rovist/text_analysis.h"

namespace rovist {
namespace {

using nlohmann::json;

// Calls `fn(record, line_no)` for every non-blank line of a JSONL file.
void ForEachRecord(const std::filesystem::path& path,
                   const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(path.string(), line_no, "<record>", std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) {
      throw SchemaError(path.string(), line_no, "<record>", "expected a JSON object");
    }
    fn(record, line_no);
  }
}

class RecordReader {
 public:
  RecordReader(const json& record, const std::filesystem::path& path, std::size_t line)
      : record_(record), path_(path.string()), line_(line) {}

  [[noreturn]] void Fail(const std::string& field, const std::string& message) const {
    throw SchemaError(path_, line_, field, message);
  }

  const json& Require(const std::string& field) const {
    auto it = record_.find(field);
    if (it == record_.end()) Fail(field, "missing");
    return *it;
  }

  std::string String(const std::string& field, bool allow_empty = false) const {
    const json& v = Require(field);
    if (!v.is_string()) Fail(field, "expected a string");
    std::string s = v.get<std::string>();
    if (!allow_empty && s.empty()) Fail(field, "must not be empty");
    return s;
  }

  std::vector<std::string> StringList(const std::string& field) const {
    const json& v = Require(field);
    if (!v.is_array()) Fail(field, "expected an array of strings");
    if (v.empty()) Fail(field, "must not be empty");
    std::vector<std::string> out;
    for (const auto& item : v) {
      if (!item.is_string()) Fail(field, "expected an array of strings");
      if (item.get_ref<const std::string&>().empty()) Fail(field, "contains an empty string");
      out.push_back(item.get<std::string>());
    }
    return out;
  }

  double Number(const std::string& field) const {
    const json& v = Require(field);
    if (!v.is_number()) Fail(field, "expected a number");
    return v.get<double>();
  }

  int Integer(const std::string& field) const {
    const json& v = Require(field);
    if (!v.is_number_integer()) Fail(field, "expected an integer");
    return v.get<int>();
  }

  bool Boolean(const std::string& field) const {
    const json& v = Require(field);
    if (!v.is_boolean()) Fail(field, "expected true or false");
    return v.get<bool>();
  }

  bool Has(const std::string& field) const { return record_.contains(field); }

 private:
  const json& record_;
  std::string path_;
  std::size_t line_;
};

RegionProposal ParseRegion(const RecordReader& r, const std::filesystem::path& path,
                           bool confidence_required) {
  RegionProposal region;
  region.image_id = r.String("image_id");

  const json& bbox = r.Require("bbox");
  if (!bbox.is_array() || bbox.size() != 4) r.Fail("bbox", "expected [x, y, width, height]");
  for (const auto& v : bbox) {
    if (!v.is_number()) r.Fail("bbox", "expected [x, y, width, height]");
  }
  region.bbox = {bbox[0].get<double>(), bbox[1].get<double>(), bbox[2].get<double>(),
                 bbox[3].get<double>()};
  if (!(region.bbox.width > 0.0) || !(region.bbox.height > 0.0)) {
    r.Fail("bbox", "width and height must be positive");
  }

  if (confidence_required || r.Has("confidence")) {
    region.confidence = r.Number("confidence");
    if (!(region.confidence >= 0.0 && region.confidence <= 1.0)) {
      r.Fail("confidence", "must lie in [0, 1]");
    }
  } else {
    region.confidence = 1.0;
  }

  const bool has_crop = r.Has("crop");
  const bool has_features = r.Has("features");
  if (has_crop == has_features) r.Fail("crop|features", "exactly one payload form is required");
  if (has_crop) {
    std::filesystem::path crop = r.String("crop");
    if (crop.is_relative()) crop = path.parent_path() / crop;
    region.payload = CropReference{crop.lexically_normal().string()};
  } else {
    const json& f = r.Require("features");
    if (!f.is_array() || f.empty()) r.Fail("features", "expected a non-empty array of numbers");
    FeatureVector features;
    features.reserve(f.size());
    for (const auto& v : f) {
      if (!v.is_number()) r.Fail("features", "expected a non-empty array of numbers");
      features.push_back(v.get<double>());
    }
    region.payload = std::move(features);
  }
  return region;
}

}  // namespace

std::vector<Story> LoadStories(const std::filesystem::path& path) {
  std::vector<Story> stories;
  ForEachRecord(path, [&](const json& record, std::size_t line) {
    RecordReader r(record, path, line);
    Story story;
    story.story_id = r.String("story_id");
    story.sentences = r.StringList("sentences");
    story.image_ids = r.StringList("image_ids");
    if (r.Has("model_id")) story.model_id = r.String("model_id", /*allow_empty=*/true);
    stories.push_back(std::move(story));
  });
  return stories;
}

RegionIndex LoadRegions(const std::filesystem::path& path) {
  RegionIndex index;
  ForEachRecord(path, [&](const json& record, std::size_t line) {
    RecordReader r(record, path, line);
    RegionProposal region = ParseRegion(r, path, /*confidence_required=*/true);
    index[region.image_id].push_back(std::move(region));
  });
  for (auto& [image_id, regions] : index) {
    std::stable_sort(regions.begin(), regions.end(),
                     [](const RegionProposal& a, const RegionProposal& b) {
                       return a.confidence > b.confidence;
                     });
  }
  return index;
}

std::vector<EntityRegionPair> LoadEntityRegionPairs(const std::filesystem::path& path) {
  std::vector<EntityRegionPair> pairs;
  ForEachRecord(path, [&](const json& record, std::size_t line) {
    RecordReader r(record, path, line);
    EntityRegionPair pair;
    for (const auto& token : WordTokens(r.String("entity_text"))) {
      if (IsStopword(token)) continue;
      if (!pair.entity_text.empty()) pair.entity_text += ' ';
      pair.entity_text += token;
    }
    if (pair.entity_text.empty()) r.Fail("entity_text", "no token left after stopword removal");
    pair.region = ParseRegion(r, path, /*confidence_required=*/false);
    pairs.push_back(std::move(pair));
  });
  return pairs;
}

std::vector<HumanJudgment> LoadJudgments(const std::filesystem::path& path, LikertScale scale) {
  if (scale.min > scale.max) throw ConfigError("Likert minimum exceeds maximum");
  std::vector<HumanJudgment> judgments;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::set<std::pair<std::string, std::string>> voted;
  ForEachRecord(path, [&](const json& record, std::size_t line) {
    RecordReader r(record, path, line);
    HumanJudgment j;
    j.story_id = r.String("story_id");
    j.model_id = r.String("model_id");
    j.annotator_id = r.String("annotator_id");
    auto likert = [&](const char* field) {
      const int v = r.Integer(field);
      if (v < scale.min || v > scale.max) {
        r.Fail(field, std::to_string(v) + " is outside the Likert scale [" +
                          std::to_string(scale.min) + ", " + std::to_string(scale.max) + "]");
      }
      return v;
    };
    j.grounding = likert("grounding");
    j.coherence = likert("coherence");
    j.non_redundancy = likert("non_redundancy");
    j.voted_best = r.Boolean("voted_best");

    if (!seen.emplace(j.annotator_id, j.story_id, j.model_id).second) {
      r.Fail("annotator_id", "duplicate judgment for (annotator=" + j.annotator_id +
                                 ", story=" + j.story_id + ", model=" + j.model_id + ")");
    }
    if (j.voted_best && !voted.emplace(j.annotator_id, j.story_id).second) {
      r.Fail("voted_best", "annotator " + j.annotator_id + " voted more than once for story " +
                               j.story_id);
    }
    judgments.push_back(std::move(j));
  });
  return judgments;
}

std::vector<SopExample> BuildSopDataset(const std::vector<Story>& stories, std::uint64_t seed) {
  std::vector<SopExample> examples;
  for (const Story& story : stories) {
    for (std::size_t i = 1; i < story.sentences.size(); ++i) {
      const std::string& prev = story.sentences[i - 1];
      const std::string& next = story.sentences[i];
      examples.push_back({prev, next, 1});
      examples.push_back({next, prev, 0});
    }
  }
  DeterministicRng rng(seed);
  rng.Shuffle(examples);
  return examples;
}

void WriteSopDataset(const std::filesystem::path& path, const std::vector<SopExample>& examples) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& e : examples) {
    nlohmann::ordered_json j;
    j["first"] = e.first;
    j["second"] = e.second;
    j["label"] = e.label;
    out << j.dump() << '\n';
  }
}

std::vector<SopExample> LoadSopDataset(const std::filesystem::path& path) {
  std::vector<SopExample> examples;
  ForEachRecord(path, [&](const json& record, std::size_t line) {
    RecordReader r(record, path, line);
    SopExample e;
    e.first = r.String("first");
    e.second = r.String("second");
    e.label = r.Integer("label");
    if (e.label != 0 && e.label != 1) r.Fail("label", "must be 0 or 1");
    examples.push_back(std::move(e));
  });
  return examples;
}

}  // namespace rovist
