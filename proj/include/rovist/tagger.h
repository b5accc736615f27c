#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>

#include "rovist/text_analysis.h"

namespace rovist {

// Exact lexicon lookup. Punctuation tokens are tagged kPunctuation; any
// other token missing from the lexicon gets `fallback`.
class DictionaryTagger : public PosTagger {
 public:
  explicit DictionaryTagger(std::unordered_map<std::string, PosTag> lexicon,
                            PosTag fallback = PosTag::kOther);

  // Reads "word<TAB>TAG" lines; '#' starts a comment line.
  static DictionaryTagger FromFile(const std::filesystem::path& path,
                                   PosTag fallback = PosTag::kOther);

  std::vector<PosTag> Tag(const std::vector<std::string>& tokens) const override;

 private:
  std::unordered_map<std::string, PosTag> lexicon_;
  PosTag fallback_;
};

// Default English tagger for the command line: a built-in closed-class and
// common verb/adjective lexicon, then suffix rules, then kNoun for any other
// alphabetic token. Crude, but deterministic and dependency-free.
class HeuristicTagger : public PosTagger {
 public:
  HeuristicTagger();
  std::vector<PosTag> Tag(const std::vector<std::string>& tokens) const override;

 private:
  std::unordered_map<std::string, PosTag> lexicon_;
};

}  // namespace rovist
