#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rovist/corpus.h"

namespace rovist {

// Lowercases and splits a sentence into word and punctuation tokens.
//
// Rules, applied left to right:
//  * whitespace separates tokens;
//  * a word is a maximal run of ASCII letters, digits and non-ASCII bytes,
//    lowercased (ASCII only);
//  * English clitics split off the preceding word: "n't" ("don't" ->
//    "do" "n't"), and "'s", "'re", "'ve", "'ll", "'d", "'m" as their own
//    tokens;
//  * every other character is a one-character punctuation token.
std::vector<std::string> Tokenize(std::string_view sentence);

// True when the token has no letter, digit or non-ASCII byte.
bool IsPunctuation(std::string_view token);

// Tokenize() without punctuation tokens.
std::vector<std::string> WordTokens(std::string_view sentence);

// English stopword list (lowercase).
bool IsStopword(std::string_view token);

// Universal part-of-speech categories.
enum class PosTag { kNoun, kProperNoun, kVerb, kAdjective, kAdverb, kPronoun, kDeterminer,
                    kAdposition, kConjunction, kAuxiliary, kParticle, kNumeral,
                    kPunctuation, kOther };

PosTag ParsePosTag(std::string_view name);  // "NOUN", "VERB", ...; throws ConfigError
std::string_view PosTagName(PosTag tag);

inline bool IsNounTag(PosTag tag) { return tag == PosTag::kNoun || tag == PosTag::kProperNoun; }

// Part-of-speech backend. Implementations must return one tag per token and
// throw BackendError on failure.
class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::vector<PosTag> Tag(const std::vector<std::string>& tokens) const = 0;
};

// A noun (or run of adjacent nouns) found in a sentence.
struct NounMention {
  std::string text;               // stopword-free tokens joined by single spaces
  std::size_t token_begin = 0;    // [begin, end) into Tokenize(sentence)
  std::size_t token_end = 0;
  std::size_t sentence_index = 0;

  std::vector<std::string> Tokens() const;
};

// Returns the noun mentions of `sentence` in order. Adjacent noun tokens
// merge into one mention, stopwords are dropped from the mention text, and
// mentions left empty are dropped. Throws BackendError if the tagger fails or
// returns the wrong number of tags.
std::vector<NounMention> ExtractNouns(std::string_view sentence, const PosTagger& tagger,
                                      std::size_t sentence_index = 0);

// Story-level document frequencies and idf(t) = ln(N / (1 + df(t))).
class IdfTable {
 public:
  // Throws ConfigError if story_count == 0 or any df exceeds it.
  IdfTable(std::size_t story_count, std::map<std::string, std::size_t> doc_freq);

  std::size_t story_count() const { return story_count_; }
  std::size_t DocFreq(const std::string& token) const;  // 0 for unseen tokens
  double Idf(const std::string& token) const;
  const std::map<std::string, std::size_t>& doc_freq() const { return doc_freq_; }

  // Flat record {"N": int, "df": {token: int}}.
  void Save(const std::filesystem::path& path) const;
  static IdfTable Load(const std::filesystem::path& path);

 private:
  std::size_t story_count_;
  std::map<std::string, std::size_t> doc_freq_;
};

// Counts each word token once per story. Throws ConfigError on an empty list.
IdfTable ComputeIdf(const std::vector<Story>& stories);

// Consecutive non-overlapping windows of n tokens; a shorter remainder is
// kept as the final n-gram. Throws ConfigError when n == 0.
std::vector<std::vector<std::string>> SplitNgrams(const std::vector<std::string>& tokens,
                                                  std::size_t n);
std::vector<std::vector<std::string>> SplitNgrams(std::string_view sentence, std::size_t n);

}  // namespace rovist
