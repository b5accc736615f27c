#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rovist/corpus.h"

namespace rovist {

inline constexpr std::size_t kDefaultNgramSize = 4;

// |unique(a) & unique(b)| / |unique(a) | unique(b)|; 0 when both are empty.
double Jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct SentencePairJaccard {
  std::size_t first = 0;   // earlier sentence
  std::size_t second = 0;  // later sentence
  double value = 0.0;
};

struct NgramPairJaccard {
  std::size_t sentence = 0;
  std::size_t ngram = 0;  // compares n-gram `ngram` with n-gram `ngram + 1`
  double value = 0.0;
};

struct RedundancyBreakdown {
  double inter = 0.0;
  double intra = 0.0;
  double final_score = 1.0;  // 1 - (inter + intra) / 2
  std::vector<SentencePairJaccard> pair_scores;
  std::vector<NgramPairJaccard> intra_scores;
  bool no_sentence_pairs = false;  // single sentence: inter fixed at 0
  bool no_ngram_pairs = false;     // no sentence had two n-grams: intra fixed at 0
};

// All functions compare lowercase word tokens (punctuation excluded).

// Mean Jaccard over every unordered sentence pair, each sentence against all
// sentences before it. 0 for a single sentence.
double InterSentenceRepetition(const Story& story);

// Mean Jaccard between consecutive non-overlapping n-grams, pooled over all
// sentences of the story. 0 when no sentence has two n-grams.
double IntraSentenceRepetition(const Story& story, std::size_t n = kDefaultNgramSize);

RedundancyBreakdown NrScore(const Story& story, std::size_t n = kDefaultNgramSize);

}  // namespace rovist
