#include "rovist/nr.h"

#include <algorithm>

#include "rovist/errors.h"
#include "rovist/text_analysis.h"

namespace rovist {
namespace {

std::vector<std::string> UniqueSorted(std::vector<std::string> tokens) {
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

double JaccardOfSets(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t united = a.size() + b.size() - common;
  if (united == 0) return 0.0;
  return static_cast<double>(common) / static_cast<double>(united);
}

void FillInter(const Story& story, RedundancyBreakdown& out) {
  std::vector<std::vector<std::string>> sets;
  sets.reserve(story.sentences.size());
  for (const auto& s : story.sentences) sets.push_back(UniqueSorted(WordTokens(s)));

  double sum = 0.0;
  for (std::size_t i = 1; i < sets.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double js = JaccardOfSets(sets[j], sets[i]);
      out.pair_scores.push_back({j, i, js});
      sum += js;
    }
  }
  out.no_sentence_pairs = out.pair_scores.empty();
  out.inter = out.no_sentence_pairs ? 0.0 : sum / static_cast<double>(out.pair_scores.size());
}

void FillIntra(const Story& story, std::size_t n, RedundancyBreakdown& out) {
  if (n == 0) throw ConfigError("n-gram size must be at least 1");
  double sum = 0.0;
  for (std::size_t s = 0; s < story.sentences.size(); ++s) {
    const auto grams = SplitNgrams(WordTokens(story.sentences[s]), n);
    for (std::size_t k = 0; k + 1 < grams.size(); ++k) {
      const double js = JaccardOfSets(UniqueSorted(grams[k]), UniqueSorted(grams[k + 1]));
      out.intra_scores.push_back({s, k, js});
      sum += js;
    }
  }
  out.no_ngram_pairs = out.intra_scores.empty();
  out.intra = out.no_ngram_pairs ? 0.0 : sum / static_cast<double>(out.intra_scores.size());
}

}  // namespace

double Jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return JaccardOfSets(UniqueSorted(a), UniqueSorted(b));
}

double InterSentenceRepetition(const Story& story) {
  RedundancyBreakdown b;
  FillInter(story, b);
  return b.inter;
}

double IntraSentenceRepetition(const Story& story, std::size_t n) {
  RedundancyBreakdown b;
  FillIntra(story, n, b);
  return b.intra;
}

RedundancyBreakdown NrScore(const Story& story, std::size_t n) {
  RedundancyBreakdown b;
  FillInter(story, b);
  FillIntra(story, n, b);
  b.final_score = 1.0 - (b.inter + b.intra) / 2.0;
  return b;
}

}  // namespace rovist
