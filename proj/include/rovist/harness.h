#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rovist/coherence.h"
#include "rovist/corpus.h"
#include "rovist/nr.h"
#include "rovist/text_analysis.h"
#include "rovist/vg.h"

namespace rovist {

// Per-story scores. A component that was not requested is absent, and the
// total is only present when all three components are.
struct ScoreReport {
  std::string story_id;
  std::string model_id;
  std::optional<double> vg_scaled;
  std::optional<double> vg_raw;
  std::optional<double> coherence;
  std::optional<double> nr;
  std::optional<double> total;  // vg_scaled + coherence + nr

  std::optional<GroundingScore> grounding_detail;
  std::optional<CoherenceScore> coherence_detail;
  std::optional<RedundancyBreakdown> redundancy_detail;
};

inline double RovistTotal(double vg, double coherence, double nr) { return vg + coherence + nr; }

// --- correlation ---------------------------------------------------------

// Each function throws InputError for unequal lengths or fewer than two
// points and UndefinedCorrelationError when a coefficient's denominator is
// zero (constant input, all pairs tied).
double Pearson(std::span<const double> x, std::span<const double> y);
// Pearson over mid-ranks (ties share the average of their positions).
double Spearman(std::span<const double> x, std::span<const double> y);
// Tau-b: (concordant - discordant) / sqrt((n0 - n1)(n0 - n2)).
double Kendall(std::span<const double> x, std::span<const double> y);

// 1-based mid-ranks, ascending.
std::vector<double> MidRanks(std::span<const double> values);

struct CorrelationResult {
  double spearman = 0.0;
  double pearson = 0.0;
  double kendall = 0.0;
  std::size_t sample_size = 0;
};

CorrelationResult Correlate(std::span<const double> x, std::span<const double> y);

enum class Criterion { kGrounding, kCoherence, kNonRedundancy, kOverall };

Criterion ParseCriterion(std::string_view name);  // throws ConfigError
std::string_view CriterionName(Criterion c);
inline constexpr Criterion kAllCriteria[] = {Criterion::kGrounding, Criterion::kCoherence,
                                             Criterion::kNonRedundancy, Criterion::kOverall};

// Correlates each report's metric for `criterion` (vg_scaled, coherence, nr
// or total) with the human score averaged over annotators for the same
// (story_id, model_id). The overall human score is the sum of the three
// criterion means. Throws Error listing unmatched keys when a report has no
// judgment, or when the needed metric is absent from a report.
CorrelationResult CorrelateWithHumans(const std::vector<ScoreReport>& reports,
                                      const std::vector<HumanJudgment>& judgments,
                                      Criterion criterion);

struct VoteRankCorrelation {
  double spearman = 0.0;
  double pearson = 0.0;
  double kendall = 0.0;
  std::size_t sequences = 0;          // sequences averaged
  std::size_t skipped_sequences = 0;  // coefficient undefined (constant scores or ranks)
};

// For every photo sequence (story_id), ranks its models by vote share
// (mid-ranks, more votes = higher rank) and correlates that ranking with the
// models' mean human score per criterion; coefficients are averaged over
// sequences. Throws Error for a sequence with fewer than two models or zero
// votes.
std::map<Criterion, VoteRankCorrelation> RankCorrelationByVotes(
    const std::vector<HumanJudgment>& judgments);

// --- dataset scoring -----------------------------------------------------

struct ScoringContext {
  bool score_vg = true;
  bool score_coherence = true;
  bool score_nr = true;

  const RegionIndex* regions = nullptr;
  const IdfTable* idf = nullptr;  // null: unweighted grounding
  const VgEncoderParams* vg_params = nullptr;
  VgBackends vg_backends;
  VgScoringOptions vg_options;

  const CoherenceModel* coherence_model = nullptr;
  std::size_t ngram = kDefaultNgramSize;

  std::size_t jobs = 1;
};

// Throws on any failure; ScoreDataset isolates these per story.
ScoreReport ScoreStory(const Story& story, const ScoringContext& context);

struct StoryError {
  std::size_t index = 0;
  std::string story_id;
  std::string model_id;
  std::string message;
};

struct DatasetScores {
  std::vector<ScoreReport> reports;  // input order, failed stories omitted
  std::vector<StoryError> errors;
};

// Scores every story on up to `context.jobs` threads. Output order does not
// depend on the thread count.
DatasetScores ScoreDataset(const std::vector<Story>& stories, const ScoringContext& context);

struct ReportWriteOptions {
  bool verbose = false;  // include per-noun, per-pair and redundancy breakdowns
  bool raw_vg = false;   // include the unscaled grounding score
};

// One JSON object per report line, then a {"summary": ...} line with corpus
// means and the error list.
void WriteReports(std::ostream& out, const DatasetScores& scores,
                  const ReportWriteOptions& options = {});

// Reads report lines back (the summary line is skipped).
std::vector<ScoreReport> LoadReports(const std::filesystem::path& path);

}  // namespace rovist
