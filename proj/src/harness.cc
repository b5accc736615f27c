#include "rovist/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <thread>

#include <json.hpp>

#include "rovist/errors.h"

namespace rovist {
namespace {

void CheckSample(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InputError("correlation inputs differ in length (" + std::to_string(x.size()) +
                     " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw InputError("correlation needs at least two points");
}

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double Pearson(std::span<const double> x, std::span<const double> y) {
  CheckSample(x, y);
  const double mx = Mean(x);
  const double my = Mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelationError("correlation undefined: an input has zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> MidRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the mean 1-based rank.
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Spearman(std::span<const double> x, std::span<const double> y) {
  CheckSample(x, y);
  const std::vector<double> rx = MidRanks(x);
  const std::vector<double> ry = MidRanks(y);
  return Pearson(rx, ry);
}

double Kendall(std::span<const double> x, std::span<const double> y) {
  CheckSample(x, y);
  const std::size_t n = x.size();
  long long concordant = 0, discordant = 0, tied_x = 0, tied_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool tx = x[i] == x[j];
      const bool ty = y[i] == y[j];
      if (tx) ++tied_x;
      if (ty) ++tied_y;
      if (tx || ty) continue;
      if ((x[i] < x[j]) == (y[i] < y[j])) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const auto n0 = static_cast<long long>(n * (n - 1) / 2);
  const double denom =
      std::sqrt(static_cast<double>(n0 - tied_x) * static_cast<double>(n0 - tied_y));
  if (denom == 0.0) {
    throw UndefinedCorrelationError("Kendall tau undefined: an input is constant");
  }
  return static_cast<double>(concordant - discordant) / denom;
}

CorrelationResult Correlate(std::span<const double> x, std::span<const double> y) {
  return {Spearman(x, y), Pearson(x, y), Kendall(x, y), x.size()};
}

Criterion ParseCriterion(std::string_view name) {
  for (Criterion c : kAllCriteria) {
    if (CriterionName(c) == name) return c;
  }
  throw ConfigError("unknown criterion '" + std::string(name) +
                    "' (expected grounding, coherence, non_redundancy or overall)");
}

std::string_view CriterionName(Criterion c) {
  switch (c) {
    case Criterion::kGrounding: return "grounding";
    case Criterion::kCoherence: return "coherence";
    case Criterion::kNonRedundancy: return "non_redundancy";
    case Criterion::kOverall: return "overall";
  }
  return "overall";
}

namespace {

using JoinKey = std::pair<std::string, std::string>;  // (story_id, model_id)

struct HumanMeans {
  double grounding = 0.0;
  double coherence = 0.0;
  double non_redundancy = 0.0;
  std::size_t annotators = 0;
  std::size_t votes = 0;

  double Get(Criterion c) const {
    switch (c) {
      case Criterion::kGrounding: return grounding;
      case Criterion::kCoherence: return coherence;
      case Criterion::kNonRedundancy: return non_redundancy;
      case Criterion::kOverall: return grounding + coherence + non_redundancy;
    }
    return 0.0;
  }
};

std::map<JoinKey, HumanMeans> AverageJudgments(const std::vector<HumanJudgment>& judgments) {
  std::map<JoinKey, HumanMeans> means;
  for (const auto& j : judgments) {
    HumanMeans& m = means[{j.story_id, j.model_id}];
    m.grounding += j.grounding;
    m.coherence += j.coherence;
    m.non_redundancy += j.non_redundancy;
    m.annotators += 1;
    m.votes += j.voted_best ? 1 : 0;
  }
  for (auto& [key, m] : means) {
    const double n = static_cast<double>(m.annotators);
    m.grounding /= n;
    m.coherence /= n;
    m.non_redundancy /= n;
  }
  return means;
}

std::optional<double> MetricFor(const ScoreReport& r, Criterion c) {
  switch (c) {
    case Criterion::kGrounding: return r.vg_scaled;
    case Criterion::kCoherence: return r.coherence;
    case Criterion::kNonRedundancy: return r.nr;
    case Criterion::kOverall: return r.total;
  }
  return std::nullopt;
}

}  // namespace

CorrelationResult CorrelateWithHumans(const std::vector<ScoreReport>& reports,
                                      const std::vector<HumanJudgment>& judgments,
                                      Criterion criterion) {
  const auto means = AverageJudgments(judgments);
  std::vector<double> metric, human;
  std::vector<std::string> unmatched, incomplete;
  for (const auto& r : reports) {
    auto it = means.find({r.story_id, r.model_id});
    if (it == means.end()) {
      unmatched.push_back("(" + r.story_id + ", " + r.model_id + ")");
      continue;
    }
    const auto value = MetricFor(r, criterion);
    if (!value) {
      incomplete.push_back("(" + r.story_id + ", " + r.model_id + ")");
      continue;
    }
    metric.push_back(*value);
    human.push_back(it->second.Get(criterion));
  }
  auto join = [](const std::vector<std::string>& keys) {
    std::string s;
    for (const auto& k : keys) s += (s.empty() ? "" : ", ") + k;
    return s;
  };
  if (!unmatched.empty()) throw Error("reports without human judgments: " + join(unmatched));
  if (!incomplete.empty()) {
    throw Error("reports lacking the " + std::string(CriterionName(criterion)) +
                " metric: " + join(incomplete));
  }
  return Correlate(metric, human);
}

std::map<Criterion, VoteRankCorrelation> RankCorrelationByVotes(
    const std::vector<HumanJudgment>& judgments) {
  const auto means = AverageJudgments(judgments);
  std::map<std::string, std::vector<const HumanMeans*>> sequences;
  for (const auto& [key, m] : means) sequences[key.first].push_back(&m);

  std::map<Criterion, VoteRankCorrelation> out;
  for (Criterion c : kAllCriteria) out[c] = {};

  for (const auto& [story_id, models] : sequences) {
    if (models.size() < 2) {
      throw Error("photo sequence " + story_id + " has judgments for fewer than two models");
    }
    std::size_t total_votes = 0;
    for (const auto* m : models) total_votes += m->votes;
    if (total_votes == 0) throw Error("photo sequence " + story_id + " received no votes");

    std::vector<double> share;
    for (const auto* m : models) {
      share.push_back(static_cast<double>(m->votes) / static_cast<double>(total_votes));
    }
    const std::vector<double> ranking = MidRanks(share);

    for (Criterion c : kAllCriteria) {
      std::vector<double> scores;
      for (const auto* m : models) scores.push_back(m->Get(c));
      VoteRankCorrelation& acc = out[c];
      try {
        const CorrelationResult r = Correlate(scores, ranking);
        acc.spearman += r.spearman;
        acc.pearson += r.pearson;
        acc.kendall += r.kendall;
        ++acc.sequences;
      } catch (const UndefinedCorrelationError&) {
        ++acc.skipped_sequences;
      }
    }
  }

  for (auto& [c, acc] : out) {
    if (acc.sequences == 0) {
      throw UndefinedCorrelationError("no photo sequence yields a defined " +
                                      std::string(CriterionName(c)) + " correlation");
    }
    const double n = static_cast<double>(acc.sequences);
    acc.spearman /= n;
    acc.pearson /= n;
    acc.kendall /= n;
  }
  return out;
}

ScoreReport ScoreStory(const Story& story, const ScoringContext& context) {
  ScoreReport report;
  report.story_id = story.story_id;
  report.model_id = story.model_id;

  if (context.score_vg) {
    if (!context.regions || !context.vg_params) {
      throw ConfigError("grounding scoring needs regions and encoder parameters");
    }
    GroundingScore g = VgScore(story, *context.regions, context.idf, *context.vg_params,
                               context.vg_backends, context.vg_options);
    report.vg_scaled = g.scaled;
    report.vg_raw = g.raw;
    report.grounding_detail = std::move(g);
  }
  if (context.score_coherence) {
    if (!context.coherence_model) throw ConfigError("coherence scoring needs a model");
    CoherenceScore c = ScoreCoherence(story, *context.coherence_model);
    report.coherence = c.score;
    report.coherence_detail = std::move(c);
  }
  if (context.score_nr) {
    RedundancyBreakdown b = NrScore(story, context.ngram);
    report.nr = b.final_score;
    report.redundancy_detail = std::move(b);
  }
  if (report.vg_scaled && report.coherence && report.nr) {
    report.total = RovistTotal(*report.vg_scaled, *report.coherence, *report.nr);
  }
  return report;
}

DatasetScores ScoreDataset(const std::vector<Story>& stories, const ScoringContext& context) {
  std::vector<std::optional<ScoreReport>> slots(stories.size());
  std::vector<std::optional<std::string>> failures(stories.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < stories.size(); i = next++) {
      try {
        slots[i] = ScoreStory(stories[i], context);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(context.jobs, 1, std::max<std::size_t>(1, stories.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }

  DatasetScores out;
  for (std::size_t i = 0; i < stories.size(); ++i) {
    if (slots[i]) {
      out.reports.push_back(std::move(*slots[i]));
    } else {
      out.errors.push_back({i, stories[i].story_id, stories[i].model_id, *failures[i]});
    }
  }
  return out;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson OptionalNumber(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson Diagnostics(const ScoreReport& r) {
  ojson d = ojson::object();
  if (r.grounding_detail) {
    const auto& g = *r.grounding_detail;
    ojson nouns = ojson::array();
    for (const auto& n : g.per_noun) {
      ojson e;
      e["noun"] = n.noun;
      e["sentence"] = n.sentence_index;
      if (n.out_of_vocabulary) {
        e["out_of_vocabulary"] = true;
      } else {
        e["region"] = n.best_region;
        e["cosine"] = n.cosine;
        e["idf"] = n.idf_weight;
        e["weighted"] = n.weighted;
      }
      nouns.push_back(std::move(e));
    }
    d["grounding"] = {{"raw", g.raw},
                      {"no_nouns", g.no_nouns},
                      {"skipped_out_of_vocabulary", g.skipped_out_of_vocabulary},
                      {"nouns", std::move(nouns)}};
  }
  if (r.coherence_detail) {
    ojson pairs = ojson::array();
    for (const auto& p : r.coherence_detail->pairs) pairs.push_back(p.p_hat);
    d["coherence"] = {{"degenerate", r.coherence_detail->degenerate},
                      {"pair_probabilities", std::move(pairs)}};
  }
  if (r.redundancy_detail) {
    const auto& b = *r.redundancy_detail;
    ojson pairs = ojson::array();
    for (const auto& p : b.pair_scores) pairs.push_back({p.first, p.second, p.value});
    ojson intra = ojson::array();
    for (const auto& p : b.intra_scores) intra.push_back({p.sentence, p.ngram, p.value});
    d["redundancy"] = {{"inter", b.inter},
                       {"intra", b.intra},
                       {"no_sentence_pairs", b.no_sentence_pairs},
                       {"no_ngram_pairs", b.no_ngram_pairs},
                       {"sentence_pairs", std::move(pairs)},
                       {"ngram_pairs", std::move(intra)}};
  }
  return d;
}

}  // namespace

void WriteReports(std::ostream& out, const DatasetScores& scores,
                  const ReportWriteOptions& options) {
  struct Sum {
    double total = 0.0;
    std::size_t count = 0;
    void Add(const std::optional<double>& v) {
      if (v) {
        total += *v;
        ++count;
      }
    }
    ojson Mean() const { return count ? ojson(total / static_cast<double>(count)) : ojson(nullptr); }
  } vg, coherence, nr, total;

  for (const auto& r : scores.reports) {
    ojson j;
    j["story_id"] = r.story_id;
    j["model_id"] = r.model_id;
    j["vg_scaled"] = OptionalNumber(r.vg_scaled);
    if (options.raw_vg) j["vg_raw"] = OptionalNumber(r.vg_raw);
    j["coherence"] = OptionalNumber(r.coherence);
    j["nr"] = OptionalNumber(r.nr);
    j["total"] = OptionalNumber(r.total);
    if (options.verbose) j["diagnostics"] = Diagnostics(r);
    out << j.dump() << '\n';
    vg.Add(r.vg_scaled);
    coherence.Add(r.coherence);
    nr.Add(r.nr);
    total.Add(r.total);
  }

  ojson errors = ojson::array();
  for (const auto& e : scores.errors) {
    errors.push_back({{"index", e.index},
                      {"story_id", e.story_id},
                      {"model_id", e.model_id},
                      {"message", e.message}});
  }
  ojson summary;
  summary["stories"] = scores.reports.size() + scores.errors.size();
  summary["scored"] = scores.reports.size();
  summary["means"] = {{"vg_scaled", vg.Mean()},
                      {"coherence", coherence.Mean()},
                      {"nr", nr.Mean()},
                      {"total", total.Mean()}};
  summary["errors"] = std::move(errors);
  ojson line;
  line["summary"] = std::move(summary);
  out << line.dump() << '\n';
}

std::vector<ScoreReport> LoadReports(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<ScoreReport> reports;
  std::string line;
  std::size_t line_no = 0;
  auto number = [&](const nlohmann::json& j, const char* field) -> std::optional<double> {
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw SchemaError(path.string(), line_no, field, "expected a number");
    return it->get<double>();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(path.string(), line_no, "<record>", e.what());
    }
    if (j.contains("summary")) continue;
    if (!j.contains("story_id") || !j["story_id"].is_string()) {
      throw SchemaError(path.string(), line_no, "story_id", "expected a string");
    }
    ScoreReport r;
    r.story_id = j["story_id"].get<std::string>();
    if (j.contains("model_id") && j["model_id"].is_string()) {
      r.model_id = j["model_id"].get<std::string>();
    }
    r.vg_scaled = number(j, "vg_scaled");
    r.vg_raw = number(j, "vg_raw");
    r.coherence = number(j, "coherence");
    r.nr = number(j, "nr");
    r.total = number(j, "total");
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace rovist
