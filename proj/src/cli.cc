#include "rovist/cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "rovist/coherence.h"
#include "rovist/corpus.h"
#include "rovist/errors.h"
#include "rovist/harness.h"
#include "rovist/nr.h"
#include "rovist/tagger.h"
#include "rovist/text_analysis.h"
#include "rovist/vg.h"
#include "rovist/vg_train.h"

namespace rovist::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kCacheDirEnv = "ROVIST_CACHE_DIR";

// Reads "key = value" lines ('#' comments) for --config.
std::vector<std::pair<std::string, std::string>> ReadConfigFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    s = s.substr(b, e - b + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    while (!key.empty() && key[0] == '-') key.erase(0, 1);
    entries.emplace_back(key, trim(t.substr(eq + 1)));
  }
  return entries;
}

// Splices --config entries into the argument list. Flags given on the
// command line win over the file.
std::vector<std::string> ExpandConfig(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::optional<fs::path> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (!config) return out;

  std::set<std::string> given;
  for (const auto& a : out) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') - 2));
  }
  for (const auto& [key, value] : ReadConfigFile(*config)) {
    if (given.count(key)) continue;
    if (value == "true") {
      out.push_back("--" + key);
    } else if (value != "false") {
      out.push_back("--" + key);
      out.push_back(value);
    }
  }
  return out;
}

void RequireFile(const std::string& flag, const std::string& path) {
  if (!fs::is_regular_file(path)) {
    throw ConfigError(flag + ": file not found: " + path);
  }
}

std::optional<fs::path> CacheFile(const char* name) {
  if (const char* dir = std::getenv(kCacheDirEnv)) {
    fs::path p = fs::path(dir) / name;
    if (fs::is_regular_file(p)) return p;
  }
  return std::nullopt;
}

std::unique_ptr<WordVectors> MakeWordVectors(const std::string& flag_value, std::size_t dim,
                                             std::ostream& err) {
  std::optional<fs::path> path;
  if (!flag_value.empty()) {
    RequireFile("--word-vectors", flag_value);
    path = flag_value;
  } else {
    path = CacheFile("word_vectors.txt");
  }
  if (!path) return std::make_unique<HashedWordVectors>(dim);
  auto table = std::make_unique<MapWordVectors>(MapWordVectors::FromTextFile(*path));
  if (table->dim() != dim) {
    throw ConfigError("word vectors in " + path->string() + " have " +
                      std::to_string(table->dim()) + " dims, expected " + std::to_string(dim));
  }
  err << "loaded " << table->size() << " word vectors from " << path->string() << '\n';
  return table;
}

std::unique_ptr<PosTagger> MakeTagger(const std::string& flag_value) {
  std::optional<fs::path> path;
  if (!flag_value.empty()) {
    RequireFile("--lexicon", flag_value);
    path = flag_value;
  } else {
    path = CacheFile("lexicon.tsv");
  }
  if (!path) return std::make_unique<HeuristicTagger>();
  return std::make_unique<DictionaryTagger>(DictionaryTagger::FromFile(*path));
}

// Writes to --out when given, otherwise to `out`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ConfigError("cannot write " + path);
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

struct ScoreFlags {
  std::string stories, regions, vg, coherence, out, idf_table, word_vectors, lexicon;
  std::vector<std::string> only;
  bool no_idf = false;
  bool raw_vg = false;
  bool verbose = false;
  std::size_t top_regions = 10;
  std::size_t ngram = kDefaultNgramSize;
  std::size_t jobs = 1;
};

int RunScore(const ScoreFlags& f, std::ostream& out, std::ostream& err) {
  bool want_vg = true, want_c = true, want_nr = true;
  if (!f.only.empty()) {
    want_vg = want_c = want_nr = false;
    for (const auto& part : f.only) {
      if (part == "vg") {
        want_vg = true;
      } else if (part == "c") {
        want_c = true;
      } else if (part == "nr") {
        want_nr = true;
      } else {
        throw ConfigError("--only: unknown scorer '" + part + "' (expected vg, c, nr)");
      }
    }
  }
  RequireFile("--stories", f.stories);
  if (want_vg) {
    if (f.regions.empty()) throw ConfigError("grounding scoring needs --regions");
    if (f.vg.empty()) throw ConfigError("grounding scoring needs --vg");
    RequireFile("--regions", f.regions);
    RequireFile("--vg", f.vg);
    if (!f.idf_table.empty()) RequireFile("--idf-table", f.idf_table);
  }
  if (want_c) {
    if (f.coherence.empty()) throw ConfigError("coherence scoring needs --c");
    RequireFile("--c", f.coherence);
  }
  if (f.top_regions == 0) throw ConfigError("--top-regions must be at least 1");
  if (f.ngram == 0) throw ConfigError("--ngram must be at least 1");
  if (f.jobs == 0) throw ConfigError("--jobs must be at least 1");

  const std::vector<Story> stories = LoadStories(f.stories);
  err << "loaded " << stories.size() << " stories\n";

  ScoringContext ctx;
  ctx.score_vg = want_vg;
  ctx.score_coherence = want_c;
  ctx.score_nr = want_nr;
  ctx.ngram = f.ngram;
  ctx.jobs = f.jobs;

  RegionIndex regions;
  std::optional<IdfTable> idf;
  std::optional<VgEncoderParams> params;
  std::unique_ptr<WordVectors> words;
  std::unique_ptr<PosTagger> tagger;
  std::unique_ptr<VisionBackend> vision;
  if (want_vg) {
    regions = LoadRegions(f.regions);
    params = VgEncoderParams::Load(f.vg);
    if (!f.no_idf) {
      idf = f.idf_table.empty() ? ComputeIdf(stories) : IdfTable::Load(f.idf_table);
    }
    words = MakeWordVectors(f.word_vectors, params->word_dim(), err);
    tagger = MakeTagger(f.lexicon);
    vision = std::make_unique<HashedVisionBackend>(params->feature_dim());
    ctx.regions = &regions;
    ctx.idf = idf ? &*idf : nullptr;
    ctx.vg_params = &*params;
    ctx.vg_backends = {tagger.get(), words.get(), vision.get()};
    ctx.vg_options = {f.top_regions, !f.no_idf};
  }
  std::optional<CoherenceModel> model;
  if (want_c) {
    model = CoherenceModel::Load(f.coherence);
    ctx.coherence_model = &*model;
  }

  const DatasetScores scores = ScoreDataset(stories, ctx);
  Sink sink(f.out, out);
  WriteReports(sink.stream(), scores, {f.verbose, f.raw_vg});

  for (const auto& e : scores.errors) {
    err << "error: story " << e.story_id << " (#" << e.index << "): " << e.message << '\n';
  }
  err << "scored " << scores.reports.size() << " of " << stories.size() << " stories\n";
  return scores.errors.empty() ? kExitOk : kExitItemFailures;
}

struct TrainVgFlags {
  std::string pairs, out, word_vectors;
  VgTrainConfig config;
  std::size_t vision_dim = kVisionFeatureDim;
};

int RunTrainVg(const TrainVgFlags& f, std::ostream& err) {
  RequireFile("--pairs", f.pairs);
  f.config.Validate();
  const auto pairs = LoadEntityRegionPairs(f.pairs);
  err << "loaded " << pairs.size() << " entity-region pairs\n";
  auto words = MakeWordVectors(f.word_vectors, kWordVectorDim, err);
  HashedVisionBackend vision(f.vision_dim);
  const VgTrainResult result = TrainVg(pairs, *words, &vision, f.config);
  if (result.skipped_out_of_vocabulary) {
    err << "skipped " << result.skipped_out_of_vocabulary << " out-of-vocabulary pairs\n";
  }
  err << "initial train loss " << result.history.initial_train_loss << '\n';
  for (std::size_t e = 0; e < result.history.train_loss.size(); ++e) {
    err << "epoch " << e + 1 << " train " << result.history.train_loss[e] << " validation "
        << result.history.validation_loss[e] << '\n';
  }
  err << "keeping epoch " << result.history.best_epoch << '\n';
  result.params.Save(f.out);
  return kExitOk;
}

struct TrainCFlags {
  std::string sop, out;
  CoherenceTrainConfig config;
  std::size_t pooled_dim = 256;
  std::size_t max_length = 128;
};

int RunTrainC(const TrainCFlags& f, std::ostream& err) {
  RequireFile("--sop", f.sop);
  f.config.Validate();
  const auto examples = LoadSopDataset(f.sop);
  err << "loaded " << examples.size() << " SOP examples\n";
  auto backend = std::make_shared<HashedPairEncoder>(f.pooled_dim, f.max_length);
  const CoherenceTrainResult result = TrainCoherence(examples, backend, f.config);
  err << "backend " << backend->id() << '\n';
  err << "initial train loss " << result.history.initial_train_loss << '\n';
  for (std::size_t e = 0; e < result.history.train_loss.size(); ++e) {
    err << "epoch " << e + 1 << " train " << result.history.train_loss[e] << " validation "
        << result.history.validation_loss[e] << '\n';
  }
  err << "keeping epoch " << result.history.best_epoch << ", validation accuracy "
      << result.validation_accuracy << '\n';
  result.model.Save(f.out);
  return kExitOk;
}

int RunBuildIdf(const std::string& stories_path, const std::string& out_path, std::ostream& err) {
  RequireFile("--stories", stories_path);
  const IdfTable table = ComputeIdf(LoadStories(stories_path));
  table.Save(out_path);
  err << "idf over " << table.story_count() << " stories, " << table.doc_freq().size()
      << " tokens\n";
  return kExitOk;
}

int RunBuildSop(const std::string& stories_path, const std::string& out_path,
                std::uint64_t seed, std::ostream& err) {
  RequireFile("--stories", stories_path);
  const auto examples = BuildSopDataset(LoadStories(stories_path), seed);
  WriteSopDataset(out_path, examples);
  err << "sentence pairs " << examples.size() / 2 << ", examples " << examples.size()
      << " (with swapped negatives)\n";
  return kExitOk;
}

struct CorrelateFlags {
  std::string reports, judgments, criterion = "overall";
  bool by_votes = false;
  int likert_min = 1;
  int likert_max = 5;
};

void PrintCorrelationHeader(std::ostream& out) {
  out << std::left << std::setw(16) << "criterion" << std::right << std::setw(6) << "n"
      << std::setw(10) << "spearman" << std::setw(10) << "pearson" << std::setw(10) << "kendall"
      << '\n';
}

void PrintCorrelationRow(std::ostream& out, std::string_view name, std::size_t n, double rho,
                         double r, double tau) {
  out << std::left << std::setw(16) << name << std::right << std::setw(6) << n << std::fixed
      << std::setprecision(4) << std::setw(10) << rho << std::setw(10) << r << std::setw(10)
      << tau << '\n';
  out.unsetf(std::ios::floatfield);
}

int RunCorrelate(const CorrelateFlags& f, std::ostream& out) {
  RequireFile("--judgments", f.judgments);
  std::vector<Criterion> criteria;
  if (f.criterion == "all") {
    criteria.assign(std::begin(kAllCriteria), std::end(kAllCriteria));
  } else {
    criteria.push_back(ParseCriterion(f.criterion));
  }
  const auto judgments = LoadJudgments(f.judgments, {f.likert_min, f.likert_max});

  if (f.by_votes) {
    const auto table = RankCorrelationByVotes(judgments);
    PrintCorrelationHeader(out);
    for (Criterion c : criteria) {
      const auto& row = table.at(c);
      PrintCorrelationRow(out, CriterionName(c), row.sequences, row.spearman, row.pearson,
                          row.kendall);
    }
    return kExitOk;
  }

  if (f.reports.empty()) throw ConfigError("correlate needs --reports (or --by-votes)");
  RequireFile("--reports", f.reports);
  const auto reports = LoadReports(f.reports);
  PrintCorrelationHeader(out);
  for (Criterion c : criteria) {
    const CorrelationResult r = CorrelateWithHumans(reports, judgments, c);
    PrintCorrelationRow(out, CriterionName(c), r.sample_size, r.spearman, r.pearson, r.kendall);
  }
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  try {
    args = ExpandConfig(raw_args);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  CLI::App app{"rovist: reference-free visual storytelling evaluation"};
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  app.require_subcommand(1);
  app.add_option("--config", "Flat key = value file of flag defaults (flags override it)");
  app.footer(std::string("Environment: ") + kCacheDirEnv +
             " names a directory searched for word_vectors.txt and lexicon.tsv when "
             "--word-vectors / --lexicon are not given.");

  ScoreFlags score;
  auto* score_cmd = app.add_subcommand("score", "Score stories and write a report");
  score_cmd->add_option("--stories", score.stories, "Story file (JSONL)")->required();
  score_cmd->add_option("--regions", score.regions, "Region proposal file (JSONL)");
  score_cmd->add_option("--vg", score.vg, "Grounding encoder archive from train-vg");
  score_cmd->add_option("--c", score.coherence, "Coherence model from train-c");
  score_cmd->add_option("--out", score.out, "Report file (default: standard output)");
  score_cmd->add_option("--only", score.only, "Subset of scorers: vg,c,nr")->delimiter(',');
  auto* no_idf = score_cmd->add_flag("--no-idf", score.no_idf, "Disable idf weighting of nouns");
  score_cmd->add_option("--idf-table", score.idf_table,
                        "Prebuilt idf table (default: computed over the scored stories)")
      ->excludes(no_idf);
  score_cmd->add_flag("--raw-vg", score.raw_vg, "Also emit the unscaled grounding score");
  score_cmd->add_option("--top-regions", score.top_regions, "Regions kept per image")
      ->capture_default_str();
  score_cmd->add_option("--ngram", score.ngram, "n-gram size for intra-sentence repetition")
      ->capture_default_str();
  score_cmd->add_flag("--verbose", score.verbose, "Include per-item diagnostics in the report");
  score_cmd->add_option("--jobs", score.jobs, "Stories scored in parallel")->capture_default_str();
  score_cmd->add_option("--word-vectors", score.word_vectors,
                        "GloVe text file (default: hashed stub vectors)");
  score_cmd->add_option("--lexicon", score.lexicon,
                        "word<TAB>TAG lexicon for noun extraction (default: built-in tagger)");

  TrainVgFlags train_vg;
  auto* vg_cmd = app.add_subcommand("train-vg", "Train the grounding dual encoder");
  vg_cmd->add_option("--pairs", train_vg.pairs, "Entity-region pair file (JSONL)")->required();
  vg_cmd->add_option("--out", train_vg.out, "Output archive")->required();
  vg_cmd->add_option("--lr", train_vg.config.learning_rate, "Initial learning rate")
      ->capture_default_str();
  vg_cmd->add_option("--batch", train_vg.config.batch_size, "Mini-batch size")
      ->capture_default_str();
  vg_cmd->add_option("--patience", train_vg.config.patience, "Early-stopping patience (epochs)")
      ->capture_default_str();
  vg_cmd->add_option("--epochs", train_vg.config.max_epochs, "Maximum epochs")
      ->capture_default_str();
  vg_cmd->add_option("--weight-decay", train_vg.config.weight_decay, "L2 weight decay")
      ->capture_default_str();
  vg_cmd->add_option("--lr-decay", train_vg.config.lr_decay, "Per-epoch learning-rate decay")
      ->capture_default_str();
  vg_cmd->add_option("--embed-dim", train_vg.config.embed_dim, "Joint embedding size")
      ->capture_default_str();
  vg_cmd->add_option("--seed", train_vg.config.seed, "Seed for init, split and shuffling")
      ->capture_default_str();
  vg_cmd->add_option("--word-vectors", train_vg.word_vectors,
                     "GloVe text file (default: hashed stub vectors)");
  vg_cmd->add_option("--vision-dim", train_vg.vision_dim,
                     "Feature size of the stub vision backend for crop payloads")
      ->capture_default_str();

  TrainCFlags train_c;
  auto* c_cmd = app.add_subcommand("train-c", "Train the sentence-order coherence head");
  c_cmd->add_option("--sop", train_c.sop, "SOP example file from build-sop")->required();
  c_cmd->add_option("--out", train_c.out, "Output model artifact")->required();
  c_cmd->add_option("--lr", train_c.config.learning_rate, "Initial learning rate")
      ->capture_default_str();
  c_cmd->add_option("--batch", train_c.config.batch_size, "Mini-batch size")
      ->capture_default_str();
  c_cmd->add_option("--patience", train_c.config.patience, "Early-stopping patience (epochs)")
      ->capture_default_str();
  c_cmd->add_option("--epochs", train_c.config.max_epochs, "Maximum epochs")
      ->capture_default_str();
  c_cmd->add_option("--weight-decay", train_c.config.weight_decay, "L2 weight decay")
      ->capture_default_str();
  c_cmd->add_option("--lr-decay", train_c.config.lr_decay, "Per-epoch learning-rate decay")
      ->capture_default_str();
  c_cmd->add_option("--seed", train_c.config.seed, "Seed for init, split and shuffling")
      ->capture_default_str();
  c_cmd->add_option("--pooled-dim", train_c.pooled_dim, "Pooled size of the stub backend")
      ->capture_default_str();
  c_cmd->add_option("--max-length", train_c.max_length, "Maximum formatted pair length")
      ->capture_default_str();

  std::string idf_stories, idf_out;
  auto* idf_cmd = app.add_subcommand("build-idf", "Compute a story-level idf table");
  idf_cmd->add_option("--stories", idf_stories, "Story file (JSONL)")->required();
  idf_cmd->add_option("--out", idf_out, "Output table (JSON)")->required();

  std::string sop_stories, sop_out;
  std::uint64_t sop_seed = 0;
  auto* sop_cmd = app.add_subcommand("build-sop", "Build sentence-order training examples");
  sop_cmd->add_option("--stories", sop_stories, "Story file (JSONL)")->required();
  sop_cmd->add_option("--out", sop_out, "Output SOP file (JSONL)")->required();
  sop_cmd->add_option("--seed", sop_seed, "Shuffle seed")->capture_default_str();

  CorrelateFlags corr;
  auto* corr_cmd = app.add_subcommand("correlate", "Correlate reports with human judgments");
  corr_cmd->add_option("--reports", corr.reports, "Report file from score");
  corr_cmd->add_option("--judgments", corr.judgments, "Human judgment file (JSONL)")->required();
  corr_cmd->add_option("--criterion", corr.criterion,
                       "grounding, coherence, non_redundancy, overall or all")
      ->capture_default_str();
  corr_cmd->add_flag("--by-votes", corr.by_votes,
                     "Correlate human criterion scores with vote rankings instead");
  corr_cmd->add_option("--likert-min", corr.likert_min, "Lowest Likert score")
      ->capture_default_str();
  corr_cmd->add_option("--likert-max", corr.likert_max, "Highest Likert score")
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*score_cmd) return RunScore(score, out, err);
    if (*vg_cmd) return RunTrainVg(train_vg, err);
    if (*c_cmd) return RunTrainC(train_c, err);
    if (*idf_cmd) return RunBuildIdf(idf_stories, idf_out, err);
    if (*sop_cmd) return RunBuildSop(sop_stories, sop_out, sop_seed, err);
    if (*corr_cmd) return RunCorrelate(corr, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitConfigError;
}

int RunMain(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return Run(args, std::cout, std::cerr);
}

}  // namespace rovist::cli
