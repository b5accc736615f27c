#include "rovist/text_analysis.h"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "rovist/errors.h"

namespace rovist {
namespace {

bool IsWordByte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

const std::unordered_set<std::string>& Stopwords() {
  // NLTK English list plus the clitic tokens produced by Tokenize().
  static const std::unordered_set<std::string> words = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours",
      "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers",
      "herself", "it", "its", "itself", "they", "them", "their", "theirs", "themselves",
      "what", "which", "who", "whom", "this", "that", "these", "those", "am", "is", "are",
      "was", "were", "be", "been", "being", "have", "has", "had", "having", "do", "does",
      "did", "doing", "a", "an", "the", "and", "but", "if", "or", "because", "as", "until",
      "while", "of", "at", "by", "for", "with", "about", "against", "between", "into",
      "through", "during", "before", "after", "above", "below", "to", "from", "up", "down",
      "in", "out", "on", "off", "over", "under", "again", "further", "then", "once", "here",
      "there", "when", "where", "why", "how", "all", "any", "both", "each", "few", "more",
      "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so",
      "than", "too", "very", "s", "t", "can", "will", "just", "don", "should", "now", "d",
      "ll", "m", "o", "re", "ve", "y", "ain", "aren", "couldn", "didn", "doesn", "hadn",
      "hasn", "haven", "isn", "ma", "mightn", "mustn", "needn", "shan", "shouldn", "wasn",
      "weren", "won", "wouldn", "n't", "'s", "'re", "'ve", "'ll", "'d", "'m"};
  return words;
}

constexpr std::string_view kClitics[] = {"s", "re", "ve", "ll", "d", "m"};

}  // namespace

std::vector<std::string> Tokenize(std::string_view sentence) {
  // Fold the typographic apostrophe (U+2019) into ASCII first.
  std::string text;
  text.reserve(sentence.size());
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (sentence.substr(i, 3) == "\xE2\x80\x99") {
      text += '\'';
      i += 2;
    } else {
      text += sentence[i];
    }
  }

  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) tokens.push_back(std::move(word));
    word.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      flush();
      continue;
    }
    if (IsWordByte(c)) {
      word += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
      continue;
    }
    if (c == '\'') {
      std::size_t j = i + 1;
      std::string rest;
      while (j < text.size() && IsWordByte(static_cast<unsigned char>(text[j]))) {
        rest += static_cast<char>(std::tolower(static_cast<unsigned char>(text[j])));
        ++j;
      }
      if (!word.empty() && word.back() == 'n' && rest == "t") {
        word.pop_back();
        flush();
        tokens.emplace_back("n't");
        i = j - 1;
        continue;
      }
      bool clitic = false;
      for (std::string_view cl : kClitics) clitic = clitic || rest == cl;
      if (!word.empty() && clitic) {
        flush();
        tokens.push_back("'" + rest);
        i = j - 1;
        continue;
      }
    }
    flush();
    tokens.emplace_back(1, static_cast<char>(c));
  }
  flush();
  return tokens;
}

bool IsPunctuation(std::string_view token) {
  for (unsigned char c : token) {
    if (IsWordByte(c)) return false;
  }
  return true;
}

std::vector<std::string> WordTokens(std::string_view sentence) {
  std::vector<std::string> words;
  for (auto& t : Tokenize(sentence)) {
    if (!IsPunctuation(t)) words.push_back(std::move(t));
  }
  return words;
}

bool IsStopword(std::string_view token) { return Stopwords().count(std::string(token)) > 0; }

namespace {
constexpr std::pair<std::string_view, PosTag> kTagNames[] = {
    {"NOUN", PosTag::kNoun},         {"PROPN", PosTag::kProperNoun},
    {"VERB", PosTag::kVerb},         {"ADJ", PosTag::kAdjective},
    {"ADV", PosTag::kAdverb},        {"PRON", PosTag::kPronoun},
    {"DET", PosTag::kDeterminer},    {"ADP", PosTag::kAdposition},
    {"CONJ", PosTag::kConjunction},  {"AUX", PosTag::kAuxiliary},
    {"PART", PosTag::kParticle},     {"NUM", PosTag::kNumeral},
    {"PUNCT", PosTag::kPunctuation}, {"X", PosTag::kOther},
};
}  // namespace

PosTag ParsePosTag(std::string_view name) {
  for (const auto& [n, tag] : kTagNames) {
    if (n == name) return tag;
  }
  throw ConfigError("unknown part-of-speech tag '" + std::string(name) + "'");
}

std::string_view PosTagName(PosTag tag) {
  for (const auto& [n, t] : kTagNames) {
    if (t == tag) return n;
  }
  return "X";
}

std::vector<std::string> NounMention::Tokens() const {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find(' ', start);
    if (end == std::string::npos) end = text.size();
    if (end > start) out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::vector<NounMention> ExtractNouns(std::string_view sentence, const PosTagger& tagger,
                                      std::size_t sentence_index) {
  const std::vector<std::string> tokens = Tokenize(sentence);
  if (tokens.empty()) return {};
  const std::vector<PosTag> tags = tagger.Tag(tokens);
  if (tags.size() != tokens.size()) {
    throw BackendError("tagger returned " + std::to_string(tags.size()) + " tags for " +
                       std::to_string(tokens.size()) + " tokens");
  }

  std::vector<NounMention> mentions;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!IsNounTag(tags[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < tokens.size() && IsNounTag(tags[end])) ++end;

    NounMention mention;
    mention.token_begin = i;
    mention.token_end = end;
    mention.sentence_index = sentence_index;
    for (std::size_t k = i; k < end; ++k) {
      if (IsStopword(tokens[k]) || IsPunctuation(tokens[k])) continue;
      if (!mention.text.empty()) mention.text += ' ';
      mention.text += tokens[k];
    }
    if (!mention.text.empty()) mentions.push_back(std::move(mention));
    i = end;
  }
  return mentions;
}

IdfTable::IdfTable(std::size_t story_count, std::map<std::string, std::size_t> doc_freq)
    : story_count_(story_count), doc_freq_(std::move(doc_freq)) {
  if (story_count_ == 0) throw ConfigError("idf table needs at least one story");
  for (const auto& [token, df] : doc_freq_) {
    if (df > story_count_) {
      throw ConfigError("df('" + token + "') = " + std::to_string(df) + " exceeds N = " +
                        std::to_string(story_count_));
    }
  }
}

std::size_t IdfTable::DocFreq(const std::string& token) const {
  auto it = doc_freq_.find(token);
  return it == doc_freq_.end() ? 0 : it->second;
}

double IdfTable::Idf(const std::string& token) const {
  return std::log(static_cast<double>(story_count_) /
                  (1.0 + static_cast<double>(DocFreq(token))));
}

void IdfTable::Save(const std::filesystem::path& path) const {
  nlohmann::ordered_json j;
  j["N"] = story_count_;
  j["df"] = nlohmann::ordered_json::object();
  for (const auto& [token, df] : doc_freq_) j["df"][token] = df;
  std::ofstream out(path);
  if (!out) throw Error("cannot write idf table to " + path.string());
  out << j.dump() << '\n';
}

IdfTable IdfTable::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open idf table " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string(), 0, "", e.what());
  }
  if (!j.contains("N") || !j["N"].is_number_unsigned()) {
    throw SchemaError(path.string(), 0, "N", "expected a positive integer");
  }
  if (!j.contains("df") || !j["df"].is_object()) {
    throw SchemaError(path.string(), 0, "df", "expected an object of token counts");
  }
  std::map<std::string, std::size_t> df;
  for (const auto& [token, count] : j["df"].items()) {
    if (!count.is_number_unsigned()) {
      throw SchemaError(path.string(), 0, "df." + token, "expected a non-negative integer");
    }
    df[token] = count.get<std::size_t>();
  }
  return IdfTable(j["N"].get<std::size_t>(), std::move(df));
}

IdfTable ComputeIdf(const std::vector<Story>& stories) {
  if (stories.empty()) throw ConfigError("cannot compute idf over an empty story list");
  std::map<std::string, std::size_t> df;
  for (const Story& story : stories) {
    std::set<std::string> seen;
    for (const auto& sentence : story.sentences) {
      for (auto& token : WordTokens(sentence)) seen.insert(std::move(token));
    }
    for (const auto& token : seen) ++df[token];
  }
  return IdfTable(stories.size(), std::move(df));
}

std::vector<std::vector<std::string>> SplitNgrams(const std::vector<std::string>& tokens,
                                                  std::size_t n) {
  if (n == 0) throw ConfigError("n-gram size must be at least 1");
  std::vector<std::vector<std::string>> grams;
  for (std::size_t i = 0; i < tokens.size(); i += n) {
    const std::size_t end = std::min(tokens.size(), i + n);
    grams.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                       tokens.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return grams;
}

std::vector<std::vector<std::string>> SplitNgrams(std::string_view sentence, std::size_t n) {
  return SplitNgrams(Tokenize(sentence), n);
}

}  // namespace rovist
