#include "rovist/tagger.h"

#include <cctype>
#include <fstream>
#include <sstream>

#include "rovist/errors.h"

namespace rovist {

DictionaryTagger::DictionaryTagger(std::unordered_map<std::string, PosTag> lexicon,
                                   PosTag fallback)
    : lexicon_(std::move(lexicon)), fallback_(fallback) {}

DictionaryTagger DictionaryTagger::FromFile(const std::filesystem::path& path, PosTag fallback) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon " + path.string());
  std::unordered_map<std::string, PosTag> lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string word, tag;
    if (!(fields >> word >> tag)) {
      throw SchemaError(path.string(), line_no, "tag", "expected 'word<TAB>TAG'");
    }
    for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    try {
      lexicon[word] = ParsePosTag(tag);
    } catch (const ConfigError& e) {
      throw SchemaError(path.string(), line_no, "tag", e.what());
    }
  }
  return DictionaryTagger(std::move(lexicon), fallback);
}

std::vector<PosTag> DictionaryTagger::Tag(const std::vector<std::string>& tokens) const {
  std::vector<PosTag> tags;
  tags.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (IsPunctuation(token)) {
      tags.push_back(PosTag::kPunctuation);
      continue;
    }
    auto it = lexicon_.find(token);
    tags.push_back(it == lexicon_.end() ? fallback_ : it->second);
  }
  return tags;
}

namespace {

void AddWords(std::unordered_map<std::string, PosTag>& lexicon, PosTag tag,
              std::initializer_list<const char*> words) {
  for (const char* w : words) lexicon.emplace(w, tag);
}

bool EndsWith(const std::string& s, std::string_view suffix) {
  return s.size() > suffix.size() + 2 &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

HeuristicTagger::HeuristicTagger() {
  AddWords(lexicon_, PosTag::kPronoun,
           {"i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves", "you",
            "your", "yours", "yourself", "he", "him", "his", "himself", "she", "her", "hers",
            "herself", "it", "its", "itself", "they", "them", "their", "theirs", "themselves",
            "who", "whom", "whose", "what", "which", "someone", "everyone", "anyone", "nobody",
            "everybody", "somebody", "something", "everything", "anything", "nothing",
            "one"});
  AddWords(lexicon_, PosTag::kDeterminer,
           {"a", "an", "the", "this", "that", "these", "those", "some", "any", "each",
            "every", "all", "both", "no", "another", "either", "neither", "many", "much",
            "few", "several", "such", "other", "more", "most", "less", "least"});
  AddWords(lexicon_, PosTag::kAdposition,
           {"of", "in", "on", "at", "by", "for", "with", "about", "against", "between",
            "into", "through", "during", "before", "after", "above", "below", "to", "from",
            "up", "down", "out", "off", "over", "under", "around", "near", "behind",
            "across", "along", "inside", "outside", "onto", "toward", "towards", "upon",
            "within", "without", "among", "beside", "beyond", "past", "since", "like"});
  AddWords(lexicon_, PosTag::kConjunction,
           {"and", "but", "or", "nor", "so", "yet", "because", "although", "though", "if",
            "while", "when", "whenever", "where", "whereas", "unless", "until", "than",
            "as"});
  AddWords(lexicon_, PosTag::kAuxiliary,
           {"am", "is", "are", "was", "were", "be", "been", "being", "have", "has", "had",
            "having", "do", "does", "did", "can", "could", "will", "would", "shall", "should",
            "may", "might", "must", "ca", "wo", "'s", "'re", "'ve", "'ll", "'d", "'m"});
  AddWords(lexicon_, PosTag::kParticle, {"not", "n't", "'"});
  AddWords(lexicon_, PosTag::kAdverb,
           {"very", "too", "also", "just", "then", "now", "here", "there", "again", "once",
            "always", "never", "often", "sometimes", "soon", "already", "still", "even",
            "really", "finally", "later", "together", "away", "back", "well", "only", "ever",
            "almost", "quite", "today", "tonight", "yesterday", "tomorrow", "how", "why",
            "instead", "afterwards", "everywhere", "somewhere", "first", "next", "last"});
  AddWords(lexicon_, PosTag::kVerb,
           {"go", "went", "gone", "goes", "get", "got", "gets", "make", "made", "makes",
            "take", "took", "taken", "takes", "see", "saw", "seen", "sees", "come", "came",
            "comes", "know", "knew", "known", "think", "thought", "look", "looks", "want",
            "wanted", "give", "gave", "given", "find", "found", "tell", "told", "say",
            "said", "says", "feel", "felt", "leave", "left", "keep", "kept", "let", "begin",
            "began", "begun", "put", "puts", "run", "ran", "runs", "hit", "hits", "eat",
            "ate", "eaten", "eats", "drink", "drank", "sit", "sat", "stand", "stood", "buy",
            "bought", "bring", "brought", "meet", "met", "win", "won", "lose", "lost",
            "play", "plays", "love", "loves", "like", "likes", "enjoy", "enjoys", "visit",
            "visits", "watch", "watches", "wait", "hope", "need", "try", "tried", "show",
            "showed", "shown", "start", "stop", "help", "bring", "spend", "spent", "build",
            "built", "become", "became", "grew", "grow", "grown", "fell", "fall", "fly",
            "flew", "swim", "swam", "sing", "sang", "sang", "dance", "ride", "rode", "drive",
            "drove", "walk", "walks", "climb", "arrive", "arrived", "celebrate", "decide",
            "decided", "gather", "gathered", "pose", "posed", "smile", "smiled", "laugh",
            "laughed", "rain", "raining", "snow", "snowing", "wear", "wore", "worn",
            "hold", "held", "bought", "sold", "sell", "read", "wrote", "write", "written"});
  AddWords(lexicon_, PosTag::kAdjective,
           {"good", "great", "bad", "big", "small", "little", "large", "long", "short",
            "new", "old", "young", "happy", "sad", "beautiful", "pretty", "nice", "fun",
            "amazing", "awesome", "wonderful", "cute", "huge", "tiny", "high", "low", "hot",
            "cold", "warm", "cool", "red", "blue", "green", "yellow", "white", "black",
            "brown", "pink", "orange", "purple", "gray", "grey", "dark", "bright", "early",
            "late", "full", "empty", "busy", "quiet", "loud", "best", "better", "worst",
            "favorite", "excited", "tired", "ready", "sure", "own", "same", "different",
            "whole", "entire", "special", "perfect", "delicious", "lovely", "gorgeous",
            "proud", "glad", "fantastic", "incredible", "lucky", "ancient", "local",
            "tall"});
}

std::vector<PosTag> HeuristicTagger::Tag(const std::vector<std::string>& tokens) const {
  std::vector<PosTag> tags;
  tags.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (IsPunctuation(token)) {
      tags.push_back(PosTag::kPunctuation);
      continue;
    }
    if (auto it = lexicon_.find(token); it != lexicon_.end()) {
      tags.push_back(it->second);
      continue;
    }
    bool numeric = true;
    for (unsigned char c : token) numeric = numeric && std::isdigit(c);
    if (numeric) {
      tags.push_back(PosTag::kNumeral);
    } else if (EndsWith(token, "ly")) {
      tags.push_back(PosTag::kAdverb);
    } else if (EndsWith(token, "ing") || EndsWith(token, "ed")) {
      tags.push_back(PosTag::kVerb);
    } else if (EndsWith(token, "ful") || EndsWith(token, "ous") || EndsWith(token, "ive") ||
               EndsWith(token, "able") || EndsWith(token, "ible") || EndsWith(token, "less") ||
               EndsWith(token, "ish")) {
      tags.push_back(PosTag::kAdjective);
    } else {
      tags.push_back(PosTag::kNoun);
    }
  }
  return tags;
}

}  // namespace rovist
