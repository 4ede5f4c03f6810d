#include "lexicon.hpp"

#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace temadapter::lexicon {
namespace {

using WordSet = std::unordered_set<std::string_view>;
using WordMap = std::unordered_map<std::string_view, std::string_view>;

bool contains(const WordSet& set, std::string_view w) { return set.find(w) != set.end(); }

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

const WordSet& base_verbs() {
  static const WordSet words = {
      "accelerate", "affect",   "allow",    "appear",   "approach", "arrive",  "ask",
      "avoid",      "back",     "be",       "become",   "begin",    "block",   "brake",
      "break",      "bring",    "bump",     "call",     "carry",    "catch",   "cause",
      "change",     "check",    "clear",    "climb",    "collide",  "come",    "continue",
      "control",    "crash",    "cross",    "cut",      "damage",   "decelerate", "decide",
      "die",        "do",       "drift",    "drive",    "drop",     "enter",   "escape",
      "exit",       "face",     "fail",     "fall",     "feel",     "find",    "flee",
      "flip",       "follow",   "get",      "give",     "go",       "happen",  "have",
      "head",       "help",     "hit",      "hold",     "honk",     "hurt",    "ignore",
      "injure",     "involve",  "jump",     "keep",     "kill",     "know",    "land",
      "lead",       "leave",    "let",      "look",     "lose",     "make",    "merge",
      "miss",       "move",     "need",     "notice",   "obey",     "occur",   "open",
      "overtake",   "park",     "pass",     "pause",    "prevent",  "proceed", "pull",
      "push",       "put",      "reach",    "react",    "receive",  "remain",  "respond",
      "reverse",    "ride",     "rise",     "roll",     "rotate",   "run",     "rush",
      "save",       "say",      "see",      "seem",     "show",     "signal",  "skid",
      "slide",      "slip",     "slow",     "speed",    "spin",     "stand",   "start",
      "stay",       "steer",    "stop",     "strike",   "survive",  "swerve",  "take",
      "tell",       "think",    "touch",    "travel",   "try",      "turn",    "use",
      "violate",    "wait",     "walk",     "want",     "watch",    "yield",
  };
  return words;
}

const WordSet& irregular_participles() {
  static const WordSet words = {
      "been",   "become", "beaten", "blown",  "born",    "broken", "brought", "built",
      "caught", "chosen", "come",   "done",   "driven",  "drawn",  "fallen",  "felt",
      "fled",   "flown",  "found",  "frozen", "given",   "gone",   "got",     "gotten",
      "grown",  "held",   "hidden", "hit",    "hung",    "hurt",   "kept",    "known",
      "led",    "left",   "lost",   "made",   "met",     "overtaken", "paid", "put",
      "ridden", "run",    "said",   "seen",   "sent",    "set",    "shown",   "shut",
      "slid",   "sold",   "sped",   "spun",   "stolen",  "stood",  "struck",  "stuck",
      "swung",  "taken",  "thought", "thrown", "told",   "torn",   "won",     "worn",
      "written",
  };
  return words;
}

const WordSet& ing_nouns() {
  static const WordSet words = {
      "anything", "building", "ceiling", "crossing", "evening",  "everything", "king",
      "lighting", "morning",  "nothing", "ring",     "sibling",  "something",  "spring",
      "string",   "thing",    "wing",    "parking",  "clothing", "railing",
  };
  return words;
}

const WordMap& irregular_past() {
  static const WordMap words = {
      {"be", "was"},       {"become", "became"}, {"begin", "began"}, {"break", "broke"},
      {"bring", "brought"}, {"catch", "caught"}, {"come", "came"},   {"cut", "cut"},
      {"do", "did"},       {"drive", "drove"},   {"fall", "fell"},   {"feel", "felt"},
      {"find", "found"},   {"flee", "fled"},     {"get", "got"},     {"give", "gave"},
      {"go", "went"},      {"have", "had"},      {"hit", "hit"},     {"hold", "held"},
      {"hurt", "hurt"},    {"keep", "kept"},     {"know", "knew"},   {"lead", "led"},
      {"leave", "left"},   {"let", "let"},       {"lose", "lost"},   {"make", "made"},
      {"overtake", "overtook"}, {"put", "put"},  {"ride", "rode"},   {"rise", "rose"},
      {"run", "ran"},      {"say", "said"},      {"see", "saw"},     {"slide", "slid"},
      {"speed", "sped"},   {"spin", "spun"},     {"stand", "stood"}, {"strike", "struck"},
      {"take", "took"},    {"tell", "told"},     {"think", "thought"},
  };
  return words;
}

// Regular verbs whose final consonant doubles before -ed.
const WordSet& doubling_verbs() {
  static const WordSet words = {
      "admit", "ban",  "commit", "control", "drop", "flip", "grab",  "jog",
      "nod",   "occur", "omit",  "patrol",  "permit", "plan", "prefer", "refer",
      "rob",   "rub",  "scrap",  "skid",    "slip", "step", "stop",  "tap",
      "trip",  "wrap",
  };
  return words;
}

}  // namespace

bool is_wh_word(std::string_view w) {
  static const WordSet words = {"what", "which", "who", "whom", "whose", "where", "why", "how", "when"};
  return contains(words, w);
}

bool is_be(std::string_view w) {
  static const WordSet words = {"is", "are", "was", "were", "am"};
  return contains(words, w);
}

bool is_do(std::string_view w) { return w == "do" || w == "does" || w == "did"; }

bool is_have(std::string_view w) { return w == "has" || w == "have" || w == "had"; }

bool is_modal(std::string_view w) {
  static const WordSet words = {"can",   "could", "would", "will", "should",
                                "shall", "may",   "might", "must"};
  return contains(words, w);
}

bool is_determiner(std::string_view w) {
  static const WordSet words = {"the",  "a",     "an",   "this",  "that",  "these", "those",
                                "his",  "her",   "its",  "their", "our",   "my",    "your",
                                "some", "any",   "each", "every", "both",  "all",   "no",
                                "another", "either", "neither"};
  return contains(words, w);
}

bool is_pronoun(std::string_view w) {
  static const WordSet words = {"it",      "they",    "he",      "she",      "we",
                                "you",     "i",       "there",   "someone",  "anyone",
                                "somebody", "anybody", "everyone", "nobody", "everybody"};
  return contains(words, w);
}

bool is_adverb(std::string_view w) {
  static const WordSet words = {"still",    "also",     "possibly",   "really",  "actually",
                                "ever",     "never",    "already",    "just",    "probably",
                                "likely",   "even",     "usually",    "always",  "finally",
                                "suddenly", "eventually", "immediately", "first", "then",
                                "not"};
  return contains(words, w);
}

bool is_polarity_adverb(std::string_view w) { return w == "still" || w == "already"; }

bool is_preposition(std::string_view w) {
  static const WordSet words = {"in",     "on",      "at",      "of",      "for",    "with",
                                "to",     "from",    "by",      "after",   "before", "during",
                                "along",  "near",    "behind",  "into",    "onto",   "over",
                                "under",  "through", "across",  "about",   "between", "around",
                                "toward", "towards", "without", "within",  "against", "upon",
                                "beside", "past",    "beyond",  "outside", "inside"};
  return contains(words, w);
}

bool is_conjunction(std::string_view w) {
  static const WordSet words = {"if", "when", "while", "because", "that", "which", "who",
                                "whether", "since", "although", "though", "unless", "so"};
  return contains(words, w);
}

bool is_adjective(std::string_view w) {
  static const WordSet words = {
      "wet",    "dry",    "clear",  "red",   "green", "yellow", "dark",   "bright", "busy",
      "empty",  "crowded", "safe",  "dangerous", "visible", "damaged", "icy", "muddy", "dusty",
      "smooth", "clean",  "narrow", "wide",  "open",  "closed", "broken", "fast",   "slow",
      "normal", "heavy",  "light",  "sunny", "rainy", "snowy",  "foggy",  "cloudy", "straight",
      "curved", "steep",  "flat",   "legal", "illegal", "correct", "wrong", "present", "able",
      "possible", "responsible", "injured", "parked", "moving", "stationary"};
  return contains(words, w);
}

bool is_number_word(std::string_view w) {
  static const WordSet words = {"zero",  "one",   "two",    "three",  "four",  "five",
                                "six",   "seven", "eight",  "nine",   "ten",   "eleven",
                                "twelve", "none", "several", "many",  "few",   "more",
                                "less",  "only",  "nearly", "about",  "over",  "under",
                                "at",    "no",    "single", "multiple"};
  if (contains(words, w)) return true;
  return !w.empty() && w.front() >= '0' && w.front() <= '9';
}

bool is_base_verb(std::string_view w) { return contains(base_verbs(), w); }

bool is_participle(std::string_view w) {
  if (contains(irregular_participles(), w)) return true;
  if (w.size() >= 5 && ends_with(w, "ing") && !contains(ing_nouns(), w)) return true;
  if (w.size() >= 4 && ends_with(w, "ed") && !ends_with(w, "eed")) return true;
  return false;
}

bool is_closed_class(std::string_view w) {
  return is_determiner(w) || is_pronoun(w) || is_preposition(w) || is_conjunction(w) ||
         is_auxiliary(w) || is_adverb(w) || is_number_word(w) || w == "and" || w == "or" ||
         w == "yes" || w == "not";
}

std::string third_person(std::string_view verb) {
  static const WordMap irregular = {{"be", "is"}, {"have", "has"}, {"do", "does"}, {"go", "goes"}};
  if (auto it = irregular.find(verb); it != irregular.end()) return std::string(it->second);
  std::string out(verb);
  if (ends_with(verb, "s") || ends_with(verb, "x") || ends_with(verb, "z") ||
      ends_with(verb, "ch") || ends_with(verb, "sh") || ends_with(verb, "o")) {
    return out + "es";
  }
  if (verb.size() >= 2 && verb.back() == 'y' && !is_vowel(verb[verb.size() - 2])) {
    out.pop_back();
    return out + "ies";
  }
  return out + "s";
}

std::string past_tense(std::string_view verb) {
  if (auto it = irregular_past().find(verb); it != irregular_past().end()) {
    return std::string(it->second);
  }
  std::string out(verb);
  if (contains(doubling_verbs(), verb)) return out + verb.back() + "ed";
  if (ends_with(verb, "e")) return out + "d";
  if (verb.size() >= 2 && verb.back() == 'y' && !is_vowel(verb[verb.size() - 2])) {
    out.pop_back();
    return out + "ied";
  }
  return out + "ed";
}

}  // namespace temadapter::lexicon
