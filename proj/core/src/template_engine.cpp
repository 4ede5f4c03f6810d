#include "temadapter/template_engine.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lexicon.hpp"
#include "temadapter/errors.hpp"

namespace temadapter {
namespace {

namespace lx = lexicon;

using Tokens = std::vector<std::string>;

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string erase_char(std::string s, char c) {
  s.erase(std::remove(s.begin(), s.end(), c), s.end());
  return s;
}

// Lowercase form with leading/trailing punctuation removed; used for word-class lookups.
std::string word_key(std::string_view token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  auto is_punct = [](char c) {
    return c == ',' || c == '.' || c == ';' || c == ':' || c == '!' || c == '"' || c == '(' ||
           c == ')';
  };
  while (b < e && is_punct(token[b])) ++b;
  while (e > b && is_punct(token[e - 1])) --e;
  std::string key = to_lower(token.substr(b, e - b));
  // Normalise the typographic apostrophe so "What’s" and "What's" agree.
  const std::string curly = "\xE2\x80\x99";
  for (auto pos = key.find(curly); pos != std::string::npos; pos = key.find(curly)) {
    key.replace(pos, curly.size(), "'");
  }
  return key;
}

Tokens split_words(std::string_view text) {
  Tokens out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Question tokens: '?' removed, and an attached parenthetical suffix such as
// "vehicle(s)" split into "vehicle" "(s)".
Tokens tokenize_question(std::string_view question) {
  Tokens out;
  for (auto& w : split_words(erase_char(std::string(question), '?'))) {
    const auto paren = w.find('(');
    if (paren != std::string::npos && paren > 0) {
      out.push_back(w.substr(0, paren));
      out.push_back(w.substr(paren));
    } else {
      out.push_back(w);
    }
  }
  return out;
}

std::string join(const Tokens& tokens, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end && i < tokens.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string join(const Tokens& tokens) { return join(tokens, 0, tokens.size()); }

// Answer text as used inside a sentence: trimmed, no '?', no trailing period.
std::string clean_answer(std::string_view answer) {
  std::string a = trim(erase_char(std::string(answer), '?'));
  while (!a.empty() && (a.back() == '.' || a.back() == '!' || a.back() == ' ')) a.pop_back();
  return a;
}

bool is_acronym(std::string_view w) {
  if (w.size() < 2) return false;
  return std::all_of(w.begin(), w.end(), [](unsigned char c) {
    return std::isupper(c) || std::isdigit(c) || c == '-';
  });
}

// Lowercases the first letter of a slot-internal answer unless it looks like
// a name: a lone capitalised content word ("Forest") or an acronym.
std::string slot_case(const std::string& answer) {
  if (answer.empty() || !std::isupper(static_cast<unsigned char>(answer.front()))) return answer;
  const Tokens words = split_words(answer);
  if (is_acronym(words.front()) || words.front() == "I") return answer;
  if (words.size() == 1 && !lx::is_closed_class(word_key(words.front()))) return answer;
  std::string out = answer;
  out.front() = static_cast<char>(std::tolower(static_cast<unsigned char>(out.front())));
  return out;
}

std::string finish_sentence(std::string text) {
  text = erase_char(std::move(text), '?');
  std::string collapsed;
  for (char c : text) {
    if (c == ' ' && (collapsed.empty() || collapsed.back() == ' ')) continue;
    collapsed.push_back(c);
  }
  while (!collapsed.empty() && (collapsed.back() == ' ' || collapsed.back() == ',')) {
    collapsed.pop_back();
  }
  if (!collapsed.empty()) {
    collapsed.front() =
        static_cast<char>(std::toupper(static_cast<unsigned char>(collapsed.front())));
  }
  if (collapsed.empty() || collapsed.back() != '.') collapsed.push_back('.');
  return collapsed;
}

// ---------------------------------------------------------------------------
// Sentence analysis over the question tokens.

struct Analysis {
  Tokens tokens;  // original casing
  Tokens keys;    // lowercase, punctuation-stripped
  std::size_t size() const { return tokens.size(); }
};

Analysis analyse(std::string_view question) {
  Analysis a;
  a.tokens = tokenize_question(question);
  a.keys.reserve(a.tokens.size());
  for (const auto& t : a.tokens) a.keys.push_back(word_key(t));
  return a;
}

bool starts_noun_phrase(const Analysis& a, std::size_t i) {
  if (i >= a.size()) return false;
  const auto& k = a.keys[i];
  if (lx::is_determiner(k) || lx::is_pronoun(k) || lx::is_number_word(k)) return true;
  // Capitalised mid-sentence word: a name.
  return std::isupper(static_cast<unsigned char>(a.tokens[i].front())) && !lx::is_auxiliary(k);
}

enum class NpMode { kBeforeVerb, kCopular };

bool ends_noun_phrase(std::string_view k, NpMode mode) {
  if (lx::is_auxiliary(k) || lx::is_verbal(k) || lx::is_adverb(k) || lx::is_conjunction(k) ||
      lx::is_wh_word(k) || lx::is_determiner(k)) {
    return true;
  }
  if (lx::is_preposition(k) && k != "of") return true;
  return mode == NpMode::kCopular && lx::is_adjective(k);
}

// Returns one past the last token of the subject noun phrase starting at
// `start`. The head directly after a determiner is always taken; "of" chains
// extend the phrase. Before a verb, a phrase that nothing terminates falls
// back to the shortest reading (determiner + head).
std::size_t scan_noun_phrase(const Analysis& a, std::size_t start, NpMode mode) {
  const std::size_t n = a.size();
  if (start >= n) return start;
  std::size_t i = start;
  const bool pronoun = lx::is_pronoun(a.keys[i]);
  const bool determiner = lx::is_determiner(a.keys[i]);
  ++i;
  if (pronoun) return i;
  if (determiner && i < n) ++i;
  while (i < n) {
    const auto& k = a.keys[i];
    if (k == "of" && i + 1 < n) {
      i += 2;
      continue;
    }
    if (ends_noun_phrase(k, mode)) return i;
    ++i;
  }
  if (mode == NpMode::kCopular) return n;
  return std::min(n, start + (determiner ? 2 : 1));
}

// Subject + verb group following an auxiliary at `aux_at`.
struct Clause {
  std::string subject;
  std::vector<std::string> adverbs;       // between subject and verb
  std::vector<std::string> adverb_keys;
  std::string verb;                       // empty for be/have auxiliaries
  std::string verb_key;
  std::string tail;
};

std::optional<Clause> parse_clause(const Analysis& a, std::size_t aux_at) {
  const std::string& aux = a.keys[aux_at];
  const bool needs_verb = lx::is_do(aux) || lx::is_modal(aux);
  const std::size_t np_begin = aux_at + 1;
  if (np_begin >= a.size()) return std::nullopt;
  std::size_t np_end = scan_noun_phrase(a, np_begin, needs_verb ? NpMode::kBeforeVerb : NpMode::kCopular);
  if (!needs_verb && np_end >= a.size() && np_end - np_begin > 1) {
    // "Is the road slippery" - copular predicate not in the adjective list.
    np_end = std::min(a.size() - 1, np_begin + (lx::is_determiner(a.keys[np_begin]) ? 2 : 1));
  }
  Clause c;
  c.subject = join(a.tokens, np_begin, np_end);
  std::size_t i = np_end;
  if (needs_verb) {
    while (i < a.size() && lx::is_adverb(a.keys[i]) && a.keys[i] != "not") {
      c.adverbs.push_back(a.tokens[i]);
      c.adverb_keys.push_back(a.keys[i]);
      ++i;
    }
    if (i >= a.size()) return std::nullopt;
    c.verb = a.tokens[i];
    c.verb_key = a.keys[i];
    ++i;
  }
  c.tail = join(a.tokens, i, a.size());
  return c;
}

std::string adverb_string(const Clause& c, bool drop_polarity) {
  std::string out;
  for (std::size_t i = 0; i < c.adverbs.size(); ++i) {
    if (drop_polarity && lx::is_polarity_adverb(c.adverb_keys[i])) continue;
    out += c.adverbs[i] + " ";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Answer shaping for the slot.

bool has_finite_verb(const Tokens& words) {
  for (std::size_t i = 1; i < words.size(); ++i) {
    const auto k = word_key(words[i]);
    if (lx::is_auxiliary(k)) return true;
  }
  return false;
}

// "The road is wet." answering "What's the condition of the road surface?"
// reduces to "wet" when the answer restates a noun of the question before its copula.
std::string reduce_restated_subject(const std::string& answer, const Analysis& question) {
  const Tokens words = split_words(answer);
  for (std::size_t p = 1; p + 1 < words.size(); ++p) {
    if (!lx::is_be(word_key(words[p]))) continue;
    for (std::size_t j = 0; j < p; ++j) {
      const auto k = word_key(words[j]);
      if (lx::is_closed_class(k)) continue;
      if (std::find(question.keys.begin(), question.keys.end(), k) != question.keys.end()) {
        return join(words, p + 1, words.size());
      }
    }
    break;
  }
  return answer;
}

// "Road in the city" under a slot already introduced by "in" keeps "the city".
std::string reduce_to_preposition_object(const std::string& answer, std::string_view prep) {
  const Tokens words = split_words(answer);
  for (std::size_t i = 1; i + 1 < words.size(); ++i) {
    if (word_key(words[i]) == prep) return join(words, i + 1, words.size());
  }
  return answer;
}

bool starts_with_preposition(const std::string& answer) {
  const Tokens words = split_words(answer);
  return !words.empty() && lx::is_preposition(word_key(words.front()));
}

enum class Slot { kInitial, kPlain, kLocative, kReason, kManner, kPredicate };

std::string fill_slot(const std::string& raw_answer, Slot slot, const Analysis& question) {
  std::string answer = clean_answer(raw_answer);
  if (slot == Slot::kInitial) return answer;
  switch (slot) {
    case Slot::kLocative:
      answer = reduce_to_preposition_object(answer, "in");
      answer = slot_case(answer);
      return starts_with_preposition(answer) ? answer : "in " + answer;
    case Slot::kReason: {
      answer = slot_case(answer);
      const Tokens words = split_words(answer);
      if (!words.empty() && word_key(words.front()) == "because") return answer;
      return has_finite_verb(words) ? "because " + answer : "because of " + answer;
    }
    case Slot::kManner:
      answer = slot_case(reduce_restated_subject(answer, question));
      return starts_with_preposition(answer) ? answer : "by " + answer;
    case Slot::kPredicate:
      return slot_case(reduce_restated_subject(answer, question));
    default:
      return slot_case(answer);
  }
}

// ---------------------------------------------------------------------------
// Rule table.

constexpr std::string_view kSlot = "[]";

std::string fill(std::string skeleton, const std::string& filler) {
  const auto pos = skeleton.find(kSlot);
  if (pos != std::string::npos) skeleton.replace(pos, kSlot.size(), filler);
  return skeleton;
}

enum class Inflection { kTensed, kBare };

std::string verb_group(const std::string& aux, const Clause& c, Inflection inflection) {
  if (lx::is_do(aux)) {
    if (inflection == Inflection::kBare || aux == "do") return adverb_string(c, false) + c.verb;
    const std::string form =
        aux == "did" ? lx::past_tense(c.verb_key) : lx::third_person(c.verb_key);
    return adverb_string(c, false) + form;
  }
  if (lx::is_modal(aux)) return aux + " " + adverb_string(c, false) + c.verb;
  return aux;  // be / have: the participle or predicate stays in the tail
}

std::string clause_skeleton(const std::string& aux, const Clause& c, Inflection inflection) {
  std::string s = c.subject + " " + verb_group(aux, c, inflection);
  if (!c.tail.empty()) s += " " + c.tail;
  return s;
}

struct Skeleton {
  std::string pattern;  // contains kSlot
  Slot slot = Slot::kPlain;
};

// Index one past a run of nouns following the interrogative ("Which area ...").
std::size_t skip_wh_noun(const Analysis& a, std::size_t i) {
  if (i < a.size() && !lx::is_auxiliary(a.keys[i]) && !lx::is_adverb(a.keys[i])) ++i;
  while (i < a.size() && !lx::is_auxiliary(a.keys[i]) && !lx::is_verbal(a.keys[i])) ++i;
  return i;
}

// what / which / who / how many: the slot replaces either the subject or the
// object of the question's clause.
std::optional<Skeleton> argument_question(const Analysis& a, std::size_t noun_begin,
                                          bool keep_noun) {
  const std::size_t i = skip_wh_noun(a, noun_begin);
  const std::string noun = join(a.tokens, noun_begin, i);
  if (i >= a.size()) return std::nullopt;
  const auto& aux = a.keys[i];
  if ((lx::is_do(aux) || lx::is_modal(aux)) && starts_noun_phrase(a, i + 1)) {
    if (auto c = parse_clause(a, i)) {
      std::string s = c->subject + " " + verb_group(aux, *c, Inflection::kTensed) + " [] ";
      s += c->tail;
      return Skeleton{s, Slot::kPlain};
    }
  }
  if (keep_noun && lx::is_be(aux) && i + 1 < a.size() && a.keys[i + 1] == "there") {
    return Skeleton{"there " + a.tokens[i] + " [] " + noun + " " + join(a.tokens, i + 2, a.size()),
                    Slot::kPlain};
  }
  std::string s = "[] ";
  if (keep_noun && !noun.empty()) s += noun + " ";
  s += join(a.tokens, i, a.size());
  return Skeleton{s, Slot::kInitial};
}

// where / why / when / how: the slot is an adjunct appended to the restated clause.
std::optional<Skeleton> adjunct_question(const Analysis& a) {
  const std::string& wh = a.keys[0];
  std::size_t aux_at = 1;
  bool degree = false;
  if (wh == "how" && aux_at < a.size() && !lx::is_auxiliary(a.keys[aux_at])) {
    ++aux_at;  // "How fast was the car going"
    degree = true;
  }
  if (aux_at >= a.size() || !lx::is_auxiliary(a.keys[aux_at])) return std::nullopt;
  const std::string& aux = a.keys[aux_at];
  const auto c = parse_clause(a, aux_at);
  if (!c) return std::nullopt;

  if (wh == "how" && !degree) {
    // Manner questions drop do-support without re-inflecting the verb:
    // "How did the truck get involved" -> "The truck get involved ... by []".
    return Skeleton{clause_skeleton(aux, *c, Inflection::kBare) + " []", Slot::kManner};
  }
  const std::string body = clause_skeleton(aux, *c, Inflection::kTensed);
  if (wh == "where") return Skeleton{body + " []", Slot::kLocative};
  if (wh == "why") return Skeleton{body + " []", Slot::kReason};
  return Skeleton{body + " []", Slot::kPlain};
}

// What's / What is NP -> "NP is []".
std::optional<Skeleton> whats_question(const Analysis& a) {
  std::size_t np_begin = 1;
  std::string copula = "is";
  if (a.keys[0] == "what" && a.size() > 1 && lx::is_be(a.keys[1])) {
    copula = a.tokens[1];
    np_begin = 2;
  }
  if (np_begin >= a.size()) return std::nullopt;
  const std::size_t np_end = scan_noun_phrase(a, np_begin, NpMode::kCopular);
  std::string s = join(a.tokens, np_begin, np_end) + " " + copula;
  if (np_end < a.size()) s += " " + join(a.tokens, np_end, a.size());
  return Skeleton{s + " []", Slot::kPredicate};
}

struct Polarity {
  bool positive = true;
  std::string clause;  // ", <clause>" tail of "No, the road is unmarked"
};

std::optional<Polarity> parse_polarity(std::string_view answer) {
  const std::string a = clean_answer(answer);
  const Tokens words = split_words(a);
  if (words.empty()) return std::nullopt;
  const auto head = word_key(words.front());
  if (head != "yes" && head != "no") return std::nullopt;
  Polarity p;
  p.positive = head == "yes";
  const auto comma = a.find(',');
  if (words.size() > 1) {
    const std::size_t from = comma != std::string::npos ? comma + 1 : words.front().size();
    p.clause = trim(std::string_view(a).substr(from));
  }
  return p;
}

std::optional<std::string> yes_no_sentence(const Analysis& a, const Polarity& polarity) {
  if (a.size() < 2) return std::nullopt;
  const std::string& aux = a.keys[0];
  const bool negative = !polarity.positive;
  std::string s;

  if (lx::is_be(aux) && a.keys[1] == "there") {
    Tokens rest(a.tokens.begin() + 2, a.tokens.end());
    const std::string first = rest.empty() ? std::string() : word_key(rest.front());
    if (!negative) {
      if (first == "any") rest.front() = "some";
      s = "there " + aux + " " + join(rest);
    } else {
      if (first == "some") {
        rest.front() = "any";
      } else if (first != "any" && !lx::is_determiner(first)) {
        rest.insert(rest.begin(), "any");
      }
      s = "there " + aux + " not " + join(rest);
    }
  } else if (lx::is_be(aux) || lx::is_have(aux)) {
    const auto c = parse_clause(a, 0);
    if (!c) return std::nullopt;
    s = c->subject + " " + a.tokens[0] + (negative ? " not" : "");
    if (!c->tail.empty()) s += " " + c->tail;
  } else if (lx::is_do(aux)) {
    const auto c = parse_clause(a, 0);
    if (!c) return std::nullopt;
    if (negative) {
      s = c->subject + " " + aux + " not " + adverb_string(*c, true) + c->verb;
    } else {
      s = c->subject + " " + verb_group(aux, *c, Inflection::kTensed);
    }
    if (!c->tail.empty()) s += " " + c->tail;
  } else if (lx::is_modal(aux)) {
    const auto c = parse_clause(a, 0);
    if (!c) return std::nullopt;
    if (negative) {
      const std::string neg = aux == "can" ? "cannot" : aux + " not";
      s = c->subject + " " + neg + " " + adverb_string(*c, true) + c->verb;
    } else if (aux == "would") {
      // Affirmed counterfactuals are restated without the modal.
      s = c->subject + " " + adverb_string(*c, false) + c->verb;
    } else {
      s = c->subject + " " + aux + " " + adverb_string(*c, false) + c->verb;
    }
    if (!c->tail.empty()) s += " " + c->tail;
  } else {
    return std::nullopt;
  }
  if (!polarity.clause.empty()) s += ", " + polarity.clause;
  return s;
}

std::string question_body(std::string_view question) {
  return trim(erase_char(std::string(question), '?'));
}

EventDescription fallback(const QAPair& pair) {
  EventDescription d;
  d.source = pair;
  d.used_fallback = true;
  std::string text = question_body(pair.question) + ", " + clean_answer(pair.answer);
  text = erase_char(std::move(text), '?');
  if (text.empty() || text.back() != '.') text.push_back('.');
  d.text = std::move(text);
  return d;
}

}  // namespace

std::string_view to_string(QuestionKind kind) {
  switch (kind) {
    case QuestionKind::kWh: return "WH";
    case QuestionKind::kHowMany: return "HOW_MANY";
    case QuestionKind::kWhats: return "WHATS";
    case QuestionKind::kYesNo: return "YES_NO";
    case QuestionKind::kUnknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

QuestionKind classify_question(std::string_view question) {
  const Analysis a = analyse(question);
  if (a.size() == 0) return QuestionKind::kUnknown;
  const std::string& first = a.keys[0];
  const std::string second = a.size() > 1 ? a.keys[1] : std::string();
  if (first == "what's" || first == "whats" || (first == "what" && lx::is_be(second))) {
    return QuestionKind::kWhats;
  }
  if (first == "how" && (second == "many" || second == "much")) return QuestionKind::kHowMany;
  if (lx::is_wh_word(first)) return QuestionKind::kWh;
  if (lx::is_auxiliary(first)) return QuestionKind::kYesNo;
  return QuestionKind::kUnknown;
}

QAPair make_qa_pair(std::string question, std::string answer) {
  if (trim(question).empty()) throw ContractError("QAPair: question is empty");
  if (trim(answer).empty()) throw ContractError("QAPair: answer is empty");
  QAPair p;
  p.kind = classify_question(question);
  p.question = std::move(question);
  p.answer = std::move(answer);
  return p;
}

EventDescription to_declarative(const QAPair& pair) {
  const Analysis a = analyse(pair.question);
  if (a.size() == 0 || clean_answer(pair.answer).empty()) return fallback(pair);

  std::optional<std::string> text;
  switch (classify_question(pair.question)) {
    case QuestionKind::kYesNo:
      if (const auto polarity = parse_polarity(pair.answer)) text = yes_no_sentence(a, *polarity);
      break;
    case QuestionKind::kWhats:
      if (const auto sk = whats_question(a)) text = fill(sk->pattern, fill_slot(pair.answer, sk->slot, a));
      break;
    case QuestionKind::kHowMany:
      if (const auto sk = argument_question(a, 2, true)) {
        text = fill(sk->pattern, fill_slot(pair.answer, sk->slot, a));
      }
      break;
    case QuestionKind::kWh: {
      const bool argument = a.keys[0] == "what" || a.keys[0] == "which" || a.keys[0] == "who" ||
                            a.keys[0] == "whom" || a.keys[0] == "whose";
      const auto sk = argument ? argument_question(a, 1, false) : adjunct_question(a);
      if (sk) {
        text = fill(sk->pattern, fill_slot(pair.answer, sk->slot, a));
      } else {
        // No clause to restate ("Why not?"): the answer alone carries the event.
        text = clean_answer(pair.answer) + " " + join(a.tokens, 1, a.size());
      }
      break;
    }
    case QuestionKind::kUnknown:
      break;
  }
  if (!text) return fallback(pair);

  EventDescription d;
  d.source = pair;
  d.text = finish_sentence(std::move(*text));
  return d;
}

std::vector<EventDescription> batch_templates(std::span<const QAPair> pairs) {
  if (pairs.empty()) throw ContractError("batch_templates: empty batch");
  std::vector<EventDescription> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(to_declarative(p));
  return out;
}

std::string raw_concatenation(std::string_view question, std::string_view answer) {
  return question_body(question) + " " + trim(answer);
}

}  // namespace temadapter
