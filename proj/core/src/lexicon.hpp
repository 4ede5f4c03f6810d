#pragma once

#include <string>
#include <string_view>

// Closed word classes and verb morphology used by the template engine.
// All predicates expect lowercase input with surrounding punctuation removed.
namespace temadapter::lexicon {

bool is_wh_word(std::string_view w);
bool is_be(std::string_view w);
bool is_do(std::string_view w);
bool is_have(std::string_view w);
bool is_modal(std::string_view w);
inline bool is_auxiliary(std::string_view w) {
  return is_be(w) || is_do(w) || is_have(w) || is_modal(w);
}

bool is_determiner(std::string_view w);
bool is_pronoun(std::string_view w);
bool is_adverb(std::string_view w);
/// Adverbs that do not survive negation ("would still occur" -> "would not occur").
bool is_polarity_adverb(std::string_view w);
bool is_preposition(std::string_view w);
bool is_conjunction(std::string_view w);
bool is_adjective(std::string_view w);
bool is_number_word(std::string_view w);

/// Base-form verb from the lexicon.
bool is_base_verb(std::string_view w);
/// Past participle or -ing form (irregular table plus suffix rules).
bool is_participle(std::string_view w);
inline bool is_verbal(std::string_view w) { return is_base_verb(w) || is_participle(w); }

/// Function words that are never proper nouns.
bool is_closed_class(std::string_view w);

std::string third_person(std::string_view verb);
std::string past_tense(std::string_view verb);

}  // namespace temadapter::lexicon
