#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace temadapter {

enum class QuestionKind { kWh, kHowMany, kWhats, kYesNo, kUnknown };

std::string_view to_string(QuestionKind kind);

struct QAPair {
  std::string question;
  std::string answer;
  QuestionKind kind = QuestionKind::kUnknown;
};

/// Builds a pair and classifies the question. Throws ContractError on an
/// empty question or answer.
QAPair make_qa_pair(std::string question, std::string answer);

struct EventDescription {
  std::string text;
  QAPair source;
  bool used_fallback = false;
};

/// Classifies a question from its leading tokens only. Total: anything that
/// matches no rule is kUnknown.
QuestionKind classify_question(std::string_view question);

/// Rewrites a question/answer pair into a declarative sentence. The answer
/// fills the slot left by the interrogative; yes/no questions are restated
/// and negated for a "No" answer. Questions no rule covers fall back to
/// "<question body>, <answer>." with used_fallback set.
EventDescription to_declarative(const QAPair& pair);

/// Elementwise to_declarative. Throws ContractError on an empty batch.
std::vector<EventDescription> batch_templates(std::span<const QAPair> pairs);

/// "<question without '?'> <answer>", the string embedded when templates are
/// disabled.
std::string raw_concatenation(std::string_view question, std::string_view answer);

}  // namespace temadapter
