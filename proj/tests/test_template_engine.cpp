#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>

#include "golden_corpus.hpp"
#include "temadapter/errors.hpp"
#include "temadapter/template_engine.hpp"

using namespace temadapter;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string strip_trailing_punct(std::string s) {
  while (!s.empty() && std::ispunct(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

}  // namespace

TEST(ClassifyQuestion, Examples) {
  EXPECT_EQ(classify_question("Which area has been damaged on the vehicle being hit?"), QuestionKind::kWh);
  EXPECT_EQ(classify_question("Did a car violate the traffic light?"), QuestionKind::kYesNo);
  EXPECT_EQ(classify_question("Zorp blick?"), QuestionKind::kUnknown);
  EXPECT_EQ(classify_question("How many lanes does the road have?"), QuestionKind::kHowMany);
  EXPECT_EQ(classify_question("What's the condition of the road surface?"), QuestionKind::kWhats);
  EXPECT_EQ(classify_question("Are there any trees along the road?"), QuestionKind::kYesNo);
  EXPECT_EQ(classify_question("Where was the video taken?"), QuestionKind::kWh);
}

TEST(ClassifyQuestion, UsesLeadingTokensOnly) {
  EXPECT_EQ(classify_question("Did what happen?"), QuestionKind::kYesNo);
  EXPECT_EQ(classify_question("  why did it stop?"), QuestionKind::kWh);
}

TEST(MakeQaPair, RejectsEmptyFields) {
  EXPECT_THROW(make_qa_pair("", "Yes"), ContractError);
  EXPECT_THROW(make_qa_pair("Did it rain?", ""), ContractError);
}

class GoldenCorpus : public ::testing::TestWithParam<temadapter::testing::GoldenTriple> {};

TEST_P(GoldenCorpus, ReproducedExactly) {
  const auto& g = GetParam();
  const QAPair pair = make_qa_pair(std::string(g.question), std::string(g.answer));
  EXPECT_EQ(pair.kind, g.kind);
  const EventDescription d = to_declarative(pair);
  EXPECT_EQ(d.text, g.sentence);
  EXPECT_FALSE(d.used_fallback);
}

INSTANTIATE_TEST_SUITE_P(Reference, GoldenCorpus, ::testing::ValuesIn(temadapter::testing::kGoldenCorpus));

TEST(ToDeclarative, Examples) {
  EXPECT_EQ(to_declarative(make_qa_pair("Which area has been damaged on the vehicle being hit?", "Back")).text,
            "Back has been damaged on the vehicle being hit.");
  EXPECT_EQ(to_declarative(make_qa_pair("Would the accident still occur if the driver slows down in time?", "No")).text,
            "The accident would not occur if the driver slows down in time.");
  EXPECT_EQ(to_declarative(make_qa_pair("How many lanes does the road have in single direction?", "Two")).text,
            "The road has two in single direction.");
  EXPECT_EQ(to_declarative(make_qa_pair("Did a car violate the traffic light?", "No")).text,
            "A car did not violate the traffic light.");
}

TEST(ToDeclarative, UnknownFallsBack) {
  const EventDescription d = to_declarative(make_qa_pair("Zorp blick?", "Flum"));
  EXPECT_TRUE(d.used_fallback);
  EXPECT_EQ(d.text, "Zorp blick, Flum.");
}

TEST(ToDeclarative, YesNoWithoutPolarityFallsBack) {
  const EventDescription d = to_declarative(make_qa_pair("Did the car stop?", "Maybe"));
  EXPECT_TRUE(d.used_fallback);
  EXPECT_EQ(d.text.back(), '.');
}

const char* const kQuestions[] = {
    "Which area has been damaged on the vehicle being hit?",
    "What could possibly cause this accident?",
    "Can this road infrastructure prevent head-on collision?",
    "Would the accident still occur if the driver slows down in time?",
    "How much damage will the vehicle(s) receive after collision?",
    "Where was the video taken?",
    "Why did the accident occur when the road is clear?",
    "How did the truck get involved in the accident?",
    "How many lanes does the road have in single direction?",
    "What's the condition of the road surface?",
    "Are there any trees along the road?",
    "Did a car violate the traffic light?",
    "Who caused the collision?",
    "When did the truck stop?",
    "Is the road wet?",
    "What is the weather like?",
    "Which vehicle is responsible for the accident?",
    "How many cars are involved?",
    "Zorp blick?",
    "If the light were green, what would happen?",
    "?",
    "Why?",
};
const char* const kAnswers[] = {"Yes", "No", "Two cars", "The red truck", "Snow", "No, the road is dry",
                                "Yes, it was raining", "Nearly no damage", "A crossroad"};

TEST(ToDeclarative, TotalDeterministicAndWithoutResidue) {
  for (const char* q : kQuestions) {
    for (const char* a : kAnswers) {
      const QAPair pair = make_qa_pair(q, a);
      EventDescription d1, d2;
      ASSERT_NO_THROW(d1 = to_declarative(pair)) << q << " / " << a;
      d2 = to_declarative(pair);
      EXPECT_EQ(d1.text, d2.text);
      EXPECT_EQ(d1.text.find('?'), std::string::npos) << d1.text;
      ASSERT_FALSE(d1.text.empty());
      EXPECT_EQ(d1.text.back(), '.') << d1.text;
      const std::string first = lower(d1.text.substr(0, d1.text.find(' ')));
      for (const char* wh : {"which", "what", "who", "whom", "whose", "where", "why", "when", "how", "what's"}) {
        if (!d1.used_fallback) EXPECT_NE(first, wh) << d1.text;
      }
    }
  }
}

TEST(ToDeclarative, AnswerContainmentForNounPhraseAnswers) {
  const char* const questions[] = {
      "Which area has been damaged on the vehicle being hit?", "What could possibly cause this accident?",
      "Which could be the reason for this accident?",         "How many lanes does the road have in single direction?",
      "How much damage will the vehicle(s) receive after collision?", "Who caused the collision?",
      "What's the condition of the road surface?",            "Which vehicle is responsible for the accident?",
  };
  const char* const answers[] = {"Back", "Sudden braking of a vehicle", "Two", "Some scratches", "The red truck",
                                 "Wet.", "Three to five"};
  for (const char* q : questions) {
    for (const char* a : answers) {
      const QAPair pair = make_qa_pair(q, a);
      ASSERT_NE(pair.kind, QuestionKind::kYesNo);
      const EventDescription d = to_declarative(pair);
      EXPECT_NE(lower(d.text).find(lower(strip_trailing_punct(a))), std::string::npos) << q << " / " << a << " -> " << d.text;
    }
  }
}

TEST(BatchTemplates, ElementwiseAndOrderPreserving) {
  const std::vector<QAPair> pairs = {make_qa_pair("What could possibly cause this accident?", "Speeding"),
                                     make_qa_pair("Did a car violate the traffic light?", "Yes")};
  const auto out = batch_templates(pairs);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].text, to_declarative(pairs[0]).text);
  EXPECT_EQ(out[1].text, to_declarative(pairs[1]).text);
  EXPECT_THROW(batch_templates({}), ContractError);
}

TEST(BatchTemplates, FourAnswerAttribution) {
  std::vector<QAPair> pairs;
  for (const char* a : {"Obstructed by unexpected objects", "Sudden braking of a vehicle",
                        "Violation of traffic rules by pedestrians", "Sudden or extreme movement by a vehicle"}) {
    pairs.push_back(make_qa_pair("What could possibly cause this accident?", a));
  }
  for (const auto& d : batch_templates(pairs)) {
    EXPECT_TRUE(d.text.ends_with("could possibly cause this accident.")) << d.text;
  }
}

TEST(RawConcatenation, DropsQuestionMark) {
  EXPECT_EQ(raw_concatenation("Where was the video taken?", "Forest"), "Where was the video taken Forest");
}
