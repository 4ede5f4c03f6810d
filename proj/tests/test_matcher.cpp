#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "support/gradcheck.hpp"
#include "support/synthetic.hpp"
#include "temadapter/errors.hpp"
#include "temadapter/matcher.hpp"

using namespace temadapter;
namespace tt = temadapter::testing;

namespace {

CandidateScores raw_scores(std::vector<double> raw, std::optional<std::size_t> label) {
  CandidateScores s;
  s.probs = softmax(raw);
  s.raw = std::move(raw);
  s.label = label;
  return s;
}

}  // namespace

TEST(Softmax, TwoWayClosedForm) {
  const auto p = softmax(std::vector<double>{1.0, -1.0});
  const double e = std::exp(1.0), inv = std::exp(-1.0);
  EXPECT_NEAR(p[0], e / (e + inv), 1e-15);
  EXPECT_NEAR(p[1], inv / (e + inv), 1e-15);
  EXPECT_NEAR(p[0], 0.8808, 5e-5);
  EXPECT_NEAR(p[1], 0.1192, 5e-5);
}

TEST(ScoreCandidates, IdenticalTextsGiveUniform) {
  const RowVector pooled = tt::random_matrix(1, 6, 1);
  const AlignedVideo video{pooled, pooled};
  std::vector<TextEmbedding> texts(4, TextEmbedding{"t", pooled});
  const CandidateScores s = score_candidates(video, texts);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(s.raw[i], 1.0, 1e-12);
    EXPECT_NEAR(s.probs[i], 0.25, 1e-12);
  }
}

TEST(ScoreCandidates, CosineBoundsAndScaleInvariance) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RowVector pooled = tt::random_matrix(1, 6, 10 + seed);
    const Matrix texts = tt::random_matrix(5, 6, 40 + seed);
    const CandidateScores s = score_candidates(pooled, texts);
    const CandidateScores scaled = score_candidates(pooled * 3.0, texts * 0.5);
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_LE(std::abs(s.raw[i]), 1.0 + 1e-12);
      EXPECT_NEAR(s.raw[i], scaled.raw[i], 1e-12);
    }
    EXPECT_NEAR(std::accumulate(s.probs.begin(), s.probs.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(ScoreCandidates, PositiveRescalingPreservesArgmax) {
  const auto base = raw_scores({0.1, 0.7, -0.3}, std::nullopt);
  for (double c : {0.01, 0.5, 3.0, 100.0}) {
    const auto scaled = raw_scores({0.1 * c, 0.7 * c, -0.3 * c}, std::nullopt);
    EXPECT_EQ(predict(scaled), predict(base));
    EXPECT_EQ(std::max_element(scaled.probs.begin(), scaled.probs.end()) - scaled.probs.begin(), 1);
  }
}

TEST(ScoreCandidates, PermutationEquivariantThreeWay) {
  const RowVector pooled = tt::random_matrix(1, 6, 2);
  const Matrix texts = tt::random_matrix(3, 6, 3);
  const CandidateScores base = score_candidates(pooled, texts);
  std::vector<int> order = {0, 1, 2};
  do {
    Matrix permuted(3, 6);
    for (int i = 0; i < 3; ++i) permuted.row(i) = texts.row(order[i]);
    const CandidateScores s = score_candidates(pooled, permuted);
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ(s.raw[i], base.raw[order[i]]);
      EXPECT_NEAR(s.probs[i], base.probs[order[i]], 1e-15);
    }
    EXPECT_EQ(order[predict(s)], static_cast<int>(predict(base)));
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST(ScoreCandidates, Errors) {
  const RowVector pooled = tt::random_matrix(1, 4, 4);
  EXPECT_THROW(score_candidates(pooled, tt::random_matrix(1, 4, 5)), ContractError);
  EXPECT_THROW(score_candidates(pooled, tt::random_matrix(3, 5, 5)), ContractError);
  try {
    score_candidates(RowVector::Zero(4), tt::random_matrix(2, 4, 6));
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("video"), std::string::npos);
  }
  Matrix texts = tt::random_matrix(3, 4, 7);
  texts.row(2).setZero();
  try {
    score_candidates(pooled, texts);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("text"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

TEST(HingeLoss, Examples) {
  EXPECT_EQ(hinge_loss(raw_scores({1.0, -1.0, -1.0, -1.0}, 0)), 0.0);
  EXPECT_EQ(hinge_loss(raw_scores({0.5, 0.5}, 0)), 1.0);
  EXPECT_THROW(hinge_loss(raw_scores({0.5, 0.5}, std::nullopt)), ContractError);
  EXPECT_THROW(hinge_loss(raw_scores({0.5, 0.5}, 2)), ContractError);
}

TEST(HingeLoss, MatchesOracle) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> raw(4);
    for (double& r : raw) r = u(rng);
    const std::size_t label = rng() % 4;
    const double margin = trial % 2 == 0 ? 1.0 : 0.3;
    const double loss = hinge_loss(raw_scores(raw, label), margin);
    EXPECT_NEAR(loss, tt::brute_hinge(raw, label, margin), 1e-12);
    EXPECT_GE(loss, 0.0);
  }
}

TEST(TotalLoss, Examples) {
  EXPECT_EQ(total_loss(0.7, 123.0, 0.0), 0.7);
  EXPECT_NEAR(total_loss(0.5, 0.01, 100.0), 1.5, 1e-12);
  EXPECT_NEAR(total_loss(0.0, 0.25, 100.0), 25.0, 1e-12);
  EXPECT_THROW(total_loss(0.5, 0.01, -1.0), ContractError);
}

TEST(Predict, TiesGoToLowestIndex) {
  EXPECT_EQ(predict(raw_scores({0.2, 0.9, 0.9, 0.1}, std::nullopt)), 1u);
  EXPECT_EQ(predict(raw_scores({0.3, 0.3}, std::nullopt)), 0u);
  EXPECT_EQ(predict(raw_scores({-0.5, 0.1, -0.2}, std::nullopt)), 1u);
}

TEST(MatcherTape, ScoresMatchValuePath) {
  const RowVector pooled = tt::random_matrix(1, 8, 9);
  const Matrix texts = tt::random_matrix(3, 8, 10);
  Tape tape(false);
  const Var s = ad::cosine_scores(tape.constant(pooled), tape.constant(texts));
  const CandidateScores ref = score_candidates(pooled, texts, 1);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(s.value()(i, 0), ref.raw[static_cast<std::size_t>(i)], 1e-14);
  EXPECT_NEAR(ad::hinge(s, 1).scalar(), hinge_loss(ref), 1e-14);
}

TEST(MatcherTape, GradientCheck) {
  Parameter pooled("pooled", tt::random_matrix(1, 8, 11)), texts("texts", tt::random_matrix(3, 8, 12));
  const double err = tt::max_gradient_error({&pooled, &texts}, [&](Tape& tape) {
    return ad::hinge(ad::cosine_scores(tape.leaf(pooled), tape.leaf(texts)), 2, 1.0);
  });
  EXPECT_LT(err, 1e-4);
}
