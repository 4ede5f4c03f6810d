#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "support/gradcheck.hpp"
#include "support/synthetic.hpp"
#include "temadapter/errors.hpp"
#include "temadapter/semantic_aligner.hpp"

using namespace temadapter;
namespace tt = temadapter::testing;

namespace {

SemanticAligner small_aligner(std::uint64_t seed, Eigen::Index dim = 8, Eigen::Index latent = 4) {
  nn::Rng rng(seed);
  return SemanticAligner({dim, latent, 2, 1, 2 * dim}, rng);
}

TextEmbedding text(std::uint64_t seed, Eigen::Index dim = 8) { return {"t" + std::to_string(seed), tt::random_matrix(1, dim, seed)}; }

VideoFeatureSequence video(Eigen::Index frames, std::uint64_t seed, Eigen::Index dim = 8) {
  return {"v", tt::random_matrix(frames, dim, seed)};
}

}  // namespace

TEST(SemanticAlign, ZeroGateIsExactIdentity) {
  SemanticAligner aligner = small_aligner(1);
  ASSERT_EQ(aligner.gate().value.norm(), 0.0);
  const TextEmbedding t = text(2);
  EXPECT_EQ(semantic_align(t, video(5, 3), aligner).vector, t.vector);
}

TEST(SemanticAlign, DefaultShapeZeroGateIdentity) {
  nn::Rng rng(4);
  SemanticAligner aligner(SemanticAlignerShape{}, rng);
  const TextEmbedding t = text(5, 512);
  const TextEmbedding out = semantic_align(t, video(16, 6, 512), aligner);
  EXPECT_EQ(out.vector, t.vector);
  EXPECT_EQ(out.dim(), 512);
}

TEST(SemanticAlign, DeviationBoundedByGateTimesBranch) {
  SemanticAligner aligner = small_aligner(7);
  const TextEmbedding t = text(8);
  const VideoFeatureSequence v{"v", t.vector};  // T = 1, memory row equals the query
  aligner.gate().value.setOnes();
  const RowVector branch = semantic_align(t, v, aligner).vector - t.vector;
  aligner.gate().value = tt::random_matrix(1, 8, 9, 0.01);
  const RowVector deviation = semantic_align(t, v, aligner).vector - t.vector;
  EXPECT_LE(deviation.norm(), aligner.gate().value.cwiseAbs().maxCoeff() * branch.norm() + 1e-15);
  EXPECT_GT(deviation.norm(), 0.0);
}

TEST(SemanticAlign, MemoryPermutationInvariance) {
  SemanticAligner aligner = small_aligner(10);
  aligner.gate().value = tt::random_matrix(1, 8, 11);
  const TextEmbedding t = text(12);
  const VideoFeatureSequence v = video(3, 13);
  const RowVector reference = semantic_align(t, v, aligner).vector;
  std::vector<int> order = {0, 1, 2};
  do {
    VideoFeatureSequence p{"v", Matrix(3, 8)};
    for (int i = 0; i < 3; ++i) p.features.row(i) = v.features.row(order[i]);
    EXPECT_LT((semantic_align(t, p, aligner).vector - reference).cwiseAbs().maxCoeff(), 1e-12);
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST(SemanticAlign, BatchEqualsIndependent) {
  SemanticAligner aligner = small_aligner(14);
  aligner.gate().value = tt::random_matrix(1, 8, 15);
  const std::vector<TextEmbedding> texts = {text(16), text(17), text(18), text(19)};
  const VideoFeatureSequence v = video(6, 20);
  const auto batch = semantic_align(texts, v, aligner);
  ASSERT_EQ(batch.size(), texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    EXPECT_LT((batch[i].vector - semantic_align(texts[i], v, aligner).vector).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(batch[i].sentence_id, texts[i].sentence_id);
  }
}

TEST(SemanticAlign, Errors) {
  SemanticAligner aligner = small_aligner(21);
  EXPECT_THROW(semantic_align(text(22, 6), video(3, 23), aligner), ContractError);
  EXPECT_THROW(semantic_align(text(22), video(3, 23, 6), aligner), ContractError);
  EXPECT_THROW(semantic_align(text(22), VideoFeatureSequence{"v", Matrix(0, 8)}, aligner), ContractError);
  EXPECT_THROW(semantic_align(std::span<const TextEmbedding>(), video(3, 23), aligner), ContractError);
  nn::Rng rng(0);
  EXPECT_THROW(SemanticAligner({8, 4, 2, 0, 8}, rng), ConfigError);
  EXPECT_THROW(SemanticAligner({8, 5, 2, 1, 8}, rng), ConfigError);
}

TEST(SemanticAlign, NonFiniteIntermediateNamesLayer) {
  SemanticAligner aligner = small_aligner(24);
  aligner.down().weight.value(0, 0) = std::numeric_limits<double>::infinity();
  try {
    semantic_align(text(25), video(3, 26), aligner);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("semantic aligner"), std::string::npos);
  }
}

TEST(SemanticAlign, GradientCheck) {
  SemanticAligner aligner = small_aligner(27);
  aligner.gate().value = tt::random_matrix(1, 8, 28);
  std::vector<Parameter*> params;
  aligner.collect(params);
  const Matrix texts = tt::random_matrix(2, 8, 29), frames = tt::random_matrix(3, 8, 30);
  const Matrix weights = tt::random_matrix(2, 8, 31);
  const double err = tt::max_gradient_error(params, [&](Tape& tape) {
    const Var out = aligner.forward(tape, tape.constant(texts), tape.constant(frames));
    return ad::sum(ad::hadamard(out, tape.constant(weights)));
  });
  EXPECT_LT(err, 1e-4);
}
