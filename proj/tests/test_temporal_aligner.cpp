#include <gtest/gtest.h>

#include <cmath>

#include "support/gradcheck.hpp"
#include "support/synthetic.hpp"
#include "temadapter/errors.hpp"
#include "temadapter/temporal_aligner.hpp"

using namespace temadapter;
namespace tt = temadapter::testing;

namespace {

TemporalAlignerShape small_shape() { return {8, 2, 1, 1, 16}; }

// Row-wise (x - mean) / sqrt(var + eps), written out by hand.
Matrix layer_norm_oracle(const Matrix& x, double eps = 1e-5) {
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double mean = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) mean += x(i, j);
    mean /= static_cast<double>(x.cols());
    double var = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) var += (x(i, j) - mean) * (x(i, j) - mean);
    var /= static_cast<double>(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) out(i, j) = (x(i, j) - mean) / std::sqrt(var + eps);
  }
  return out;
}

void zero_linear(nn::Linear& l) {
  l.weight.value.setZero();
  l.bias.value.setZero();
}

}  // namespace

TEST(TemporalEncode, SingleFramePoolsToItself) {
  nn::Rng rng(1);
  TemporalEncoder encoder(small_shape(), rng);
  const AlignedVideo out = temporal_encode({"v", tt::random_matrix(1, 8, 2)}, encoder);
  EXPECT_EQ(out.pooled, out.refined.row(0));
}

TEST(TemporalEncode, PooledIsFrameMean) {
  nn::Rng rng(3);
  TemporalEncoder encoder(small_shape(), rng);
  const AlignedVideo out = temporal_encode({"v", tt::random_matrix(6, 8, 4)}, encoder);
  for (Eigen::Index j = 0; j < 8; ++j) {
    double mean = 0.0;
    for (Eigen::Index i = 0; i < 6; ++i) mean += out.refined(i, j);
    EXPECT_NEAR(out.pooled(j), mean / 6.0, 1e-12);
  }
}

TEST(TemporalEncode, ZeroResidualBlocksLeaveOnlyPositions) {
  nn::Rng rng(5);
  TemporalEncoder encoder(small_shape(), rng);
  for (auto& layer : encoder.layers()) {
    zero_linear(layer.self_attention.output);
    zero_linear(layer.feed_forward.contract);
  }
  const RowVector frame = tt::random_matrix(1, 8, 6);
  const Matrix frames = frame.replicate(4, 1);
  const AlignedVideo out = temporal_encode({"v", frames}, encoder);
  const Matrix expected = layer_norm_oracle(layer_norm_oracle(frames + nn::sinusoidal_positions(4, 8)));
  EXPECT_LT((out.refined - expected).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_GT((out.refined.row(1) - out.refined.row(0)).norm(), 1e-3);
}

TEST(TemporalEncode, FullWidthShape) {
  nn::Rng rng(7);
  TemporalEncoder encoder(TemporalAlignerShape{}, rng);
  const AlignedVideo out = temporal_encode({"v", tt::random_matrix(128, 512, 8)}, encoder);
  EXPECT_EQ(out.refined.rows(), 128);
  EXPECT_EQ(out.refined.cols(), 512);
  EXPECT_TRUE(out.refined.allFinite());
}

TEST(TemporalEncode, ShapePreservedForEveryLength) {
  nn::Rng rng(9);
  TemporalEncoder encoder(small_shape(), rng);
  for (Eigen::Index t = 1; t <= 9; ++t) {
    const AlignedVideo out = temporal_encode({"v", tt::random_matrix(t, 8, 10 + static_cast<std::uint64_t>(t))}, encoder);
    EXPECT_EQ(out.refined.rows(), t);
    EXPECT_EQ(out.refined.cols(), 8);
  }
}

TEST(TemporalEncode, Errors) {
  nn::Rng rng(11);
  TemporalEncoder encoder(small_shape(), rng);
  EXPECT_THROW(temporal_encode({"v", tt::random_matrix(3, 6, 12)}, encoder), ContractError);
  EXPECT_THROW(temporal_encode({"v", Matrix(0, 8)}, encoder), ContractError);
}

TEST(Autoregress, CausalUnderPerturbation) {
  nn::Rng rng(13);
  TemporalEncoder encoder(small_shape(), rng);
  TemporalDecoder decoder(small_shape(), rng);
  const VideoFeatureSequence video{"v", tt::random_matrix(5, 8, 14)};
  const TextEmbedding guidance{"g", tt::random_matrix(1, 8, 15)};
  const AlignedVideo encoded = temporal_encode(video, encoder);
  const Matrix base = autoregress(video, guidance, encoded, decoder);
  for (Eigen::Index j = 0; j < 5; ++j) {
    VideoFeatureSequence moved = video;
    moved.features.row(j) += tt::random_matrix(1, 8, 16 + static_cast<std::uint64_t>(j));
    const Matrix out = autoregress(moved, guidance, encoded, decoder);
    for (Eigen::Index i = 0; i <= j; ++i) EXPECT_EQ(out.row(i), base.row(i)) << "frame " << j << " row " << i;
    if (j + 1 < 5) EXPECT_GT((out.row(j + 1) - base.row(j + 1)).norm(), 0.0);
  }
}

TEST(Autoregress, ZeroMemoryIsWellDefined) {
  nn::Rng rng(17);
  TemporalDecoder decoder(small_shape(), rng);
  const VideoFeatureSequence video{"v", tt::random_matrix(4, 8, 18)};
  const AlignedVideo zero{Matrix::Zero(4, 8), RowVector::Zero(8)};
  const Matrix out = autoregress(video, TextEmbedding{"g", RowVector::Zero(8)}, zero, decoder);
  EXPECT_EQ(out.rows(), 4);
  EXPECT_TRUE(out.allFinite());
}

TEST(Autoregress, CountsDecoderCalls) {
  nn::Rng rng(19);
  TemporalEncoder encoder(small_shape(), rng);
  TemporalDecoder decoder(small_shape(), rng);
  const VideoFeatureSequence video{"v", tt::random_matrix(3, 8, 20)};
  const AlignedVideo encoded = temporal_encode(video, encoder);
  EXPECT_EQ(decoder.calls(), 0u);
  autoregress(video, TextEmbedding{"g", tt::random_matrix(1, 8, 21)}, encoded, decoder);
  EXPECT_EQ(decoder.calls(), 1u);
}

TEST(Autoregress, Errors) {
  nn::Rng rng(22);
  TemporalDecoder decoder(small_shape(), rng);
  const VideoFeatureSequence video{"v", tt::random_matrix(3, 8, 23)};
  const AlignedVideo encoded{tt::random_matrix(3, 8, 24), RowVector::Zero(8)};
  EXPECT_THROW(autoregress(video, TextEmbedding{"g", tt::random_matrix(1, 6, 25)}, encoded, decoder), ContractError);
  const AlignedVideo shorter{tt::random_matrix(2, 8, 26), RowVector::Zero(8)};
  EXPECT_THROW(autoregress(video, TextEmbedding{"g", tt::random_matrix(1, 8, 25)}, shorter, decoder), ContractError);
}

TEST(ReconstructionLoss, Examples) {
  const Matrix target = tt::random_matrix(4, 8, 27);
  EXPECT_EQ(reconstruction_loss(target, target), 0.0);
  EXPECT_EQ(reconstruction_loss(Matrix::Ones(3, 5), Matrix::Zero(3, 5)), 15.0);
  EXPECT_THROW(reconstruction_loss(Matrix::Ones(3, 5), Matrix::Zero(3, 4)), ContractError);
}

TEST(ReconstructionLoss, MatchesOracleAndIsPositiveOffDiagonal) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Matrix a = tt::random_matrix(5, 7, 100 + s), b = tt::random_matrix(5, 7, 200 + s);
    const double loss = reconstruction_loss(a, b);
    EXPECT_NEAR(loss, tt::brute_reconstruction_loss(a, b), 1e-9);
    EXPECT_GT(loss, 0.0);
  }
}

TEST(FeaturePsnr, Examples) {
  const Matrix target = Matrix::Ones(2, 3);
  EXPECT_TRUE(std::isinf(feature_psnr(target, target)));
  EXPECT_NEAR(feature_psnr(target.array() + 0.1, target), 20.0, 1e-9);
  EXPECT_THROW(feature_psnr(target, Matrix::Ones(3, 2)), ContractError);
}

TEST(TemporalAligner, ReconstructionGradientCheck) {
  nn::Rng rng(28);
  TemporalEncoder encoder(small_shape(), rng);
  TemporalDecoder decoder(small_shape(), rng);
  std::vector<Parameter*> params;
  encoder.collect(params);
  decoder.collect(params);
  const Matrix frames = tt::random_matrix(4, 8, 29), guidance = tt::random_matrix(1, 8, 30);
  const double err = tt::max_gradient_error(params, [&](Tape& tape) {
    const Var video = tape.constant(frames);
    const Var refined = encoder.forward(tape, video);
    return ad::sum_squares(ad::sub(autoregress(tape, video, tape.constant(guidance), refined, decoder), video));
  });
  EXPECT_LT(err, 1e-4);
}
