#pragma once

#include <atomic>
#include <vector>

#include "temadapter/autograd.hpp"
#include "temadapter/embedding.hpp"
#include "temadapter/nn.hpp"

namespace temadapter {

struct TemporalAlignerShape {
  Eigen::Index embedding_dim = 512;
  int heads = 16;
  int encoder_layers = 1;
  int decoder_layers = 1;
  Eigen::Index ff_dim = 2048;
};

/// Refined frame features f and their frame mean.
struct AlignedVideo {
  Matrix refined;   // T x C
  RowVector pooled; // 1 x C
};

/// Transformer encoder over frames with sinusoidal positions: T x C -> T x C.
class TemporalEncoder {
 public:
  TemporalEncoder() = default;
  TemporalEncoder(const TemporalAlignerShape& shape, nn::Rng& rng);

  Var forward(Tape& tape, const Var& video);

  std::vector<nn::EncoderLayer>& layers() { return layers_; }
  void collect(std::vector<Parameter*>& out);

 private:
  Eigen::Index dim_ = 0;
  std::vector<nn::EncoderLayer> layers_;
};

/// Causal transformer decoder predicting frame i from frames 0..i-1 (row 0
/// from a learned start token), attending to memory = f + g. Training only.
class TemporalDecoder {
 public:
  TemporalDecoder() = default;
  TemporalDecoder(const TemporalAlignerShape& shape, nn::Rng& rng);
  TemporalDecoder(const TemporalDecoder& other);
  TemporalDecoder& operator=(const TemporalDecoder& other);

  /// video: raw T x C frames; memory: T x C fused guidance. Returns T x C predictions.
  Var forward(Tape& tape, const Var& video, const Var& memory);

  Parameter& start_token() { return start_token_; }
  std::vector<nn::DecoderLayer>& layers() { return layers_; }
  void collect(std::vector<Parameter*>& out);

  /// Number of forward() calls so far; inference paths must leave it unchanged.
  std::size_t calls() const { return calls_.load(); }

 private:
  Eigen::Index dim_ = 0;
  Parameter start_token_;
  std::vector<nn::DecoderLayer> layers_;
  nn::Linear head_;
  std::atomic<std::size_t> calls_{0};
};

/// Encoder + fused memory + decoder on one tape: the decoder's memory is
/// refined + broadcast(guidance).
Var autoregress(Tape& tape, const Var& video, const Var& guidance, const Var& refined,
                TemporalDecoder& decoder);

AlignedVideo temporal_encode(const VideoFeatureSequence& video, TemporalEncoder& encoder);

/// Predicted T x C features; row i depends on frames < i of `video` only
/// (the memory is taken from `encoded` and `guidance`).
Matrix autoregress(const VideoFeatureSequence& video, const TextEmbedding& guidance,
                   const AlignedVideo& encoded, TemporalDecoder& decoder);

/// Sum over frames of squared Euclidean distance.
double reconstruction_loss(const Matrix& predicted, const Matrix& target);

/// 10 log10(peak^2 / mse) with peak = max |target|; +infinity when mse == 0.
double feature_psnr(const Matrix& predicted, const Matrix& target);

}  // namespace temadapter
