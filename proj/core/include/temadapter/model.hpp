#pragma once

#include <cstdint>
#include <vector>

#include "temadapter/autograd.hpp"
#include "temadapter/config.hpp"
#include "temadapter/matcher.hpp"
#include "temadapter/semantic_aligner.hpp"
#include "temadapter/temporal_aligner.hpp"

namespace temadapter {

/// Loss terms of one item as nodes on a tape.
struct LossTerms {
  Var hinge;
  Var mse;    // unset when autoregression is disabled
  Var total;
  Var scores; // k x 1
};

/// Semantic aligner (theta), temporal encoder (phi) and reconstruction
/// decoder (psi), wired according to the ablation flags.
class TemAdapter {
 public:
  TemAdapter(const TrainingConfig& config, Eigen::Index embedding_dim);

  /// Hinge + gamma * reconstruction loss for one question. `texts` holds the
  /// k candidate embeddings (k x C), `label` the correct row.
  LossTerms training_forward(Tape& tape, const Matrix& video, const Matrix& texts, std::size_t label);

  /// Inference path: never runs the decoder.
  CandidateScores score(const Matrix& video, const Matrix& texts);

  /// Video side only: refined frames and their mean.
  AlignedVideo encode(const Matrix& video);
  /// Text side only: refined candidate embeddings.
  Matrix align_texts(const Matrix& texts, const Matrix& video);

  /// Decoder predictions (T x C) for one question under the configured
  /// reconstruction memory. Training-time analysis only.
  Matrix reconstruct(const Matrix& video, const Matrix& texts, std::size_t label);

  /// Every parameter, decoder included, in a fixed order.
  std::vector<Parameter*> parameters();
  /// Parameters used at inference (decoder and start token excluded).
  std::vector<Parameter*> inference_parameters();
  /// Parameters that receive gradients under the current ablation flags.
  std::vector<Parameter*> trainable_parameters();

  const TrainingConfig& config() const { return config_; }
  Eigen::Index embedding_dim() const { return embedding_dim_; }
  SemanticAligner& semantic() { return semantic_; }
  TemporalEncoder& encoder() { return encoder_; }
  TemporalDecoder& decoder() { return decoder_; }
  const TemporalDecoder& decoder() const { return decoder_; }

 private:
  Var encode(Tape& tape, const Var& video);
  Var align_texts(Tape& tape, const Var& texts, const Var& video);
  Var reconstruct(Tape& tape, const Var& frames, const Var& refined, const Var& aligned, std::size_t label);

  TrainingConfig config_;
  Eigen::Index embedding_dim_;
  SemanticAligner semantic_;
  TemporalEncoder encoder_;
  TemporalDecoder decoder_;
};

/// Adam with bias correction over a fixed parameter list.
class Adam {
 public:
  explicit Adam(std::vector<Parameter*> params, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);

  /// param -= lr * m_hat / (sqrt(v_hat) + eps), using Parameter::grad.
  void step(double lr);
  std::int64_t steps() const { return t_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  double beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
};

}  // namespace temadapter
