#include "temadapter/model.hpp"

#include <cmath>

#include "temadapter/errors.hpp"

namespace temadapter {
namespace {

SemanticAlignerShape semantic_shape(const TrainingConfig& c, Eigen::Index dim) {
  return {dim, c.latent_dim, c.heads, c.semantic_layers, c.semantic_ff_dim};
}

TemporalAlignerShape temporal_shape(const TrainingConfig& c, Eigen::Index dim) {
  return {dim, c.heads, c.encoder_layers, c.decoder_layers, c.ff_dim};
}

// Each module draws its initial weights from its own seeded stream.
nn::Rng stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  return nn::Rng(seq);
}

SemanticAligner make_semantic(const TrainingConfig& c, Eigen::Index dim) {
  nn::Rng rng = stream(c.seed, 1);
  return SemanticAligner(semantic_shape(c, dim), rng);
}

TemporalEncoder make_encoder(const TrainingConfig& c, Eigen::Index dim) {
  nn::Rng rng = stream(c.seed, 2);
  return TemporalEncoder(temporal_shape(c, dim), rng);
}

TemporalDecoder make_decoder(const TrainingConfig& c, Eigen::Index dim) {
  nn::Rng rng = stream(c.seed, 3);
  return TemporalDecoder(temporal_shape(c, dim), rng);
}

}  // namespace

TemAdapter::TemAdapter(const TrainingConfig& config, Eigen::Index embedding_dim)
    : config_((config.validate(embedding_dim), config)),
      embedding_dim_(embedding_dim),
      semantic_(make_semantic(config, embedding_dim)),
      encoder_(make_encoder(config, embedding_dim)),
      decoder_(make_decoder(config, embedding_dim)) {}

Var TemAdapter::encode(Tape& tape, const Var& video) {
  return config_.ablations.use_temporal_aligner ? encoder_.forward(tape, video) : video;
}

Var TemAdapter::align_texts(Tape& tape, const Var& texts, const Var& video) {
  return config_.ablations.use_semantic_aligner ? semantic_.forward(tape, texts, video) : texts;
}

Var TemAdapter::reconstruct(Tape& tape, const Var& frames, const Var& refined, const Var& aligned,
                            std::size_t label) {
  Var guidance = ad::slice_rows(aligned, static_cast<Eigen::Index>(label), 1);
  Var memory_video = refined;
  switch (config_.reconstruction_memory) {
    case ReconstructionMemory::kFull:
      break;
    case ReconstructionMemory::kVideoOnly:
      guidance = tape.constant(Matrix::Zero(1, embedding_dim_));
      break;
    case ReconstructionMemory::kNone:
      guidance = tape.constant(Matrix::Zero(1, embedding_dim_));
      memory_video = tape.constant(Matrix::Zero(frames.rows(), embedding_dim_));
      break;
  }
  return autoregress(tape, frames, guidance, memory_video, decoder_);
}

Matrix TemAdapter::reconstruct(const Matrix& video, const Matrix& texts, std::size_t label) {
  if (label >= static_cast<std::size_t>(texts.rows())) throw ContractError("reconstruct: label out of range");
  Tape tape(false);
  const Var frames = tape.constant(video);
  const Var refined = encode(tape, frames);
  const Var aligned = align_texts(tape, tape.constant(texts), frames);
  return reconstruct(tape, frames, refined, aligned, label).value();
}

LossTerms TemAdapter::training_forward(Tape& tape, const Matrix& video, const Matrix& texts,
                                       std::size_t label) {
  if (video.cols() != embedding_dim_ || texts.cols() != embedding_dim_) {
    throw ContractError("training_forward: expected width " + std::to_string(embedding_dim_));
  }
  const Var frames = tape.constant(video);
  const Var refined = encode(tape, frames);
  const Var pooled = ad::mean_rows(refined);
  const Var aligned = align_texts(tape, tape.constant(texts), frames);

  LossTerms out;
  out.scores = ad::cosine_scores(pooled, aligned);
  out.hinge = ad::hinge(out.scores, label, config_.margin);
  out.total = out.hinge;
  if (config_.ablations.use_autoregression) {
    const Var predicted = reconstruct(tape, frames, refined, aligned, label);
    out.mse = ad::sum_squares(ad::sub(predicted, frames));
    out.total = ad::add(out.hinge, ad::scale(out.mse, config_.gamma));
  }
  if (!std::isfinite(out.total.scalar())) throw NumericError("training_forward: non-finite loss");
  return out;
}

AlignedVideo TemAdapter::encode(const Matrix& video) {
  Tape tape(false);
  const Var refined = encode(tape, tape.constant(video));
  AlignedVideo out;
  out.refined = refined.value();
  out.pooled = out.refined.colwise().mean();
  return out;
}

Matrix TemAdapter::align_texts(const Matrix& texts, const Matrix& video) {
  Tape tape(false);
  return align_texts(tape, tape.constant(texts), tape.constant(video)).value();
}

CandidateScores TemAdapter::score(const Matrix& video, const Matrix& texts) {
  if (video.cols() != embedding_dim_ || texts.cols() != embedding_dim_) {
    throw ContractError("score: expected width " + std::to_string(embedding_dim_));
  }
  const AlignedVideo aligned = encode(video);
  return score_candidates(aligned.pooled, align_texts(texts, video));
}

std::vector<Parameter*> TemAdapter::inference_parameters() {
  std::vector<Parameter*> out;
  semantic_.collect(out);
  encoder_.collect(out);
  return out;
}

std::vector<Parameter*> TemAdapter::parameters() {
  std::vector<Parameter*> out = inference_parameters();
  decoder_.collect(out);
  return out;
}

std::vector<Parameter*> TemAdapter::trainable_parameters() {
  std::vector<Parameter*> out;
  if (config_.ablations.use_semantic_aligner) semantic_.collect(out);
  if (config_.ablations.use_temporal_aligner) encoder_.collect(out);
  if (config_.ablations.use_autoregression) decoder_.collect(out);
  return out;
}

Adam::Adam(std::vector<Parameter*> params, double beta1, double beta2, double eps)
    : params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (Parameter* p : params_) {
    m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

void Adam::step(double lr) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = *params_[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

}  // namespace temadapter
