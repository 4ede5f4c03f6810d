#include "temadapter/temporal_aligner.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "temadapter/errors.hpp"

namespace temadapter {
namespace {

const Matrix& positions(Eigen::Index length, Eigen::Index width) {
  static std::mutex mu;
  static std::map<std::pair<Eigen::Index, Eigen::Index>, Matrix> cache;
  std::lock_guard lock(mu);
  auto [it, inserted] = cache.try_emplace({length, width});
  if (inserted) it->second = nn::sinusoidal_positions(length, width);
  return it->second;
}

Var with_positions(Tape& tape, const Var& x) {
  return ad::add(x, tape.constant(positions(x.rows(), x.cols())));
}

void require_width(const Var& v, Eigen::Index dim, const char* what) {
  if (v.cols() != dim) {
    throw ContractError(std::string("temporal aligner: ") + what + " width " +
                        std::to_string(v.cols()) + " != " + std::to_string(dim));
  }
}

}  // namespace

TemporalEncoder::TemporalEncoder(const TemporalAlignerShape& shape, nn::Rng& rng)
    : dim_(shape.embedding_dim) {
  if (shape.encoder_layers <= 0) throw ConfigError("temporal encoder: layers must be positive");
  for (int i = 0; i < shape.encoder_layers; ++i) {
    layers_.emplace_back("temporal.encoder" + std::to_string(i), shape.embedding_dim, shape.heads,
                         shape.ff_dim, rng);
  }
}

Var TemporalEncoder::forward(Tape& tape, const Var& video) {
  require_width(video, dim_, "encoder input");
  if (video.rows() < 1) throw ContractError("temporal encoder: video has no frames");
  Var x = with_positions(tape, video);
  for (auto& layer : layers_) x = layer.forward(tape, x);
  if (!x.value().allFinite()) throw NumericError("temporal encoder: non-finite output");
  return x;
}

void TemporalEncoder::collect(std::vector<Parameter*>& out) {
  for (auto& layer : layers_) layer.collect(out);
}

TemporalDecoder::TemporalDecoder(const TemporalAlignerShape& shape, nn::Rng& rng)
    : dim_(shape.embedding_dim) {
  if (shape.decoder_layers <= 0) throw ConfigError("temporal decoder: layers must be positive");
  std::normal_distribution<double> normal(0.0, 0.02);
  Matrix start(1, shape.embedding_dim);
  for (Eigen::Index i = 0; i < start.cols(); ++i) start(0, i) = normal(rng);
  start_token_ = Parameter("temporal.decoder.start_token", std::move(start));
  for (int i = 0; i < shape.decoder_layers; ++i) {
    layers_.emplace_back("temporal.decoder" + std::to_string(i), shape.embedding_dim, shape.heads,
                         shape.ff_dim, rng);
  }
  head_ = nn::Linear("temporal.decoder.head", shape.embedding_dim, shape.embedding_dim, rng);
}

TemporalDecoder::TemporalDecoder(const TemporalDecoder& other)
    : dim_(other.dim_),
      start_token_(other.start_token_),
      layers_(other.layers_),
      head_(other.head_),
      calls_(other.calls_.load()) {}

TemporalDecoder& TemporalDecoder::operator=(const TemporalDecoder& other) {
  if (this != &other) {
    dim_ = other.dim_;
    start_token_ = other.start_token_;
    layers_ = other.layers_;
    head_ = other.head_;
    calls_.store(other.calls_.load());
  }
  return *this;
}

Var TemporalDecoder::forward(Tape& tape, const Var& video, const Var& memory) {
  require_width(video, dim_, "decoder input");
  require_width(memory, dim_, "decoder memory");
  ++calls_;
  const Eigen::Index frames = video.rows();
  if (frames < 1) throw ContractError("temporal decoder: video has no frames");
  // Input position i holds frame i-1, so causal attention at i sees frames < i.
  Var shifted = tape.leaf(start_token_);
  if (frames > 1) {
    const Var parts[] = {shifted, ad::slice_rows(video, 0, frames - 1)};
    shifted = ad::concat_rows(parts);
  }
  Var x = with_positions(tape, shifted);
  for (auto& layer : layers_) x = layer.forward(tape, x, memory, AttentionMask::kCausal);
  x = head_.forward(tape, x);
  if (!x.value().allFinite()) throw NumericError("temporal decoder: non-finite prediction");
  return x;
}

void TemporalDecoder::collect(std::vector<Parameter*>& out) {
  out.push_back(&start_token_);
  for (auto& layer : layers_) layer.collect(out);
  head_.collect(out);
}

Var autoregress(Tape& tape, const Var& video, const Var& guidance, const Var& refined,
                TemporalDecoder& decoder) {
  if (guidance.rows() != 1) throw ContractError("autoregress: guidance must be a single row");
  if (refined.rows() != video.rows() || refined.cols() != video.cols()) {
    throw ContractError("autoregress: encoded features and video differ in shape");
  }
  const Var memory = ad::add_row(refined, guidance);
  return decoder.forward(tape, video, memory);
}

AlignedVideo temporal_encode(const VideoFeatureSequence& video, TemporalEncoder& encoder) {
  Tape tape(false);
  const Var refined = encoder.forward(tape, tape.constant(video.features));
  AlignedVideo out;
  out.refined = refined.value();
  out.pooled = out.refined.colwise().mean();
  return out;
}

Matrix autoregress(const VideoFeatureSequence& video, const TextEmbedding& guidance,
                   const AlignedVideo& encoded, TemporalDecoder& decoder) {
  Tape tape(false);
  const Var out = autoregress(tape, tape.constant(video.features), tape.constant(guidance.vector),
                              tape.constant(encoded.refined), decoder);
  return out.value();
}

double reconstruction_loss(const Matrix& predicted, const Matrix& target) {
  if (predicted.rows() != target.rows() || predicted.cols() != target.cols()) {
    throw ContractError("reconstruction_loss: shape mismatch");
  }
  return (predicted - target).squaredNorm();
}

double feature_psnr(const Matrix& predicted, const Matrix& target) {
  if (predicted.rows() != target.rows() || predicted.cols() != target.cols() || target.size() == 0) {
    throw ContractError("feature_psnr: shape mismatch");
  }
  const double mse = (predicted - target).squaredNorm() / static_cast<double>(target.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  const double peak = target.cwiseAbs().maxCoeff();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace temadapter
