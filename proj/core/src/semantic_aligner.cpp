#include "temadapter/semantic_aligner.hpp"

#include "temadapter/errors.hpp"

namespace temadapter {
namespace {

void require_finite(const Var& v, const char* layer) {
  if (!v.value().allFinite()) {
    throw NumericError(std::string("semantic aligner: non-finite output of ") + layer);
  }
}

}  // namespace

SemanticAligner::SemanticAligner(const SemanticAlignerShape& shape, nn::Rng& rng)
    : shape_(shape),
      down_("semantic.down", shape.embedding_dim, shape.latent_dim, rng),
      up_("semantic.up", shape.latent_dim, shape.embedding_dim, rng),
      gate_("semantic.gate", Matrix::Zero(1, shape.embedding_dim)) {
  if (shape.layers <= 0) throw ConfigError("semantic aligner: layers must be positive");
  layers_.reserve(static_cast<std::size_t>(shape.layers));
  for (int i = 0; i < shape.layers; ++i) {
    layers_.emplace_back("semantic.decoder" + std::to_string(i), shape.latent_dim, shape.heads,
                         shape.ff_dim, rng);
  }
}

Var SemanticAligner::forward(Tape& tape, const Var& texts, const Var& video) {
  if (texts.cols() != shape_.embedding_dim || video.cols() != shape_.embedding_dim) {
    throw ContractError("semantic aligner: expected width " + std::to_string(shape_.embedding_dim) +
                        ", got text " + std::to_string(texts.cols()) + " / video " +
                        std::to_string(video.cols()));
  }
  if (video.rows() < 1) throw ContractError("semantic aligner: video has no frames");
  Var query = down_.forward(tape, texts);
  const Var memory = down_.forward(tape, video);
  require_finite(query, "down projection");
  for (auto& layer : layers_) {
    query = layer.forward(tape, query, memory, AttentionMask::kDiagonal);
    require_finite(query, "decoder");
  }
  const Var branch = up_.forward(tape, query);
  require_finite(branch, "up projection");
  Var gate = tape.leaf(gate_);
  if (texts.rows() > 1) {
    std::vector<Var> rows(static_cast<std::size_t>(texts.rows()), gate);
    gate = ad::concat_rows(rows);
  }
  return ad::add(texts, ad::hadamard(gate, branch));
}

void SemanticAligner::collect(std::vector<Parameter*>& out) {
  down_.collect(out);
  for (auto& layer : layers_) layer.collect(out);
  up_.collect(out);
  out.push_back(&gate_);
}

std::vector<TextEmbedding> semantic_align(std::span<const TextEmbedding> texts,
                                          const VideoFeatureSequence& video,
                                          SemanticAligner& aligner) {
  if (texts.empty()) throw ContractError("semantic_align: no texts");
  Matrix stacked(static_cast<Eigen::Index>(texts.size()), texts.front().dim());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].dim() != stacked.cols()) throw ContractError("semantic_align: ragged text widths");
    stacked.row(static_cast<Eigen::Index>(i)) = texts[i].vector;
  }
  Tape tape(false);
  const Var out = aligner.forward(tape, tape.constant(std::move(stacked)), tape.constant(video.features));
  std::vector<TextEmbedding> result;
  result.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    result.push_back({texts[i].sentence_id, out.value().row(static_cast<Eigen::Index>(i))});
  }
  return result;
}

TextEmbedding semantic_align(const TextEmbedding& text, const VideoFeatureSequence& video,
                             SemanticAligner& aligner) {
  return semantic_align(std::span<const TextEmbedding>(&text, 1), video, aligner).front();
}

}  // namespace temadapter
