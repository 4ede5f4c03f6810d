#pragma once

#include <span>
#include <vector>

#include "temadapter/autograd.hpp"
#include "temadapter/embedding.hpp"
#include "temadapter/nn.hpp"

namespace temadapter {

struct SemanticAlignerShape {
  Eigen::Index embedding_dim = 512;  // C
  Eigen::Index latent_dim = 128;     // D
  int heads = 16;
  int layers = 1;
  Eigen::Index ff_dim = 2048;
};

/// Text-side adapter: refines a sentence embedding with the video through a
/// transformer decoder in a reduced space and a gated residual,
///
///   g = g(qa) + lambda (.) up(decoder(down(g(qa)), down(f(v))))
///
/// Each text row is its own length-1 query sequence; the video frames are
/// the memory and carry no positional encoding.
class SemanticAligner {
 public:
  SemanticAligner() = default;
  SemanticAligner(const SemanticAlignerShape& shape, nn::Rng& rng);

  /// texts: k x C, video: T x C -> k x C. Rows are aligned independently.
  Var forward(Tape& tape, const Var& texts, const Var& video);

  const SemanticAlignerShape& shape() const { return shape_; }
  Parameter& gate() { return gate_; }
  std::vector<nn::DecoderLayer>& layers() { return layers_; }
  nn::Linear& down() { return down_; }
  nn::Linear& up() { return up_; }
  void collect(std::vector<Parameter*>& out);

 private:
  SemanticAlignerShape shape_;
  nn::Linear down_;
  std::vector<nn::DecoderLayer> layers_;
  nn::Linear up_;
  Parameter gate_;  // lambda, 1 x C, starts at zero
};

/// Refined embedding of one sentence given the video.
TextEmbedding semantic_align(const TextEmbedding& text, const VideoFeatureSequence& video,
                             SemanticAligner& aligner);

/// Batched form; equals aligning each text independently.
std::vector<TextEmbedding> semantic_align(std::span<const TextEmbedding> texts,
                                          const VideoFeatureSequence& video,
                                          SemanticAligner& aligner);

}  // namespace temadapter
