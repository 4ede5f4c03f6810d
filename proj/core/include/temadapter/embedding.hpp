#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "temadapter/tensor.hpp"
#include "temadapter/template_engine.hpp"

namespace temadapter {

/// Per-frame embeddings of one video from the frozen image encoder, T x C.
struct VideoFeatureSequence {
  std::string video_id;
  Matrix features;

  Eigen::Index frames() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  /// Throws DataError naming the video on an empty or non-finite matrix.
  void validate() const;
};

/// Frozen text-encoder embedding of one sentence, 1 x C.
struct TextEmbedding {
  std::string sentence_id;
  RowVector vector;

  Eigen::Index dim() const { return vector.cols(); }
  void validate() const;
};

/// A decoded frame, interleaved 8-bit channels in row-major order.
struct Frame {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;
};

/// Stable 64-bit FNV-1a digest, hex-encoded. Used for sentence keys.
std::string stable_hash(std::string_view text);

/// Store key of a sentence embedding.
std::string sentence_key(std::string_view sentence);

/// Frozen image/text encoder. Implementations must be deterministic: equal
/// inputs give bit-identical outputs.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::string name() const = 0;
  virtual Eigen::Index dim() const = 0;
  /// One row per frame.
  virtual Matrix encode_frames(std::span<const Frame> frames) const = 0;
  /// One row per sentence.
  virtual Matrix encode_sentences(std::span<const std::string> sentences) const = 0;
};

/// Deterministic hashing encoder used when no pretrained model is available.
/// Sentences become normalised bags of word vectors, so sentences sharing
/// words have correlated embeddings; frames become a fixed random projection
/// of coarse colour statistics.
class StubBackend final : public EmbeddingBackend {
 public:
  explicit StubBackend(Eigen::Index dim = 512, std::uint64_t seed = 0x7e3ada97e5ULL);
  /// "stub" at the default width, "stub:<dim>" otherwise; accepted by make_backend.
  std::string name() const override;
  Eigen::Index dim() const override { return dim_; }
  Matrix encode_frames(std::span<const Frame> frames) const override;
  Matrix encode_sentences(std::span<const std::string> sentences) const override;

  /// Unit-norm pseudo-random direction for a word; exposed for synthetic data.
  RowVector word_vector(std::string_view word) const;

 private:
  Eigen::Index dim_;
  std::uint64_t seed_;
  Matrix frame_projection_;
};

/// Names: "stub" (optionally "stub:<dim>"). "clip" is recognised but not
/// available in this build and raises BackendError, as does any unknown name.
std::unique_ptr<EmbeddingBackend> make_backend(std::string_view name);

/// Frames -> T x C features, validated.
VideoFeatureSequence embed_video(const EmbeddingBackend& backend, std::string video_id,
                                 std::span<const Frame> frames);

/// One embedding per sentence, order preserving. Keys are sentence_key(text).
std::vector<TextEmbedding> embed_text(const EmbeddingBackend& backend,
                                      std::span<const EventDescription> sentences);
std::vector<TextEmbedding> embed_text(const EmbeddingBackend& backend,
                                      std::span<const std::string> sentences);

}  // namespace temadapter
