#include "temadapter/embedding.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "temadapter/errors.hpp"

namespace temadapter {
namespace {

constexpr int kGrid = 4;
constexpr int kStatChannels = 3;
constexpr Eigen::Index kFrameStats = kGrid * kGrid * kStatChannels;

std::uint64_t fnv1a(std::string_view text, std::uint64_t basis = 0xcbf29ce484222325ULL) {
  std::uint64_t h = basis;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// splitmix64: small counter-based generator whose output is identical on
// every platform, unlike the std:: distributions.
struct SplitMix {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
  double gaussian() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
};

std::vector<std::string> words_of(std::string_view sentence) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : sentence) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

void VideoFeatureSequence::validate() const {
  if (features.rows() == 0 || features.cols() == 0) {
    throw DataError("video '" + video_id + "': empty feature matrix");
  }
  if (!features.allFinite()) throw DataError("video '" + video_id + "': non-finite features");
}

void TextEmbedding::validate() const {
  if (vector.cols() == 0) throw DataError("sentence '" + sentence_id + "': empty embedding");
  if (!vector.allFinite()) throw DataError("sentence '" + sentence_id + "': non-finite embedding");
}

std::string stable_hash(std::string_view text) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

std::string sentence_key(std::string_view sentence) { return "text:" + stable_hash(sentence); }

StubBackend::StubBackend(Eigen::Index dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim <= 0) throw ConfigError("stub backend: dimension must be positive");
  SplitMix rng{seed ^ 0x5f3759dfULL};
  frame_projection_.resize(kFrameStats + 1, dim);
  const double s = 1.0 / std::sqrt(static_cast<double>(kFrameStats));
  for (Eigen::Index r = 0; r < frame_projection_.rows(); ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) frame_projection_(r, c) = rng.gaussian() * s;
  }
}

std::string StubBackend::name() const {
  return dim_ == 512 ? std::string("stub") : "stub:" + std::to_string(dim_);
}

RowVector StubBackend::word_vector(std::string_view word) const {
  SplitMix rng{fnv1a(word) ^ seed_};
  RowVector v(dim_);
  for (Eigen::Index i = 0; i < dim_; ++i) v(i) = rng.gaussian();
  return v / v.norm();
}

Matrix StubBackend::encode_sentences(std::span<const std::string> sentences) const {
  Matrix out(static_cast<Eigen::Index>(sentences.size()), dim_);
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto words = words_of(sentences[i]);
    RowVector acc = RowVector::Zero(dim_);
    if (words.empty()) acc = word_vector("<empty>");
    for (std::size_t w = 0; w < words.size(); ++w) {
      acc += word_vector(words[w]);
      if (w + 1 < words.size()) acc += 0.5 * word_vector(words[w] + " " + words[w + 1]);
    }
    out.row(static_cast<Eigen::Index>(i)) = acc / acc.norm();
  }
  return out;
}

Matrix StubBackend::encode_frames(std::span<const Frame> frames) const {
  Matrix out(static_cast<Eigen::Index>(frames.size()), dim_);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const Frame& fr = frames[f];
    if (fr.width <= 0 || fr.height <= 0 || fr.channels <= 0 ||
        fr.pixels.size() != static_cast<std::size_t>(fr.width) * fr.height * fr.channels) {
      throw DataError("stub backend: malformed frame " + std::to_string(f));
    }
    Eigen::RowVectorXd stats = Eigen::RowVectorXd::Zero(kFrameStats + 1);
    Eigen::RowVectorXd counts = Eigen::RowVectorXd::Zero(kGrid * kGrid);
    for (int y = 0; y < fr.height; ++y) {
      const int gy = y * kGrid / fr.height;
      for (int x = 0; x < fr.width; ++x) {
        const int gx = x * kGrid / fr.width;
        const int cell = gy * kGrid + gx;
        counts(cell) += 1.0;
        for (int c = 0; c < kStatChannels; ++c) {
          const int src = std::min(c, fr.channels - 1);
          const auto px = fr.pixels[(static_cast<std::size_t>(y) * fr.width + x) * fr.channels + src];
          stats(cell * kStatChannels + c) += px / 255.0;
        }
      }
    }
    for (int cell = 0; cell < kGrid * kGrid; ++cell) {
      for (int c = 0; c < kStatChannels; ++c) {
        stats(cell * kStatChannels + c) = stats(cell * kStatChannels + c) / counts(cell) - 0.5;
      }
    }
    stats(kFrameStats) = 1.0;
    out.row(static_cast<Eigen::Index>(f)) = stats * frame_projection_;
  }
  return out;
}

std::unique_ptr<EmbeddingBackend> make_backend(std::string_view name) {
  if (name == "stub") return std::make_unique<StubBackend>();
  if (name.starts_with("stub:")) {
    const auto digits = name.substr(5);
    long dim = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), dim);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || dim <= 0) {
      throw BackendError("bad stub backend dimension in '" + std::string(name) + "'");
    }
    return std::make_unique<StubBackend>(dim);
  }
  if (name == "clip") {
    throw BackendError(
        "backend 'clip' is not available in this build; export embeddings with an external "
        "encoder or use the 'stub' backend");
  }
  throw BackendError("unknown embedding backend '" + std::string(name) + "'");
}

VideoFeatureSequence embed_video(const EmbeddingBackend& backend, std::string video_id,
                                 std::span<const Frame> frames) {
  if (frames.empty()) throw ContractError("embed_video: no frames for '" + video_id + "'");
  VideoFeatureSequence seq{std::move(video_id), backend.encode_frames(frames)};
  if (seq.features.rows() != static_cast<Eigen::Index>(frames.size())) {
    throw BackendError(backend.name() + ": returned " + std::to_string(seq.features.rows()) +
                       " rows for " + std::to_string(frames.size()) + " frames");
  }
  seq.validate();
  return seq;
}

std::vector<TextEmbedding> embed_text(const EmbeddingBackend& backend,
                                      std::span<const std::string> sentences) {
  if (sentences.empty()) throw ContractError("embed_text: no sentences");
  const Matrix m = backend.encode_sentences(sentences);
  if (m.rows() != static_cast<Eigen::Index>(sentences.size())) {
    throw BackendError(backend.name() + ": wrong number of sentence embeddings");
  }
  std::vector<TextEmbedding> out;
  out.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    TextEmbedding e{sentence_key(sentences[i]), m.row(static_cast<Eigen::Index>(i))};
    e.validate();
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<TextEmbedding> embed_text(const EmbeddingBackend& backend,
                                      std::span<const EventDescription> sentences) {
  std::vector<std::string> texts;
  texts.reserve(sentences.size());
  for (const auto& s : sentences) texts.push_back(s.text);
  return embed_text(backend, texts);
}

}  // namespace temadapter
