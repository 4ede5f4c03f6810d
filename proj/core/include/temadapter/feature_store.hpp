#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "temadapter/embedding.hpp"
#include "temadapter/frame_plan.hpp"

namespace temadapter {

/// One multiple-choice question as stored next to its features.
struct QARecord {
  std::string qid;
  std::string video_id;
  std::string question;
  std::vector<std::string> answers;
  std::size_t label = 0;
  std::string category;
  /// Template sentences, one per answer.
  std::vector<std::string> sentences;
  std::vector<bool> used_fallback;
  /// "<question> <answer>" strings, one per answer.
  std::vector<std::string> raw_texts;
};

void to_json(nlohmann::json& j, const QARecord& r);
void from_json(const nlohmann::json& j, QARecord& r);

/// Store-wide metadata, written to store.json.
struct StoreInfo {
  std::string backend;
  std::int64_t dim = 0;
  std::string plan;
  std::uint64_t seed = 0;
  std::vector<std::string> splits;
};

/// Manifest line: where one record lives in the split's blob.
struct ManifestEntry {
  std::string key;
  std::string kind;  // "video" or "text"
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::string dtype = "f32";
  std::uint32_t checksum = 0;  // CRC-32 of the stored bytes
  std::uint64_t offset = 0;    // byte offset into <split>.bin
};

/// Builds a store directory. Every split is written to temporary files and
/// renamed into place by commit(), so readers never see a half-written split.
///
/// Values are stored as little-endian float32; get returns the float32 value
/// widened to double, so records already representable in float32 round-trip
/// bit-exactly.
class FeatureStoreWriter {
 public:
  FeatureStoreWriter(std::filesystem::path root, StoreInfo info);

  /// Throws DataError on non-finite values. Repeated keys keep the first record.
  void put_video(const std::string& split, const VideoFeatureSequence& video);
  void put_text(const std::string& split, const TextEmbedding& text);
  void put_qa(const std::string& split, const QARecord& record);

  void commit();

 private:
  struct Split {
    std::vector<ManifestEntry> manifest;
    std::map<std::string, std::size_t> index;
    std::vector<float> blob;
    std::vector<QARecord> qa;
  };
  void put(const std::string& split, const std::string& key, const std::string& kind, const Matrix& m);

  std::filesystem::path root_;
  StoreInfo info_;
  std::map<std::string, Split> splits_;
};

/// Read side. Safe for concurrent readers.
class FeatureStore {
 public:
  /// Throws NotFoundError when the directory or store.json is missing.
  explicit FeatureStore(std::filesystem::path root);

  const StoreInfo& info() const { return info_; }
  bool has_split(const std::string& split) const;

  /// Missing key -> NotFoundError; bad shape, dtype, checksum or a short blob
  /// -> CorruptionError.
  VideoFeatureSequence get_video(const std::string& split, const std::string& video_id) const;
  TextEmbedding get_text(const std::string& split, const std::string& sentence_id) const;
  std::vector<QARecord> questions(const std::string& split) const;
  std::vector<ManifestEntry> manifest(const std::string& split) const;

 private:
  struct Split {
    std::map<std::string, ManifestEntry> entries;
    std::filesystem::path blob;
  };
  const Split& split(const std::string& name) const;
  Matrix read(const std::string& split, const std::string& key, const std::string& kind) const;

  std::filesystem::path root_;
  StoreInfo info_;
  mutable std::mutex mu_;
  mutable std::map<std::string, Split> splits_;
};

/// Caption-style data: each video's own caption plus `negatives` captions
/// drawn uniformly without replacement from other videos, shuffled with a
/// seeded generator. Returns the candidates and the index of the true caption.
struct CaptionCandidates {
  std::vector<std::string> captions;
  std::size_t label = 0;
};
std::vector<CaptionCandidates> synthesize_caption_candidates(
    const std::vector<std::pair<std::string, std::string>>& video_captions, std::size_t negatives,
    std::uint64_t seed);

}  // namespace temadapter
