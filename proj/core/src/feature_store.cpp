#include "temadapter/feature_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "temadapter/errors.hpp"

namespace temadapter {
namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "store format assumes little-endian hosts");

namespace {

std::uint32_t crc_of(const float* data, std::size_t count) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(count * sizeof(float))));
}

json entry_json(const ManifestEntry& e) {
  return {{"key", e.key},           {"kind", e.kind},         {"shape", {e.rows, e.cols}},
          {"dtype", e.dtype},       {"checksum", e.checksum}, {"offset", e.offset}};
}

ManifestEntry parse_entry(const json& j, const std::string& file) {
  ManifestEntry e;
  try {
    e.key = j.at("key").get<std::string>();
    e.kind = j.at("kind").get<std::string>();
    const auto& shape = j.at("shape");
    e.rows = shape.at(0).get<std::int64_t>();
    e.cols = shape.at(1).get<std::int64_t>();
    e.dtype = j.at("dtype").get<std::string>();
    e.checksum = j.at("checksum").get<std::uint32_t>();
    e.offset = j.at("offset").get<std::uint64_t>();
  } catch (const json::exception& ex) {
    throw CorruptionError(file, std::string("bad manifest line: ") + ex.what());
  }
  return e;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError("cannot write " + path.string());
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError(path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw CorruptionError(path.string(), e.what());
  }
}

}  // namespace

void to_json(json& j, const QARecord& r) {
  j = json{{"qid", r.qid},
           {"video_id", r.video_id},
           {"question", r.question},
           {"answers", r.answers},
           {"label", r.label},
           {"category", r.category},
           {"sentences", r.sentences},
           {"used_fallback", r.used_fallback},
           {"raw_texts", r.raw_texts}};
}

void from_json(const json& j, QARecord& r) {
  j.at("qid").get_to(r.qid);
  j.at("video_id").get_to(r.video_id);
  r.question = j.value("question", std::string());
  j.at("answers").get_to(r.answers);
  j.at("label").get_to(r.label);
  r.category = j.value("category", std::string());
  j.at("sentences").get_to(r.sentences);
  r.used_fallback = j.value("used_fallback", std::vector<bool>(r.sentences.size(), false));
  j.at("raw_texts").get_to(r.raw_texts);
}

FeatureStoreWriter::FeatureStoreWriter(fs::path root, StoreInfo info)
    : root_(std::move(root)), info_(std::move(info)) {}

void FeatureStoreWriter::put(const std::string& split, const std::string& key, const std::string& kind,
                             const Matrix& m) {
  if (!m.allFinite()) throw DataError("store: record '" + key + "' has non-finite values");
  Split& s = splits_[split];
  if (s.index.contains(key)) return;
  ManifestEntry e;
  e.key = key;
  e.kind = kind;
  e.rows = m.rows();
  e.cols = m.cols();
  e.offset = s.blob.size() * sizeof(float);
  const std::size_t begin = s.blob.size();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) s.blob.push_back(static_cast<float>(m(r, c)));
  }
  e.checksum = crc_of(s.blob.data() + begin, s.blob.size() - begin);
  s.index.emplace(key, s.manifest.size());
  s.manifest.push_back(std::move(e));
}

void FeatureStoreWriter::put_video(const std::string& split, const VideoFeatureSequence& video) {
  put(split, video.video_id, "video", video.features);
}

void FeatureStoreWriter::put_text(const std::string& split, const TextEmbedding& text) {
  put(split, text.sentence_id, "text", text.vector);
}

void FeatureStoreWriter::put_qa(const std::string& split, const QARecord& record) {
  splits_[split].qa.push_back(record);
}

void FeatureStoreWriter::commit() {
  fs::create_directories(root_);
  std::set<std::string> names(info_.splits.begin(), info_.splits.end());
  for (const auto& [name, split] : splits_) {
    names.insert(name);
    const fs::path blob = root_ / (name + ".bin");
    const fs::path manifest = root_ / (name + ".manifest.jsonl");
    const fs::path qa = root_ / (name + ".qa.jsonl");

    std::string bytes(split.blob.size() * sizeof(float), '\0');
    if (!bytes.empty()) std::memcpy(bytes.data(), split.blob.data(), bytes.size());
    std::string lines;
    for (const auto& e : split.manifest) lines += entry_json(e).dump() + "\n";
    std::string qa_lines;
    for (const auto& r : split.qa) qa_lines += json(r).dump() + "\n";

    write_file(fs::path(blob).concat(".tmp"), bytes);
    write_file(fs::path(manifest).concat(".tmp"), lines);
    write_file(fs::path(qa).concat(".tmp"), qa_lines);
    fs::rename(fs::path(blob).concat(".tmp"), blob);
    fs::rename(fs::path(qa).concat(".tmp"), qa);
    fs::rename(fs::path(manifest).concat(".tmp"), manifest);
  }
  info_.splits.assign(names.begin(), names.end());
  const json meta = {{"format_version", 1},   {"backend", info_.backend}, {"dim", info_.dim},
                     {"plan", info_.plan},    {"seed", info_.seed},       {"splits", info_.splits}};
  write_file(root_ / "store.json.tmp", meta.dump(2) + "\n");
  fs::rename(root_ / "store.json.tmp", root_ / "store.json");
}

FeatureStore::FeatureStore(fs::path root) : root_(std::move(root)) {
  if (!fs::is_directory(root_)) throw NotFoundError(root_.string());
  const json meta = read_json_file(root_ / "store.json");
  try {
    info_.backend = meta.at("backend").get<std::string>();
    info_.dim = meta.at("dim").get<std::int64_t>();
    info_.plan = meta.at("plan").get<std::string>();
    info_.seed = meta.at("seed").get<std::uint64_t>();
    info_.splits = meta.at("splits").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw CorruptionError("store.json", e.what());
  }
}

bool FeatureStore::has_split(const std::string& name) const {
  return std::find(info_.splits.begin(), info_.splits.end(), name) != info_.splits.end();
}

const FeatureStore::Split& FeatureStore::split(const std::string& name) const {
  std::lock_guard lock(mu_);
  if (auto it = splits_.find(name); it != splits_.end()) return it->second;
  if (!has_split(name)) throw NotFoundError("split " + name);
  const fs::path manifest = root_ / (name + ".manifest.jsonl");
  std::ifstream in(manifest);
  if (!in) throw NotFoundError(manifest.string());
  Split s;
  s.blob = root_ / (name + ".bin");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw CorruptionError(manifest.string(), e.what());
    }
    ManifestEntry e = parse_entry(j, manifest.string());
    s.entries.emplace(e.key, std::move(e));
  }
  return splits_.emplace(name, std::move(s)).first->second;
}

Matrix FeatureStore::read(const std::string& split_name, const std::string& key,
                          const std::string& kind) const {
  const Split& s = split(split_name);
  const auto it = s.entries.find(key);
  if (it == s.entries.end()) throw NotFoundError(key);
  const ManifestEntry& e = it->second;
  if (e.kind != kind) throw CorruptionError(key, "expected a " + kind + " record, found " + e.kind);
  if (e.dtype != "f32") throw CorruptionError(key, "unsupported dtype " + e.dtype);
  if (e.rows <= 0 || e.cols <= 0) throw CorruptionError(key, "invalid shape");
  if (info_.dim > 0 && e.cols != info_.dim) {
    throw CorruptionError(key, "width " + std::to_string(e.cols) + " != store width " + std::to_string(info_.dim));
  }
  const std::size_t count = static_cast<std::size_t>(e.rows * e.cols);
  std::vector<float> values(count);
  std::ifstream in(s.blob, std::ios::binary);
  if (!in) throw CorruptionError(key, "missing blob " + s.blob.string());
  in.seekg(static_cast<std::streamoff>(e.offset));
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(float)));
  if (!in || static_cast<std::size_t>(in.gcount()) != count * sizeof(float)) {
    throw CorruptionError(key, "blob is truncated");
  }
  if (crc_of(values.data(), count) != e.checksum) throw CorruptionError(key, "checksum mismatch");
  Matrix m(e.rows, e.cols);
  for (std::size_t i = 0; i < count; ++i) m.data()[i] = static_cast<double>(values[i]);
  return m;
}

VideoFeatureSequence FeatureStore::get_video(const std::string& split, const std::string& video_id) const {
  VideoFeatureSequence v{video_id, read(split, video_id, "video")};
  return v;
}

TextEmbedding FeatureStore::get_text(const std::string& split, const std::string& sentence_id) const {
  const Matrix m = read(split, sentence_id, "text");
  if (m.rows() != 1) throw CorruptionError(sentence_id, "text record must have one row");
  return {sentence_id, m.row(0)};
}

std::vector<QARecord> FeatureStore::questions(const std::string& name) const {
  if (!has_split(name)) throw NotFoundError("split " + name);
  const fs::path path = root_ / (name + ".qa.jsonl");
  std::ifstream in(path);
  if (!in) throw NotFoundError(path.string());
  std::vector<QARecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line).get<QARecord>());
    } catch (const json::exception& e) {
      throw CorruptionError(path.string(), e.what());
    }
  }
  return out;
}

std::vector<ManifestEntry> FeatureStore::manifest(const std::string& name) const {
  const Split& s = split(name);
  std::vector<ManifestEntry> out;
  for (const auto& [_, e] : s.entries) out.push_back(e);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.offset < b.offset; });
  return out;
}

std::vector<CaptionCandidates> synthesize_caption_candidates(
    const std::vector<std::pair<std::string, std::string>>& video_captions, std::size_t negatives,
    std::uint64_t seed) {
  if (video_captions.size() <= negatives) {
    throw DataError("caption negatives: need more than " + std::to_string(negatives) + " videos, got " +
                    std::to_string(video_captions.size()));
  }
  std::mt19937_64 rng(seed);
  std::vector<CaptionCandidates> out;
  out.reserve(video_captions.size());
  std::vector<std::size_t> others(video_captions.size() - 1);
  for (std::size_t v = 0; v < video_captions.size(); ++v) {
    std::size_t n = 0;
    for (std::size_t o = 0; o < video_captions.size(); ++o) {
      if (o != v) others[n++] = o;
    }
    // Partial Fisher-Yates: the first `negatives` slots become a uniform sample.
    for (std::size_t i = 0; i < negatives; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, others.size() - 1);
      std::swap(others[i], others[pick(rng)]);
    }
    CaptionCandidates c;
    c.captions.push_back(video_captions[v].second);
    for (std::size_t i = 0; i < negatives; ++i) c.captions.push_back(video_captions[others[i]].second);
    std::uniform_int_distribution<std::size_t> slot(0, negatives);
    c.label = slot(rng);
    std::swap(c.captions[0], c.captions[c.label]);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace temadapter
