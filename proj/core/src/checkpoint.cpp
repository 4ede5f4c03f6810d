#include "temadapter/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "temadapter/errors.hpp"

namespace temadapter {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

struct Stored {
  json meta;
  std::map<std::string, Matrix> tensors;
};

Stored read_stored(const fs::path& dir) {
  Stored s;
  std::ifstream meta_in(dir / "model.json");
  if (!meta_in) throw NotFoundError((dir / "model.json").string());
  try {
    s.meta = json::parse(meta_in);
  } catch (const json::exception& e) {
    throw CorruptionError((dir / "model.json").string(), e.what());
  }
  if (s.meta.value("format_version", 0) != kFormatVersion) {
    throw IncompatibleCheckpointError("checkpoint format version " +
                                      std::to_string(s.meta.value("format_version", 0)) + " is not supported");
  }
  std::ifstream bin(dir / "model.bin", std::ios::binary);
  if (!bin) throw NotFoundError((dir / "model.bin").string());
  try {
    for (const auto& t : s.meta.at("tensors")) {
      const auto name = t.at("name").get<std::string>();
      const auto rows = t.at("shape").at(0).get<Eigen::Index>();
      const auto cols = t.at("shape").at(1).get<Eigen::Index>();
      const auto offset = t.at("offset").get<std::uint64_t>();
      Matrix m(rows, cols);
      bin.seekg(static_cast<std::streamoff>(offset));
      bin.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
      if (!bin) throw CorruptionError(name, "model.bin is truncated");
      s.tensors.emplace(name, std::move(m));
    }
  } catch (const json::exception& e) {
    throw CorruptionError((dir / "model.json").string(), e.what());
  }
  return s;
}

void assign(const Stored& s, TemAdapter& model, bool inference_only) {
  const std::vector<Parameter*> params = inference_only ? model.inference_parameters() : model.parameters();
  for (Parameter* p : params) {
    const auto it = s.tensors.find(p->name);
    if (it == s.tensors.end()) throw IncompatibleCheckpointError("checkpoint lacks tensor " + p->name);
    if (it->second.rows() != p->value.rows() || it->second.cols() != p->value.cols()) {
      throw IncompatibleCheckpointError("tensor " + p->name + " has shape " + std::to_string(it->second.rows()) +
                                        "x" + std::to_string(it->second.cols()) + ", model expects " +
                                        std::to_string(p->value.rows()) + "x" +
                                        std::to_string(p->value.cols()));
    }
  }
  for (Parameter* p : params) {
    p->value = s.tensors.at(p->name);
    p->zero_grad();
  }
}

}  // namespace

void save_checkpoint(const fs::path& dir, TemAdapter& model, bool inference_only) {
  fs::create_directories(dir);
  const std::vector<Parameter*> params = inference_only ? model.inference_parameters() : model.parameters();
  json tensors = json::array();
  std::string bytes;
  for (const Parameter* p : params) {
    tensors.push_back({{"name", p->name}, {"shape", {p->value.rows(), p->value.cols()}}, {"offset", bytes.size()}});
    const std::size_t at = bytes.size();
    bytes.resize(at + static_cast<std::size_t>(p->value.size()) * sizeof(double));
    std::memcpy(bytes.data() + at, p->value.data(), static_cast<std::size_t>(p->value.size()) * sizeof(double));
  }
  const json meta = {
      {"format_version", kFormatVersion},
      {"architecture_hash", architecture_hash(model.config(), model.embedding_dim())},
      {"embedding_dim", model.embedding_dim()},
      {"inference_only", inference_only},
      {"config", model.config()},
      {"tensors", tensors},
  };
  {
    std::ofstream out(dir / "model.bin.tmp", std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("cannot write " + (dir / "model.bin").string());
  }
  {
    std::ofstream out(dir / "model.json.tmp", std::ios::trunc);
    out << meta.dump(2) << "\n";
    if (!out) throw DataError("cannot write " + (dir / "model.json").string());
  }
  fs::rename(dir / "model.bin.tmp", dir / "model.bin");
  fs::rename(dir / "model.json.tmp", dir / "model.json");
}

LoadedCheckpoint load_checkpoint(const fs::path& dir, const TrainingConfig* expected,
                                 std::optional<Eigen::Index> expected_dim) {
  const Stored s = read_stored(dir);
  TrainingConfig config;
  Eigen::Index dim = 0;
  std::string hash;
  try {
    config = s.meta.at("config").get<TrainingConfig>();
    dim = s.meta.at("embedding_dim").get<Eigen::Index>();
    hash = s.meta.at("architecture_hash").get<std::string>();
  } catch (const json::exception& e) {
    throw CorruptionError((dir / "model.json").string(), e.what());
  }
  if (hash != architecture_hash(config, dim)) {
    throw CorruptionError((dir / "model.json").string(), "architecture hash does not match stored config");
  }
  if (expected_dim && *expected_dim != dim) {
    throw IncompatibleCheckpointError("checkpoint embedding width " + std::to_string(dim) +
                                      " != expected " + std::to_string(*expected_dim));
  }
  if (expected != nullptr) {
    const std::string want = architecture_hash(*expected, expected_dim.value_or(dim));
    if (want != hash) {
      throw IncompatibleCheckpointError("checkpoint architecture " + hash + " does not match config architecture " +
                                        want);
    }
  }
  LoadedCheckpoint out;
  out.inference_only = s.meta.value("inference_only", false);
  out.model = std::make_unique<TemAdapter>(config, dim);
  assign(s, *out.model, out.inference_only);
  return out;
}

void load_parameters(const fs::path& dir, TemAdapter& model) {
  const Stored s = read_stored(dir);
  if (s.meta.value("architecture_hash", std::string()) != architecture_hash(model.config(), model.embedding_dim())) {
    throw IncompatibleCheckpointError("checkpoint architecture does not match the model");
  }
  assign(s, model, s.meta.value("inference_only", false));
}

}  // namespace temadapter
