#include "temadapter/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "temadapter/embedding.hpp"
#include "temadapter/errors.hpp"

namespace temadapter {
namespace {

using nlohmann::json;

std::string_view memory_name(ReconstructionMemory m) {
  switch (m) {
    case ReconstructionMemory::kFull: return "full";
    case ReconstructionMemory::kVideoOnly: return "video_only";
    case ReconstructionMemory::kNone: return "none";
  }
  return "full";
}

ReconstructionMemory parse_memory(const std::string& s) {
  if (s == "full") return ReconstructionMemory::kFull;
  if (s == "video_only") return ReconstructionMemory::kVideoOnly;
  if (s == "none") return ReconstructionMemory::kNone;
  throw ConfigError("reconstruction_memory must be full, video_only or none, got '" + s + "'");
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  const std::set<std::string_view> allowed(known);
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void require_positive(long long value, const char* name) {
  if (value <= 0) throw ConfigError(std::string(name) + " must be positive, got " + std::to_string(value));
}

}  // namespace

double TrainingConfig::learning_rate_at(int epoch) const {
  return learning_rate * std::pow(lr_decay.factor, epoch / lr_decay.every_epochs);
}

void TrainingConfig::validate(std::int64_t embedding_dim) const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be positive");
  require_positive(batch_size, "batch_size");
  require_positive(epochs, "epochs");
  require_positive(lr_decay.every_epochs, "lr_decay.every_epochs");
  if (!(lr_decay.factor > 0.0)) throw ConfigError("lr_decay.factor must be positive");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
  if (!(margin >= 0.0)) throw ConfigError("margin must be non-negative");
  require_positive(latent_dim, "latent_dim");
  require_positive(heads, "heads");
  require_positive(encoder_layers, "encoder_layers");
  require_positive(decoder_layers, "decoder_layers");
  require_positive(semantic_layers, "semantic_layers");
  require_positive(ff_dim, "ff_dim");
  require_positive(semantic_ff_dim, "semantic_ff_dim");
  if (max_steps < 0) throw ConfigError("max_steps must be non-negative");
  if (checkpoint_every_epochs < 0) throw ConfigError("checkpoint_every_epochs must be non-negative");
  if (early_stopping_patience < 0) throw ConfigError("early_stopping_patience must be non-negative");
  if (embedding_dim > 0) {
    if (embedding_dim % heads != 0) {
      throw ConfigError("embedding width " + std::to_string(embedding_dim) + " is not divisible by " +
                        std::to_string(heads) + " heads");
    }
    if (latent_dim % heads != 0) {
      throw ConfigError("latent_dim " + std::to_string(latent_dim) + " is not divisible by " +
                        std::to_string(heads) + " heads");
    }
  }
}

void to_json(json& j, const TrainingConfig& c) {
  j = json{
      {"learning_rate", c.learning_rate},
      {"batch_size", c.batch_size},
      {"epochs", c.epochs},
      {"lr_decay", {{"factor", c.lr_decay.factor}, {"every_epochs", c.lr_decay.every_epochs}}},
      {"gamma", c.gamma},
      {"margin", c.margin},
      {"latent_dim", c.latent_dim},
      {"heads", c.heads},
      {"encoder_layers", c.encoder_layers},
      {"decoder_layers", c.decoder_layers},
      {"semantic_layers", c.semantic_layers},
      {"ff_dim", c.ff_dim},
      {"semantic_ff_dim", c.semantic_ff_dim},
      {"seed", c.seed},
      {"ablations",
       {{"use_template", c.ablations.use_template},
        {"use_semantic_aligner", c.ablations.use_semantic_aligner},
        {"use_temporal_aligner", c.ablations.use_temporal_aligner},
        {"use_autoregression", c.ablations.use_autoregression}}},
      {"reconstruction_memory", memory_name(c.reconstruction_memory)},
      {"max_steps", c.max_steps},
      {"checkpoint_every_epochs", c.checkpoint_every_epochs},
      {"model_selection", c.model_selection == ModelSelection::kLast ? "last" : "best_val"},
      {"val_split", c.val_split},
      {"early_stopping_patience", c.early_stopping_patience},
  };
}

void from_json(const json& j, TrainingConfig& c) {
  reject_unknown(j,
                 {"learning_rate", "batch_size", "epochs", "lr_decay", "gamma", "margin", "latent_dim",
                  "heads", "encoder_layers", "decoder_layers", "semantic_layers", "ff_dim",
                  "semantic_ff_dim", "seed", "ablations", "reconstruction_memory", "max_steps",
                  "checkpoint_every_epochs", "model_selection", "val_split",
                  "early_stopping_patience"},
                 "config");
  read(j, "learning_rate", c.learning_rate);
  read(j, "batch_size", c.batch_size);
  read(j, "epochs", c.epochs);
  if (j.contains("lr_decay")) {
    const json& d = j.at("lr_decay");
    reject_unknown(d, {"factor", "every_epochs"}, "lr_decay");
    read(d, "factor", c.lr_decay.factor);
    read(d, "every_epochs", c.lr_decay.every_epochs);
  }
  read(j, "gamma", c.gamma);
  read(j, "margin", c.margin);
  read(j, "latent_dim", c.latent_dim);
  read(j, "heads", c.heads);
  read(j, "encoder_layers", c.encoder_layers);
  read(j, "decoder_layers", c.decoder_layers);
  read(j, "semantic_layers", c.semantic_layers);
  read(j, "ff_dim", c.ff_dim);
  read(j, "semantic_ff_dim", c.semantic_ff_dim);
  read(j, "seed", c.seed);
  if (j.contains("ablations")) {
    const json& a = j.at("ablations");
    reject_unknown(a, {"use_template", "use_semantic_aligner", "use_temporal_aligner", "use_autoregression"},
                   "ablations");
    read(a, "use_template", c.ablations.use_template);
    read(a, "use_semantic_aligner", c.ablations.use_semantic_aligner);
    read(a, "use_temporal_aligner", c.ablations.use_temporal_aligner);
    read(a, "use_autoregression", c.ablations.use_autoregression);
  }
  if (j.contains("reconstruction_memory")) {
    std::string s;
    read(j, "reconstruction_memory", s);
    c.reconstruction_memory = parse_memory(s);
  }
  read(j, "max_steps", c.max_steps);
  read(j, "checkpoint_every_epochs", c.checkpoint_every_epochs);
  if (j.contains("model_selection")) {
    std::string s;
    read(j, "model_selection", s);
    if (s == "last") {
      c.model_selection = ModelSelection::kLast;
    } else if (s == "best_val") {
      c.model_selection = ModelSelection::kBestVal;
    } else {
      throw ConfigError("model_selection must be last or best_val, got '" + s + "'");
    }
  }
  read(j, "val_split", c.val_split);
  read(j, "early_stopping_patience", c.early_stopping_patience);
}

TrainingConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  TrainingConfig config = j.get<TrainingConfig>();
  config.validate(0);
  return config;
}

std::string architecture_hash(const TrainingConfig& c, std::int64_t embedding_dim) {
  const json shape = {
      {"embedding_dim", embedding_dim},   {"latent_dim", c.latent_dim},
      {"heads", c.heads},                 {"encoder_layers", c.encoder_layers},
      {"decoder_layers", c.decoder_layers}, {"semantic_layers", c.semantic_layers},
      {"ff_dim", c.ff_dim},               {"semantic_ff_dim", c.semantic_ff_dim},
  };
  return stable_hash(shape.dump());
}

}  // namespace temadapter
