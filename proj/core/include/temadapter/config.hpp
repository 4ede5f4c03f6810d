#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace temadapter {

struct Ablations {
  bool use_template = true;
  bool use_semantic_aligner = true;
  bool use_temporal_aligner = true;
  bool use_autoregression = true;
};

/// What the reconstruction decoder attends to.
enum class ReconstructionMemory {
  kFull,       // refined video + guidance text
  kVideoOnly,  // refined video, guidance zeroed
  kNone,       // all-zero memory
};

enum class ModelSelection { kLast, kBestVal };

struct LrDecay {
  double factor = 0.5;
  int every_epochs = 10;
};

struct TrainingConfig {
  double learning_rate = 1e-4;
  int batch_size = 128;
  int epochs = 50;
  LrDecay lr_decay;
  double gamma = 100.0;
  double margin = 1.0;

  int latent_dim = 128;
  int heads = 16;
  int encoder_layers = 1;
  int decoder_layers = 1;
  int semantic_layers = 1;
  int ff_dim = 2048;
  int semantic_ff_dim = 2048;

  std::uint64_t seed = 0;
  Ablations ablations;
  ReconstructionMemory reconstruction_memory = ReconstructionMemory::kFull;

  /// Stop after this many optimizer steps; 0 means no limit.
  int max_steps = 0;
  /// Write an intermediate checkpoint every N epochs; 0 disables.
  int checkpoint_every_epochs = 0;
  ModelSelection model_selection = ModelSelection::kLast;
  /// Split evaluated for best_val selection and early stopping.
  std::string val_split = "val";
  /// Epochs without validation improvement before stopping; 0 disables.
  int early_stopping_patience = 0;

  /// Learning rate in effect during `epoch` (0-based).
  double learning_rate_at(int epoch) const;

  /// Throws ConfigError on non-positive counts, negative gamma or margin,
  /// or widths not divisible by the head count.
  void validate(std::int64_t embedding_dim) const;
};

void to_json(nlohmann::json& j, const TrainingConfig& config);
/// Unknown keys raise ConfigError; missing keys keep their defaults.
void from_json(const nlohmann::json& j, TrainingConfig& config);

TrainingConfig load_config(const std::filesystem::path& path);

/// Digest of every field that changes parameter shapes, plus the embedding width.
std::string architecture_hash(const TrainingConfig& config, std::int64_t embedding_dim);

}  // namespace temadapter
