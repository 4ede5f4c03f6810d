#pragma once

#include <filesystem>
#include <memory>
#include <optional>

#include "temadapter/model.hpp"

namespace temadapter {

/// A checkpoint is a directory holding model.json (config, architecture hash,
/// tensor manifest) and model.bin (float64 little-endian tensor data).
///
/// With `inference_only`, the reconstruction decoder and its start token are
/// left out.
void save_checkpoint(const std::filesystem::path& dir, TemAdapter& model, bool inference_only = false);

struct LoadedCheckpoint {
  std::unique_ptr<TemAdapter> model;
  bool inference_only = false;
};

/// Rebuilds the model from the stored config. When `expected` is given, its
/// architecture hash must match the checkpoint's (IncompatibleCheckpointError
/// otherwise). Every tensor is validated before any is assigned.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& dir,
                                 const TrainingConfig* expected = nullptr,
                                 std::optional<Eigen::Index> expected_dim = std::nullopt);

/// Loads tensors into an existing model with the same architecture.
void load_parameters(const std::filesystem::path& dir, TemAdapter& model);

}  // namespace temadapter
