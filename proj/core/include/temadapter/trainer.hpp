#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "temadapter/config.hpp"
#include "temadapter/embedding.hpp"
#include "temadapter/feature_store.hpp"
#include "temadapter/model.hpp"

namespace temadapter {

/// One question with its features resolved.
struct Example {
  std::string qid;
  std::string video_id;
  std::string category;
  Matrix video;  // T x C
  Matrix texts;  // k x C, one row per candidate
  std::size_t label = 0;
};

/// Loads every question of `split`. With `use_template` the candidates are
/// the template sentences, otherwise the raw question + answer strings.
/// Throws DataError on an empty split.
std::vector<Example> load_examples(const FeatureStore& store, const std::string& split, bool use_template);

struct StepMetrics {
  std::int64_t step = 0;
  int epoch = 0;
  double hinge = 0.0;
  double mse = 0.0;
  double total = 0.0;
  double lr = 0.0;
};

struct TrainOptions {
  /// Checkpoints and metrics.jsonl go here when set.
  std::optional<std::filesystem::path> out_dir;
  /// Used for best_val selection and early stopping.
  const std::vector<Example>* validation = nullptr;
};

struct TrainResult {
  std::unique_ptr<TemAdapter> model;
  std::vector<StepMetrics> steps;
  std::int64_t steps_run = 0;
  int epochs_run = 0;
};

/// Adam on the batch-mean of hinge + gamma * reconstruction loss, learning
/// rate decayed per config. Deterministic for a fixed config and data.
/// A non-finite loss raises NumericError naming the last checkpoint written.
TrainResult train(const TrainingConfig& config, const std::vector<Example>& data,
                  const TrainOptions& options = {});

struct CategoryResult {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;

  bool operator==(const CategoryResult&) const = default;
};

struct Prediction {
  std::string qid;
  std::size_t predicted = 0;
  std::size_t label = 0;
  std::vector<double> probs;

  bool operator==(const Prediction&) const = default;
};

struct EvalReport {
  double overall_accuracy = 0.0;
  std::map<std::string, CategoryResult> per_category;
  std::size_t n_questions = 0;
  std::vector<Prediction> predictions;

  bool operator==(const EvalReport&) const = default;
};

void to_json(nlohmann::json& j, const EvalReport& report);

/// Scores every question; the reconstruction decoder is never run.
EvalReport evaluate(TemAdapter& model, const std::vector<Example>& data);

struct InferResult {
  std::size_t chosen = 0;
  std::vector<double> probs;
  std::vector<std::string> sentences;
};

/// Template (or raw concatenation) -> text encoder -> aligners -> scores.
InferResult infer(TemAdapter& model, const EmbeddingBackend& backend, const std::string& question,
                  const std::vector<std::string>& answers, const VideoFeatureSequence& video);

}  // namespace temadapter
