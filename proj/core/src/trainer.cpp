#include "temadapter/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "temadapter/checkpoint.hpp"
#include "temadapter/errors.hpp"

namespace temadapter {
namespace fs = std::filesystem;
using nlohmann::json;

std::vector<Example> load_examples(const FeatureStore& store, const std::string& split, bool use_template) {
  const std::vector<QARecord> records = store.questions(split);
  if (records.empty()) throw DataError("split '" + split + "' has no questions");
  std::map<std::string, Matrix> videos;
  std::vector<Example> out;
  out.reserve(records.size());
  for (const QARecord& r : records) {
    const auto& texts = use_template ? r.sentences : r.raw_texts;
    if (texts.size() < 2) throw DataError("question " + r.qid + " has fewer than 2 candidates");
    if (r.label >= texts.size()) throw DataError("question " + r.qid + " has label out of range");
    auto it = videos.find(r.video_id);
    if (it == videos.end()) it = videos.emplace(r.video_id, store.get_video(split, r.video_id).features).first;
    Example e;
    e.qid = r.qid;
    e.video_id = r.video_id;
    e.category = r.category;
    e.video = it->second;
    e.label = r.label;
    e.texts.resize(static_cast<Eigen::Index>(texts.size()), e.video.cols());
    for (std::size_t i = 0; i < texts.size(); ++i) {
      e.texts.row(static_cast<Eigen::Index>(i)) = store.get_text(split, sentence_key(texts[i])).vector;
    }
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

json step_json(const StepMetrics& m) {
  return {{"kind", "step"}, {"step", m.step}, {"epoch", m.epoch}, {"hinge", m.hinge},
          {"mse", m.mse},   {"total", m.total}, {"lr", m.lr}};
}

bool grads_finite(const std::vector<Parameter*>& params) {
  return std::all_of(params.begin(), params.end(), [](const Parameter* p) { return p->grad.allFinite(); });
}

}  // namespace

TrainResult train(const TrainingConfig& config, const std::vector<Example>& data, const TrainOptions& options) {
  if (data.empty()) throw DataError("train: empty dataset");
  const Eigen::Index dim = data.front().video.cols();
  config.validate(dim);

  TrainResult result;
  result.model = std::make_unique<TemAdapter>(config, dim);
  TemAdapter& model = *result.model;
  const std::vector<Parameter*> params = model.trainable_parameters();
  Adam optimizer(params);

  std::ofstream metrics;
  if (options.out_dir) {
    fs::create_directories(*options.out_dir);
    metrics.open(*options.out_dir / "metrics.jsonl", std::ios::trunc);
  }
  std::string last_good = "none";

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  const bool select_best = config.model_selection == ModelSelection::kBestVal && options.validation != nullptr;
  double best_val = -1.0;
  std::vector<Matrix> best_params;
  int since_best = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.learning_rate_at(epoch);
    std::shuffle(order.begin(), order.end(), rng);
    StepMetrics epoch_sum;
    std::size_t epoch_items = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(config.batch_size)) {
      if (config.max_steps > 0 && result.steps_run >= config.max_steps) break;
      const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(config.batch_size));
      const double inv = 1.0 / static_cast<double>(end - begin);
      for (Parameter* p : params) p->zero_grad();
      StepMetrics m;
      m.step = result.steps_run;
      m.epoch = epoch;
      m.lr = lr;
      for (std::size_t b = begin; b < end; ++b) {
        const Example& e = data[order[b]];
        Tape tape;
        LossTerms loss;
        try {
          loss = model.training_forward(tape, e.video, e.texts, e.label);
        } catch (const NumericError& err) {
          throw NumericError(std::string(err.what()) + " at step " + std::to_string(m.step) +
                             " (question " + e.qid + "); last good checkpoint: " + last_good);
        }
        m.hinge += inv * loss.hinge.scalar();
        if (loss.mse.tape() != nullptr) m.mse += inv * loss.mse.scalar();
        m.total += inv * loss.total.scalar();
        if (!params.empty()) {
          tape.backward(loss.total);
          for (auto [param, grad] : tape.param_grads()) param->grad += inv * *grad;
        }
      }
      if (!grads_finite(params)) {
        throw NumericError("non-finite gradient at step " + std::to_string(m.step) +
                           "; last good checkpoint: " + last_good);
      }
      if (!params.empty()) optimizer.step(lr);
      result.steps.push_back(m);
      if (metrics.is_open()) metrics << step_json(m).dump() << "\n";
      const double n = static_cast<double>(end - begin);
      epoch_sum.hinge += m.hinge * n;
      epoch_sum.mse += m.mse * n;
      epoch_sum.total += m.total * n;
      epoch_items += end - begin;
      ++result.steps_run;
    }
    if (epoch_items == 0) break;
    result.epochs_run = epoch + 1;

    json epoch_line = {{"kind", "epoch"},
                       {"epoch", epoch},
                       {"hinge", epoch_sum.hinge / static_cast<double>(epoch_items)},
                       {"mse", epoch_sum.mse / static_cast<double>(epoch_items)},
                       {"total", epoch_sum.total / static_cast<double>(epoch_items)},
                       {"lr", lr}};
    bool stop = false;
    if (options.validation != nullptr) {
      const double acc = evaluate(model, *options.validation).overall_accuracy;
      epoch_line["val_accuracy"] = acc;
      if (acc > best_val) {
        best_val = acc;
        since_best = 0;
        if (select_best) {
          best_params.clear();
          for (Parameter* p : model.parameters()) best_params.push_back(p->value);
        }
      } else if (config.early_stopping_patience > 0 && ++since_best >= config.early_stopping_patience) {
        stop = true;
      }
    }
    if (metrics.is_open()) metrics << epoch_line.dump() << "\n" << std::flush;
    if (options.out_dir && config.checkpoint_every_epochs > 0 && (epoch + 1) % config.checkpoint_every_epochs == 0) {
      char name[32];
      std::snprintf(name, sizeof(name), "epoch-%04d", epoch + 1);
      save_checkpoint(*options.out_dir / name, model);
      last_good = (*options.out_dir / name).string();
    }
    if (stop || (config.max_steps > 0 && result.steps_run >= config.max_steps)) break;
  }

  if (select_best && !best_params.empty()) {
    const std::vector<Parameter*> all = model.parameters();
    for (std::size_t i = 0; i < all.size(); ++i) all[i]->value = best_params[i];
  }
  if (options.out_dir) save_checkpoint(*options.out_dir, model);
  return result;
}

void to_json(json& j, const EvalReport& r) {
  json cats = json::object();
  for (const auto& [name, c] : r.per_category) {
    cats[name] = {{"correct", c.correct}, {"total", c.total}, {"accuracy", c.accuracy}};
  }
  json preds = json::array();
  for (const auto& p : r.predictions) {
    preds.push_back({{"qid", p.qid}, {"predicted", p.predicted}, {"label", p.label}, {"probs", p.probs}});
  }
  j = {{"overall_accuracy", r.overall_accuracy},
       {"n_questions", r.n_questions},
       {"per_category", cats},
       {"predictions", preds}};
}

EvalReport evaluate(TemAdapter& model, const std::vector<Example>& data) {
  if (data.empty()) throw DataError("evaluate: empty split");
  EvalReport report;
  std::size_t correct = 0;
  for (const Example& e : data) {
    const CandidateScores scores = model.score(e.video, e.texts);
    const std::size_t chosen = predict(scores);
    const bool hit = chosen == e.label;
    correct += hit ? 1 : 0;
    CategoryResult& c = report.per_category[e.category];
    c.correct += hit ? 1 : 0;
    ++c.total;
    report.predictions.push_back({e.qid, chosen, e.label, scores.probs});
  }
  for (auto& [_, c] : report.per_category) {
    c.accuracy = static_cast<double>(c.correct) / static_cast<double>(c.total);
  }
  report.n_questions = data.size();
  report.overall_accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return report;
}

InferResult infer(TemAdapter& model, const EmbeddingBackend& backend, const std::string& question,
                  const std::vector<std::string>& answers, const VideoFeatureSequence& video) {
  if (answers.size() < 2) throw ContractError("infer: need at least 2 answers");
  if (backend.dim() != model.embedding_dim()) {
    throw ConfigError("infer: backend width " + std::to_string(backend.dim()) + " != model width " +
                      std::to_string(model.embedding_dim()));
  }
  InferResult out;
  for (const std::string& a : answers) {
    if (model.config().ablations.use_template) {
      out.sentences.push_back(to_declarative(make_qa_pair(question, a)).text);
    } else {
      out.sentences.push_back(raw_concatenation(question, a));
    }
  }
  const std::vector<TextEmbedding> texts = embed_text(backend, out.sentences);
  Matrix stacked(static_cast<Eigen::Index>(texts.size()), backend.dim());
  for (std::size_t i = 0; i < texts.size(); ++i) stacked.row(static_cast<Eigen::Index>(i)) = texts[i].vector;
  const CandidateScores scores = model.score(video.features, stacked);
  out.chosen = predict(scores);
  out.probs = scores.probs;
  return out;
}

}  // namespace temadapter
