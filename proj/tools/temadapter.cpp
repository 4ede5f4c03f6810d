// temadapter: templates, feature extraction, training, evaluation and
// inference for the Tem-Adapter video QA model.
//
// Exit codes: 0 success, 1 data error, 2 configuration error, 3 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "frame_source.hpp"
#include "temadapter/checkpoint.hpp"
#include "temadapter/config.hpp"
#include "temadapter/embedding.hpp"
#include "temadapter/errors.hpp"
#include "temadapter/feature_store.hpp"
#include "temadapter/frame_plan.hpp"
#include "temadapter/template_engine.hpp"
#include "temadapter/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace temadapter;

namespace {

constexpr int kExitData = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::vector<json> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError(path.string());
  std::vector<json> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t comma = text.find(',', begin);
    const std::size_t end = comma == std::string::npos ? text.size() : comma;
    out.push_back(text.substr(begin, end - begin));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return out;
}

void make_templates(const fs::path& in, const fs::path& out_path) {
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + out_path.string());
  for (json record : read_jsonl(in)) {
    const auto question = record.at("question").get<std::string>();
    std::vector<QAPair> pairs;
    for (const auto& a : record.at("answers")) pairs.push_back(make_qa_pair(question, a.get<std::string>()));
    json sentences = json::array();
    json fallback = json::array();
    for (const EventDescription& d : batch_templates(pairs)) {
      sentences.push_back(d.text);
      fallback.push_back(d.used_fallback);
    }
    record["sentences"] = sentences;
    record["used_fallback"] = fallback;
    out << record.dump() << "\n";
  }
}

struct ExtractOptions {
  fs::path videos;
  fs::path qa;
  std::string plan = "8x16";
  std::string backend = "stub";
  fs::path out;
  std::uint64_t seed = 0;
};

void extract_features(const ExtractOptions& opt) {
  const FrameSamplePlan plan = FrameSamplePlan::parse(opt.plan);
  plan.validate();
  const auto backend = make_backend(opt.backend);
  const auto videos = tools::list_videos(opt.videos);
  const std::vector<json> records = read_jsonl(opt.qa);
  if (records.empty()) throw DataError("no records in " + opt.qa.string());

  // Caption records become multiple-choice questions with sampled negatives.
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> captions_by_split;
  std::vector<std::pair<std::string, QARecord>> questions;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const json& r = records[i];
    const std::string split = r.value("split", std::string("train"));
    const std::string video_id = r.at("video_id").get<std::string>();
    if (r.contains("caption")) {
      captions_by_split[split].emplace_back(video_id, r.at("caption").get<std::string>());
      continue;
    }
    QARecord q;
    q.qid = r.value("qid", std::to_string(i));
    q.video_id = video_id;
    q.question = r.at("question").get<std::string>();
    q.answers = r.at("answers").get<std::vector<std::string>>();
    q.label = r.at("label").get<std::size_t>();
    q.category = r.value("category", std::string());
    std::vector<QAPair> pairs;
    for (const auto& a : q.answers) pairs.push_back(make_qa_pair(q.question, a));
    for (const EventDescription& d : batch_templates(pairs)) {
      q.sentences.push_back(d.text);
      q.used_fallback.push_back(d.used_fallback);
    }
    for (const auto& a : q.answers) q.raw_texts.push_back(raw_concatenation(q.question, a));
    questions.emplace_back(split, std::move(q));
  }
  for (const auto& [split, list] : captions_by_split) {
    const auto candidates = synthesize_caption_candidates(list, 4, opt.seed);
    for (std::size_t i = 0; i < list.size(); ++i) {
      QARecord q;
      q.qid = split + "-" + std::to_string(i);
      q.video_id = list[i].first;
      q.answers = candidates[i].captions;
      q.label = candidates[i].label;
      q.sentences = q.answers;
      q.used_fallback.assign(q.answers.size(), false);
      q.raw_texts = q.answers;
      questions.emplace_back(split, std::move(q));
    }
  }

  FeatureStoreWriter writer(opt.out, {backend->name(), backend->dim(), plan.to_string(), opt.seed, {}});
  std::map<std::string, std::set<std::string>> done_videos;
  for (const auto& [split, q] : questions) {
    if (done_videos[split].insert(q.video_id).second) {
      const auto it = videos.find(q.video_id);
      if (it == videos.end()) throw NotFoundError("video " + q.video_id + " under " + opt.videos.string());
      const std::vector<Frame> frames = tools::sample_frames(it->second, plan);
      writer.put_video(split, embed_video(*backend, q.video_id, frames));
    }
    for (const auto& texts : {q.sentences, q.raw_texts}) {
      for (const TextEmbedding& t : embed_text(*backend, texts)) writer.put_text(split, t);
    }
    writer.put_qa(split, q);
  }
  writer.commit();
  std::cout << "stored " << questions.size() << " questions in " << opt.out << "\n";
}

void run_train(const fs::path& config_path, const fs::path& store_dir, const fs::path& out,
               const std::string& split) {
  const TrainingConfig config = load_config(config_path);
  const FeatureStore store(store_dir);
  config.validate(store.info().dim);
  const auto data = load_examples(store, split, config.ablations.use_template);
  std::vector<Example> validation;
  TrainOptions options;
  options.out_dir = out;
  if (store.has_split(config.val_split) && config.val_split != split) {
    validation = load_examples(store, config.val_split, config.ablations.use_template);
    options.validation = &validation;
  }
  const TrainResult result = train(config, data, options);
  const StepMetrics& last = result.steps.back();
  std::cout << "trained " << result.steps_run << " steps over " << result.epochs_run
            << " epochs; final total loss " << last.total << "; checkpoint " << out << "\n";
}

void run_eval(const fs::path& ckpt, const fs::path& store_dir, const std::string& split,
              const std::optional<fs::path>& report_path) {
  const FeatureStore store(store_dir);
  LoadedCheckpoint loaded = load_checkpoint(ckpt, nullptr, store.info().dim);
  const auto data = load_examples(store, split, loaded.model->config().ablations.use_template);
  const EvalReport report = evaluate(*loaded.model, data);
  const json j = report;
  if (report_path) {
    std::ofstream out(*report_path, std::ios::trunc);
    out << j.dump(2) << "\n";
    if (!out) throw DataError("cannot write " + report_path->string());
  }
  std::printf("accuracy %.4f over %zu questions\n", report.overall_accuracy, report.n_questions);
  for (const auto& [name, c] : report.per_category) {
    std::printf("  %-12s %.4f (%zu/%zu)\n", name.empty() ? "(none)" : name.c_str(), c.accuracy, c.correct, c.total);
  }
}

void run_infer(const fs::path& ckpt, const fs::path& store_dir, const std::string& split,
               const std::string& question, const std::string& answers, const std::string& video_id) {
  const FeatureStore store(store_dir);
  LoadedCheckpoint loaded = load_checkpoint(ckpt, nullptr, store.info().dim);
  const auto backend = make_backend(store.info().backend);
  const VideoFeatureSequence video = store.get_video(split, video_id);
  const InferResult r = infer(*loaded.model, *backend, question, split_list(answers), video);
  json out = {{"chosen", r.chosen}, {"probs", r.probs}, {"sentences", r.sentences}};
  std::cout << out.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tem-Adapter video question answering"};
  app.require_subcommand(1);

  fs::path tpl_in, tpl_out;
  auto* tpl = app.add_subcommand("make-templates", "Rewrite QA records into declarative sentences");
  tpl->add_option("--in", tpl_in, "QA records (jsonl)")->required();
  tpl->add_option("--out", tpl_out, "Output records (jsonl)")->required();

  ExtractOptions ex;
  auto* extract = app.add_subcommand("extract-features", "Embed frames and sentences into a feature store");
  extract->add_option("--videos", ex.videos, "Directory of videos or frame directories")->required();
  extract->add_option("--qa", ex.qa, "QA or caption records (jsonl)")->required();
  extract->add_option("--plan", ex.plan, "Frame plan, e.g. 8x16 or uniform:128")->capture_default_str();
  extract->add_option("--backend", ex.backend, "Embedding backend")->capture_default_str();
  extract->add_option("--out", ex.out, "Store directory")->required();
  extract->add_option("--seed", ex.seed, "Seed for caption negatives")->capture_default_str();

  fs::path cfg, store, out, ckpt;
  std::string split = "train";
  auto* train_cmd = app.add_subcommand("train", "Train the adapters");
  train_cmd->add_option("--config", cfg, "Training config (json)")->required();
  train_cmd->add_option("--store", store, "Feature store")->required();
  train_cmd->add_option("--out", out, "Checkpoint directory")->required();
  train_cmd->add_option("--split", split, "Training split")->capture_default_str();

  std::string eval_split = "test";
  std::optional<fs::path> report;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("--ckpt", ckpt, "Checkpoint directory")->required();
  eval->add_option("--store", store, "Feature store")->required();
  eval->add_option("--split", eval_split, "Split to evaluate")->capture_default_str();
  eval->add_option("--report", report, "Write the report (json) here");

  std::string question, answers, video_id, infer_split = "test";
  auto* infer_cmd = app.add_subcommand("infer", "Answer one question");
  infer_cmd->add_option("--ckpt", ckpt, "Checkpoint directory")->required();
  infer_cmd->add_option("--store", store, "Feature store holding the video")->required();
  infer_cmd->add_option("--split", infer_split, "Split holding the video")->capture_default_str();
  infer_cmd->add_option("--question", question, "Question")->required();
  infer_cmd->add_option("--answers", answers, "Comma-separated candidates")->required();
  infer_cmd->add_option("--video", video_id, "Video id")->required();

  fs::path export_out;
  auto* export_cmd = app.add_subcommand("export", "Write an inference-only checkpoint");
  export_cmd->add_option("--ckpt", ckpt, "Checkpoint directory")->required();
  export_cmd->add_option("--out", export_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (tpl->parsed()) {
      make_templates(tpl_in, tpl_out);
    } else if (extract->parsed()) {
      extract_features(ex);
    } else if (train_cmd->parsed()) {
      run_train(cfg, store, out, split);
    } else if (eval->parsed()) {
      run_eval(ckpt, store, eval_split, report);
    } else if (infer_cmd->parsed()) {
      run_infer(ckpt, store, infer_split, question, answers, video_id);
    } else if (export_cmd->parsed()) {
      LoadedCheckpoint loaded = load_checkpoint(ckpt);
      save_checkpoint(export_out, *loaded.model, true);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.category()) {
      case Error::Category::kData: return kExitData;
      case Error::Category::kConfig: return kExitConfig;
      case Error::Category::kNumeric: return kExitNumeric;
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
