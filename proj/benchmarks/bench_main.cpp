#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "temadapter/embedding.hpp"
#include "temadapter/feature_store.hpp"
#include "temadapter/frame_plan.hpp"
#include "temadapter/model.hpp"
#include "temadapter/template_engine.hpp"

using namespace temadapter;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<double>(static_cast<float>(normal(rng)));
  return m;
}

TrainingConfig bench_config(Eigen::Index dim) {
  TrainingConfig c;
  c.latent_dim = static_cast<int>(dim / 4);
  c.heads = dim >= 512 ? 16 : 4;
  c.ff_dim = static_cast<int>(4 * dim);
  c.semantic_ff_dim = static_cast<int>(4 * dim);
  return c;
}

void BM_Templates(benchmark::State& state) {
  const std::vector<QAPair> pairs = {
      make_qa_pair("Which area has been damaged on the vehicle being hit?", "Back"),
      make_qa_pair("Would the accident still occur if the driver slows down in time?", "No"),
      make_qa_pair("How many lanes does the road have in single direction?", "Two"),
      make_qa_pair("What's the condition of the road surface?", "Wet"),
  };
  for (auto _ : state) benchmark::DoNotOptimize(batch_templates(pairs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs.size()));
}
BENCHMARK(BM_Templates);

void BM_PlanFrames(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(plan_frames(static_cast<std::size_t>(state.range(0)), FrameSamplePlan{}));
}
BENCHMARK(BM_PlanFrames)->Arg(128)->Arg(10000);

void BM_Score(benchmark::State& state) {
  const Eigen::Index dim = state.range(0), frames = state.range(1);
  TemAdapter model(bench_config(dim), dim);
  const Matrix video = random_matrix(frames, dim, 1), texts = random_matrix(4, dim, 2);
  for (auto _ : state) benchmark::DoNotOptimize(model.score(video, texts));
}
BENCHMARK(BM_Score)->Args({64, 16})->Args({512, 128})->Unit(benchmark::kMillisecond);

void BM_TrainingStep(benchmark::State& state) {
  const Eigen::Index dim = state.range(0), frames = state.range(1);
  TemAdapter model(bench_config(dim), dim);
  const Matrix video = random_matrix(frames, dim, 3), texts = random_matrix(4, dim, 4);
  for (auto _ : state) {
    Tape tape;
    const LossTerms terms = model.training_forward(tape, video, texts, 0);
    tape.backward(terms.total);
    tape.accumulate_param_grads();
  }
}
BENCHMARK(BM_TrainingStep)->Args({64, 16})->Args({512, 128})->Unit(benchmark::kMillisecond);

void BM_StoreRead(benchmark::State& state) {
  const auto dir = std::filesystem::temp_directory_path() / "temadapter_bench_store";
  std::filesystem::remove_all(dir);
  {
    FeatureStoreWriter writer(dir, {"stub", 512, "8x16", 0, {}});
    for (int v = 0; v < 16; ++v) writer.put_video("train", {"v" + std::to_string(v), random_matrix(128, 512, 10 + v)});
    writer.commit();
  }
  const FeatureStore store(dir);
  int v = 0;
  for (auto _ : state) benchmark::DoNotOptimize(store.get_video("train", "v" + std::to_string(v++ % 16)));
  state.SetBytesProcessed(state.iterations() * 128 * 512 * 4);
  std::filesystem::remove_all(dir);
}
BENCHMARK(BM_StoreRead);

}  // namespace

BENCHMARK_MAIN();
