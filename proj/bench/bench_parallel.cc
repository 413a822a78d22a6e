// Parallel kernels against their serial reference twins on synthetic
// workloads. Run with OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <random>

#include "precedence/evaluation.h"
#include "precedence/features.h"
#include "precedence/linear.h"
#include "precedence/models.h"
#include "precedence/neural.h"
#include "precedence/synthetic.h"

namespace precedence {
namespace {

const SyntheticCorpus& corpus() {
  static const SyntheticCorpus s = [] {
    SyntheticConfig c;
    c.documents = 80;
    c.seed = 9;
    return generate_synthetic(c);
  }();
  return s;
}

constexpr std::size_t kDimension = 2000;

// Sparse rows whose label depends on a few indicator columns.
const std::vector<FeatureVector>& sparse_data() {
  static const std::vector<FeatureVector> data = [] {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> column(3, static_cast<int>(kDimension) - 1);
    std::vector<FeatureVector> out;
    for (int i = 0; i < 3000; ++i) {
      FeatureVector v;
      v.label = kCoarseLabels[static_cast<std::size_t>(i % 3)];
      v.indices.push_back(static_cast<int>(class_index(v.label)));
      for (int k = 0; k < 30; ++k) v.indices.push_back(column(rng));
      std::sort(v.indices.begin(), v.indices.end());
      v.indices.erase(std::unique(v.indices.begin(), v.indices.end()), v.indices.end());
      out.push_back(std::move(v));
    }
    return out;
  }();
  return data;
}

void BM_ExtractFeatures(benchmark::State& state) {
  const auto& s = corpus();
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(s.pairs, s.corpus));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(s.pairs.size()));
}
void BM_ExtractFeaturesReference(benchmark::State& state) {
  const auto& s = corpus();
  for (auto _ : state) benchmark::DoNotOptimize(reference::extract_features(s.pairs, s.corpus));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(s.pairs.size()));
}

TrainConfig linear_config() {
  TrainConfig c;
  c.epochs = 5;
  return c;
}
void BM_TrainLinear(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_linear(sparse_data(), kDimension, Loss::Hinge,
                                          Regularizer::L2, linear_config()));
  }
}
void BM_TrainLinearReference(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::train_linear(sparse_data(), kDimension, Loss::Hinge,
                                                     Regularizer::L2, linear_config()));
  }
}

ForestConfig forest_config() {
  ForestConfig c;
  c.n_trees = 16;
  c.max_depth = 6;
  return c;
}
void BM_TrainForest(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_forest(sparse_data(), kDimension, forest_config()));
  }
}
void BM_TrainForestReference(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reference::train_forest(sparse_data(), kDimension, forest_config()));
  }
}

struct NetWorkload {
  Network net;
  std::vector<NetExample> examples;
  std::vector<std::size_t> batch;
};

const NetWorkload& net_workload() {
  static const NetWorkload w = [] {
    const auto& s = corpus();
    NetWorkload out;
    for (const AnnotatedPair& p : s.pairs) {
      out.examples.push_back({net_input(p, s.corpus), gold_label(p)});
    }
    NetConfig c;
    c.architecture = Architecture::Pitchfork;
    c.embedding_dim = 50;
    out.net = Network::initialize(c, build_vocabulary(out.examples));
    for (std::size_t i = 0; i < 32 && i < out.examples.size(); ++i) out.batch.push_back(i);
    return out;
  }();
  return w;
}
void BM_BatchGradient(benchmark::State& state) {
  const NetWorkload& w = net_workload();
  for (auto _ : state) benchmark::DoNotOptimize(batch_gradient(w.net, w.examples, w.batch, 3));
}
void BM_BatchGradientReference(benchmark::State& state) {
  const NetWorkload& w = net_workload();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::batch_gradient(w.net, w.examples, w.batch, 3));
  }
}

struct Predictions {
  std::vector<CoarseLabel> a, b, gold;
};
const Predictions& predictions() {
  static const Predictions p = [] {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> label(0, 2);
    Predictions out;
    for (int i = 0; i < 2000; ++i) {
      out.gold.push_back(kCoarseLabels[static_cast<std::size_t>(label(rng))]);
      out.a.push_back(label(rng) ? out.gold.back() : CoarseLabel::Nil);
      out.b.push_back(label(rng) ? out.gold.back() : CoarseLabel::Nil);
    }
    return out;
  }();
  return p;
}
void BM_Bootstrap(benchmark::State& state) {
  const Predictions& p = predictions();
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_compare(p.a, p.b, p.gold, 2000, 4));
}
void BM_BootstrapReference(benchmark::State& state) {
  const Predictions& p = predictions();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::bootstrap_compare(p.a, p.b, p.gold, 2000, 4));
  }
}

const PairClassifier& forest_model() {
  static const auto m = [] {
    ModelSpec spec = builtin_spec("rf");
    spec.forest.n_trees = 20;
    return train_model(spec, corpus().pairs, {}, corpus().corpus, 1);
  }();
  return *m;
}
void BM_PredictAll(benchmark::State& state) {
  const auto& s = corpus();
  for (auto _ : state) benchmark::DoNotOptimize(predict_all(forest_model(), s.pairs, s.corpus));
}
void BM_PredictAllReference(benchmark::State& state) {
  const auto& s = corpus();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::predict_all(forest_model(), s.pairs, s.corpus));
  }
}

CvConfig cv_config() {
  CvConfig c;
  c.folds = 5;
  c.bootstrap_iterations = 100;
  for (const char* id : {"intra", "inter", "reichenbach", "lr-l2", "svm-l1"}) {
    c.models.push_back(builtin_spec(id));
  }
  return c;
}
void BM_RunCv(benchmark::State& state) {
  const auto& s = corpus();
  for (auto _ : state) benchmark::DoNotOptimize(run_cv(s.pairs, s.corpus, cv_config()));
}
void BM_RunCvReference(benchmark::State& state) {
  const auto& s = corpus();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::run_cv(s.pairs, s.corpus, cv_config()));
  }
}

BENCHMARK(BM_ExtractFeatures)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ExtractFeaturesReference)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TrainLinear)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TrainLinearReference)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TrainForest)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TrainForestReference)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BatchGradient)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BatchGradientReference)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Bootstrap)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BootstrapReference)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PredictAll)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PredictAllReference)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RunCv)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RunCvReference)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
}  // namespace precedence

BENCHMARK_MAIN();
