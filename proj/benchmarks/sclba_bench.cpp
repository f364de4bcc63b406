#include <benchmark/benchmark.h>

#include <numeric>

#include "sclba/attack.hpp"
#include "sclba/model.hpp"
#include "sclba/synthetic.hpp"

namespace {

using namespace sclba;

DataSplit everything_train(const Dataset& ds) {
  DataSplit split;
  split.train_indices.resize(ds.graphs.size());
  std::iota(split.train_indices.begin(), split.train_indices.end(), std::size_t{0});
  return split;
}

// Trigger selection over a growing corpus of ~30-node graphs.
void BM_TriggerSelection(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Dataset ds = make_synthetic_dataset({.num_graphs = n, .min_nodes = 25, .max_nodes = 35});
  const DataSplit split = everything_train(ds);
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_semantic_trigger(ds, split, 1));
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_TriggerSelection)->RangeMultiplier(2)->Range(1 << 10, 1 << 14)->Complexity(benchmark::oN);

void BM_PoisonGeneration(benchmark::State& state) {
  const Dataset ds = make_synthetic_dataset({.num_graphs = 4000, .min_nodes = 10, .max_nodes = 20});
  const DataSplit split = split_dataset(ds, 0.8, 1);
  AttackConfig ac;
  ac.target_label = 1;
  ac.poisoning_rate = 0.03;
  ac.trigger_size = 3;
  ac.trigger_class = select_semantic_trigger(ds, split, 1).trigger_class;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_poisoned_trainset(ds, split, ac));
  }
}
BENCHMARK(BM_PoisonGeneration);

// One training epoch over 512 graphs of 10-20 nodes.
void BM_TrainEpoch(benchmark::State& state) {
  const auto arch = static_cast<Architecture>(state.range(0));
  const Dataset ds = make_synthetic_dataset({.num_graphs = 512, .min_nodes = 10, .max_nodes = 20});
  const auto data = encode_graphs(ds.graphs, ds.node_class_vocab_size(), arch);
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  TrainConfig cfg;
  cfg.max_epochs = 1;
  const Model init = Model::create(arch, ds.node_class_vocab_size(), 2, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(init, data, idx, cfg));
  }
  state.SetLabel(std::string(to_string(arch)));
}
BENCHMARK(BM_TrainEpoch)->Arg(static_cast<int>(Architecture::kGcn))->Arg(static_cast<int>(Architecture::kSage))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
