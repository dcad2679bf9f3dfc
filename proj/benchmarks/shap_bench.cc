#include <benchmark/benchmark.h>

#include "common.h"
#include "opms/allocator.h"
#include "opms/explain/explanation.h"

namespace {

using opms::models::ModelKind;

opms::RowMatrix first_rows(const opms::RowMatrix& m, Eigen::Index n) { return m.topRows(n); }

// Kernel SHAP on the selected-feature MLP (8 features, exact enumeration) and
// the full-feature MLP (36 features, sampled coalitions).
void BM_KernelShap(benchmark::State& state) {
  const bool selected = state.range(0) != 0;
  const auto& f = opms::bench::fixture();
  const auto& model = opms::bench::trained(ModelKind::kNeuralNet, selected);
  const auto train = selected ? opms::selection::project_dataset(f.train, f.selected) : f.train;
  const auto test = selected ? opms::selection::project_dataset(f.test, f.selected) : f.test;
  const auto bg = opms::explain::sample_background(train, 50, 1);
  const auto x = first_rows(test.features(), 4);
  opms::explain::ExplainOptions opt;
  opt.kernel.n_coalitions = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto e = opms::explain::explain_model(model, bg, x, opt);
    benchmark::DoNotOptimize(e.phi.data());
  }
  state.SetItemsProcessed(state.iterations() * x.rows());
}

BENCHMARK(BM_KernelShap)
    ->Args({1, 2048})
    ->Args({0, 512})
    ->Args({0, 2048})
    ->Unit(benchmark::kMillisecond);

void BM_TreeShap(benchmark::State& state) {
  const auto& f = opms::bench::fixture();
  const auto& model = opms::bench::trained(ModelKind::kGradientBoostedTrees, false);
  const auto bg = opms::explain::sample_background(f.train, state.range(0), 1);
  const auto x = first_rows(f.test.features(), 4);
  for (auto _ : state) {
    auto e = opms::explain::explain_tree_model(model, bg, x);
    benchmark::DoNotOptimize(e.phi.data());
  }
  state.SetItemsProcessed(state.iterations() * x.rows());
}

BENCHMARK(BM_TreeShap)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  opms::configure_allocator();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
