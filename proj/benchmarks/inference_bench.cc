#include <benchmark/benchmark.h>

#include <vector>

#include "common.h"
#include "opms/allocator.h"

namespace {

using opms::models::ModelKind;

void BM_PredictProba(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  const bool selected = state.range(1) != 0;
  const auto& f = opms::bench::fixture();
  const auto& model = opms::bench::trained(kind, selected);
  const auto x = selected ? opms::selection::project_dataset(f.test, f.selected).features()
                          : f.test.features();
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (auto _ : state) {
    model.predict_proba_unchecked(x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * x.rows());
  state.SetLabel(std::string(opms::models::model_kind_name(kind)) + (selected ? "/selected" : "/full"));
}

BENCHMARK(BM_PredictProba)
    ->ArgsProduct({{0, 1, 2}, {0, 1}})
    ->Unit(benchmark::kMicrosecond);

}  // namespace

int main(int argc, char** argv) {
  opms::configure_allocator();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
