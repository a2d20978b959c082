// Copyright 2026 The stancekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "stancekit/data.h"
#include "stancekit/features.h"
#include "stancekit/preproc.h"

namespace {

using namespace stancekit;

const std::vector<std::string>& corpus() {
  static const std::vector<std::string> texts = [] {
    std::vector<std::string> out;
    const Dataset ds = load_dataset(std::string(STANCEKIT_BENCH_DATA_DIR) + "/synthetic60.csv");
    // repeat the fixture to reach a few hundred documents
    for (int rep = 0; rep < 8; ++rep) {
      for (const auto& r : ds.records) out.push_back(preprocess(r.text, {true, true}));
    }
    return out;
  }();
  return texts;
}

void BM_Preprocess(benchmark::State& state) {
  const Dataset ds = load_dataset(std::string(STANCEKIT_BENCH_DATA_DIR) + "/synthetic60.csv");
  for (auto _ : state) {
    for (const auto& r : ds.records) benchmark::DoNotOptimize(preprocess(r.text, {true, true}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(ds.size()));
}
BENCHMARK(BM_Preprocess);

void BM_FitUnion(benchmark::State& state) {
  const UnionSpec spec = tw1_union(1, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_union(corpus(), spec));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(corpus().size()));
}
BENCHMARK(BM_FitUnion)->Arg(1)->Arg(3)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_TransformUnion(benchmark::State& state) {
  const FittedUnion fu = fit_union(corpus(), tw1_union(1, static_cast<int>(state.range(0))));
  for (auto _ : state) {
    for (const auto& doc : corpus()) benchmark::DoNotOptimize(transform_union(fu, doc));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(corpus().size()));
}
BENCHMARK(BM_TransformUnion)->Arg(1)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace
