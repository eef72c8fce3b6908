// Copyright 2026 The seqcluster Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Throughput of the noise sampler, the decoder and the matcher.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "seqcluster/circuits.h"
#include "seqcluster/decoder.h"
#include "seqcluster/errors.h"
#include "seqcluster/matching.h"
#include "seqcluster/random.h"

namespace {

using namespace seqcluster;

void bm_sample_em1(benchmark::State &state) {
    int L = int(state.range(0));
    Schedule s = schedule_protocolB(LatticeSpec::cube(L));
    NoiseSampler sampler(s, ErrorModel::em1(0.004));
    Rng rng(1);
    FaultSet scratch;
    ErrorSample sample;
    sample.resize(size_t(sampler.max_output_label()) + 1);
    for (auto _ : state) {
        sample.clear();
        sampler.sample_errors(rng, scratch, sample);
        benchmark::DoNotOptimize(sample.touched.data());
    }
}
BENCHMARK(bm_sample_em1)->Arg(5)->Arg(9)->Arg(13);

void bm_decode_em1(benchmark::State &state) {
    int L = int(state.range(0));
    LatticeSpec spec = LatticeSpec::cube(L);
    Schedule s = schedule_protocolB(spec);
    NoiseSampler sampler(s, ErrorModel::em1(0.004));
    Decoder decoder(spec);
    Rng rng(2);
    FaultSet scratch;
    std::vector<ErrorSample> samples(256);
    for (auto &sample : samples) {
        sample.resize(size_t(sampler.max_output_label()) + 1);
        sampler.sample_errors(rng, scratch, sample);
    }
    size_t i = 0;
    for (auto _ : state) {
        DecodeOutcome out = decoder.decode(samples[i++ % samples.size()], rng);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(bm_decode_em1)->Arg(5)->Arg(9)->Arg(13);

void bm_min_weight_perfect_matching(benchmark::State &state) {
    int n = int(state.range(0));
    std::mt19937_64 rng(3);
    std::vector<WeightedEdge> edges;
    for (int i = 0; i < n; i++) {
        for (int j = i + 1; j < n; j++) edges.push_back({i, j, int64_t(rng() % 100)});
    }
    for (auto _ : state) {
        PerfectMatching m = min_weight_perfect_matching(n, edges);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(bm_min_weight_perfect_matching)->Arg(10)->Arg(40)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
