// Copyright (C) 2026 The UEBA Toolkit Authors. All rights reserved.
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

#include "ueba/losses.hpp"
#include "ueba/metrics.hpp"
#include "ueba/model.hpp"
#include "ueba/nn.hpp"
#include "ueba/rng.hpp"
#include "ueba/tensor.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace ueba;

ModelParameters make_model(int t) {
    ArchConfig arch;
    LossConfig loss;
    loss.pos_weight = 10.0;
    return init_model(arch, loss, TrainMode::kMaskValue, t, kFeatureCount, 7);
}

Tensor4 random_input(int n, int c, int h, int w, Rng& rng) {
    Tensor4 x(n, c, h, w);
    for (double& v : x.data) v = rng.uniform();
    return x;
}

BatchData make_batch(const ModelParameters& m, int n, Rng& rng) {
    BatchData batch;
    batch.input = random_input(n, input_channels_for(m.mode), m.t(), m.f, rng);
    for (int i = 0; i < n; ++i) {
        Matrix mask(m.t(), m.f), value(m.t(), m.f);
        for (std::size_t j = 0; j < mask.data.size(); ++j) {
            mask.data[j] = rng.uniform() < 0.25 ? 1.0 : 0.0;
            value.data[j] = rng.normal();
        }
        batch.mask_target.push_back(mask);
        batch.value_target.push_back(value);
        if (i + 1 < n && i % 2 == 0) batch.pairs.emplace_back(i, i + 1);
    }
    return batch;
}

void BM_Conv2dForward(benchmark::State& state) {
    Rng rng(11);
    Tensor4 x = random_input(32, 2, 24, 12, rng);
    Tensor4 w(16, 2, 3, 3);
    for (double& v : w.data) v = 0.1 * rng.normal();
    std::vector<double> b(16, 0.0);
    ConvSpec spec{2, 1, 1, 1};
    for (auto _ : state) {
        Tensor4 y = conv2d_forward(x, w, b, spec);
        benchmark::DoNotOptimize(y.data.data());
    }
}
BENCHMARK(BM_Conv2dForward);

void BM_ModelForward(benchmark::State& state) {
    const int t = static_cast<int>(state.range(0));
    ModelParameters m = make_model(t);
    Rng rng(13);
    Tensor4 x = random_input(32, 2, t, kFeatureCount, rng);
    for (auto _ : state) {
        ForwardCache cache = forward(m, x);
        benchmark::DoNotOptimize(cache.mask_logits.data.data());
    }
}
BENCHMARK(BM_ModelForward)->Arg(12)->Arg(24)->Arg(48);

void BM_BatchLossAndGrads(benchmark::State& state) {
    ModelParameters m = make_model(24);
    Rng rng(17);
    BatchData batch = make_batch(m, 32, rng);
    for (auto _ : state) {
        LayerSet grads = zero_grads_like(m);
        BatchStats stats = batch_loss_and_grads(m, batch, grads);
        benchmark::DoNotOptimize(stats.total);
    }
}
BENCHMARK(BM_BatchLossAndGrads);

void BM_BceWithLogits(benchmark::State& state) {
    Rng rng(19);
    Matrix logits(24, 12), targets(24, 12);
    for (std::size_t i = 0; i < logits.data.size(); ++i) {
        logits.data[i] = 2.0 * rng.normal();
        targets.data[i] = rng.uniform() < 0.2 ? 1.0 : 0.0;
    }
    for (auto _ : state) {
        LossResult r = bce_with_logits(logits, targets, 10.0);
        benchmark::DoNotOptimize(r.loss);
    }
}
BENCHMARK(BM_BceWithLogits);

void BM_PrAuc(benchmark::State& state) {
    Rng rng(23);
    std::vector<LabeledScore> items;
    for (int i = 0; i < 10000; ++i) {
        LabeledScore ls;
        ls.label = rng.uniform() < 0.1 ? 1 : 0;
        // Coarse grid forces heavy threshold ties, the expensive path.
        ls.score = static_cast<double>(rng.uniform_int(0, 999)) / 1000.0 + 0.2 * ls.label;
        ls.scenario = ls.label ? 1 : 0;
        items.push_back(ls);
    }
    for (auto _ : state) {
        double ap = pr_auc(items);
        benchmark::DoNotOptimize(ap);
    }
}
BENCHMARK(BM_PrAuc);

}  // namespace

BENCHMARK_MAIN();
