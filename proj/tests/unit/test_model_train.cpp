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

#include "ueba/model.hpp"

#include "ueba/common.hpp"
#include "ueba/rng.hpp"
#include "test_support.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <doctest.h>

using namespace ueba;

namespace {

constexpr int kT = 12;

ArchConfig small_arch() {
    ArchConfig arch;
    arch.latent_dim = 8;
    arch.widths = {4, 6, 8};
    return arch;
}

/// Sparse random count windows; spacing 1 gives chronologically adjacent
/// windows, spacing 2 leaves gaps so no pairs form.
std::vector<WindowSample> make_windows(int n, std::uint64_t seed, int spacing = 1,
                                       const std::string& user = "u") {
    Rng rng(seed);
    std::vector<WindowSample> out;
    const std::int64_t base = 1262563200;  // aligned day start
    for (int k = 0; k < n; ++k) {
        WindowSample s;
        s.user = user;
        s.window_hours = kT;
        s.window_start = base + std::int64_t(k) * spacing * kT * 3600;
        Matrix x(kT, kFeatureCount);
        for (double& c : x.data) {
            c = rng.uniform() < 0.35 ? std::floor(rng.uniform(1.0, 6.0)) : 0.0;
        }
        MaskValue mv = decompose(x);
        s.x = x;
        s.m = std::move(mv.m);
        s.v = std::move(mv.v);
        out.push_back(std::move(s));
    }
    return out;
}

ModelParameters make_model(TrainMode mode, const std::vector<WindowSample>& windows,
                           std::uint64_t seed) {
    LossConfig loss;
    loss.pos_weight = 2.0;
    ModelParameters m = init_model(small_arch(), loss, mode, kT, kFeatureCount, seed);
    m.norm = compute_norm_stats(windows);
    return m;
}

BatchData make_batch(const ModelParameters& m, const std::vector<WindowSample>& windows,
                     std::vector<std::pair<int, int>> pairs) {
    BatchData b;
    b.input = Tensor4(static_cast<int>(windows.size()), input_channels_for(m.mode), m.t(), m.f);
    for (std::size_t i = 0; i < windows.size(); ++i) {
        fill_input(m, windows[i], b.input, static_cast<int>(i));
        b.mask_target.push_back(windows[i].m);
        b.value_target.push_back(apply_norm(windows[i].v, m.norm));
    }
    b.pairs = std::move(pairs);
    return b;
}

std::vector<std::pair<std::string, std::vector<double>*>> blob_list(LayerSet& layers) {
    std::vector<std::pair<std::string, std::vector<double>*>> out;
    layers.for_each([&](const char* name, std::vector<double>& v) { out.emplace_back(name, &v); });
    return out;
}

}  // namespace

TEST_SUITE("model_train") {

TEST_CASE("analytic batch gradients match finite differences in every mode") {
    constexpr double kStep = 1e-5;
    constexpr double kTol = 1e-3;

    for (TrainMode mode : {TrainMode::kMaskValue, TrainMode::kMaskOnly, TrainMode::kValueOnly,
                           TrainMode::kStandardAe}) {
        for (std::uint64_t seed : {31u, 32u}) {
            const std::vector<WindowSample> windows = make_windows(4, seed);
            ModelParameters m = make_model(mode, windows, seed + 100);
            if (mode == TrainMode::kMaskValue) m.loss.lambda_temp = 0.01;
            const BatchData batch = make_batch(m, windows, {{0, 1}, {2, 3}});

            LayerSet grads = zero_grads_like(m);
            batch_loss_and_grads(m, batch, grads);
            auto params = blob_list(m.layers);
            auto gblobs = blob_list(grads);
            REQUIRE(params.size() == gblobs.size());

            Rng pick(seed * 7 + 1);
            for (std::size_t i = 0; i < params.size(); ++i) {
                std::vector<double>& p = *params[i].second;
                const std::vector<double>& g = *gblobs[i].second;
                REQUIRE(p.size() == g.size());
                for (int probe = 0; probe < 3; ++probe) {
                    const std::size_t c = static_cast<std::size_t>(
                        pick.uniform_int(0, static_cast<std::int64_t>(p.size()) - 1));
                    const double orig = p[c];
                    p[c] = orig + kStep;
                    const double up = batch_loss(m, batch).total;
                    p[c] = orig - kStep;
                    const double down = batch_loss(m, batch).total;
                    p[c] = orig;
                    const double fd = (up - down) / (2.0 * kStep);
                    INFO("mode " << train_mode_name(mode) << " blob " << params[i].first
                                 << " coord " << c);
                    CHECK(ueba::test::rel_err(g[c], fd) < kTol);
                }
            }
        }
    }
}

TEST_CASE("mask_only leaves the value head untouched") {
    const std::vector<WindowSample> windows = make_windows(4, 21);
    ModelParameters m = make_model(TrainMode::kMaskOnly, windows, 22);
    const BatchData batch = make_batch(m, windows, {});

    LayerSet grads = zero_grads_like(m);
    const BatchStats stats = batch_loss_and_grads(m, batch, grads);
    CHECK(stats.l_value == 0.0);
    CHECK(stats.l_temp == 0.0);
    CHECK(stats.total == stats.l_mask);

    for (double g : grads.head_value.w.data) CHECK(g == 0.0);
    for (double g : grads.head_value.b) CHECK(g == 0.0);
    // The shared trunk still learns through the mask head.
    double trunk = 0.0;
    for (double g : grads.enc1.w.data) trunk += std::abs(g);
    CHECK(trunk > 0.0);
}

TEST_CASE("temporal term only couples declared pairs") {
    const std::vector<WindowSample> windows = make_windows(4, 41);
    ModelParameters m = make_model(TrainMode::kMaskValue, windows, 42);

    // lambda_temp = 0: declared pairs change nothing, bit for bit.
    const BatchData paired = make_batch(m, windows, {{0, 1}, {2, 3}});
    const BatchData unpaired = make_batch(m, windows, {});
    LayerSet g1 = zero_grads_like(m);
    LayerSet g2 = zero_grads_like(m);
    const BatchStats s1 = batch_loss_and_grads(m, paired, g1);
    const BatchStats s2 = batch_loss_and_grads(m, unpaired, g2);
    CHECK(s1.total == s2.total);
    CHECK(s1.l_temp == 0.0);
    CHECK(g1.enc1.w.data == g2.enc1.w.data);
    CHECK(g1.dec_fc.w.data == g2.dec_fc.w.data);

    // lambda_temp > 0: the pairs contribute loss and latent gradients.
    m.loss.lambda_temp = 0.01;
    LayerSet g3 = zero_grads_like(m);
    const BatchStats s3 = batch_loss_and_grads(m, paired, g3);
    CHECK(s3.l_temp > 0.0);
    CHECK(s3.total == s3.l_mask + m.loss.lambda_value * s3.l_value + 0.01 * s3.l_temp);
    CHECK(g3.enc_fc.w.data != g1.enc_fc.w.data);

    // Without pairs the term vanishes even when enabled.
    LayerSet g4 = zero_grads_like(m);
    const BatchStats s4 = batch_loss_and_grads(m, unpaired, g4);
    CHECK(s4.l_temp == 0.0);
}

TEST_CASE("train pairs adjacent windows and reports the temporal term") {
    TrainConfig cfg;
    cfg.batch_size = 8;
    cfg.max_epochs = 1;
    cfg.seed = 3;

    const std::vector<WindowSample> adjacent = make_windows(6, 51);
    ModelParameters m1 = make_model(TrainMode::kMaskValue, adjacent, 52);
    m1.loss.lambda_temp = 0.01;
    const std::vector<EpochStats> h1 = train(m1, adjacent, cfg);
    REQUIRE(h1.size() == 1);
    CHECK(h1[0].l_temp > 0.0);

    const std::vector<WindowSample> gapped = make_windows(6, 51, 2);
    ModelParameters m2 = make_model(TrainMode::kMaskValue, gapped, 52);
    m2.loss.lambda_temp = 0.01;
    const std::vector<EpochStats> h2 = train(m2, gapped, cfg);
    REQUIRE(h2.size() == 1);
    CHECK(h2[0].l_temp == 0.0);
}

TEST_CASE("a small model overfits one batch") {
    const std::vector<WindowSample> windows = make_windows(4, 61);
    ModelParameters m = make_model(TrainMode::kMaskOnly, windows, 62);
    m.loss.pos_weight = 1.0;

    TrainConfig cfg;
    cfg.mode = TrainMode::kMaskOnly;
    cfg.batch_size = 8;
    cfg.max_epochs = 500;
    cfg.patience = 500;
    cfg.min_delta = 0.0;
    cfg.adam.lr = 2e-3;
    cfg.seed = 63;

    const std::vector<EpochStats> history = train(m, windows, cfg);
    REQUIRE(!history.empty());
    CHECK(history.back().l_mask < 0.1);
    CHECK(history.back().l_mask < history.front().l_mask);
    CHECK(m.epochs_run == history.back().epoch);
}

TEST_CASE("training is deterministic") {
    auto run = [] {
        const std::vector<WindowSample> windows = make_windows(6, 71);
        ModelParameters m = make_model(TrainMode::kMaskValue, windows, 72);
        TrainConfig cfg;
        cfg.batch_size = 4;
        cfg.max_epochs = 5;
        cfg.seed = 73;
        const std::vector<EpochStats> history = train(m, windows, cfg);
        std::vector<double> fingerprint;
        for (const EpochStats& e : history) fingerprint.push_back(e.loss);
        m.layers.for_each([&](const char*, std::vector<double>& v) {
            fingerprint.insert(fingerprint.end(), v.begin(), v.end());
        });
        return fingerprint;
    };
    CHECK(run() == run());
}

TEST_CASE("plateaued training stops after patience epochs") {
    const std::vector<WindowSample> windows = make_windows(5, 81);
    ModelParameters m = make_model(TrainMode::kMaskOnly, windows, 82);
    TrainConfig cfg;
    cfg.mode = TrainMode::kMaskOnly;
    cfg.batch_size = 8;  // one batch per epoch: zero lr means a flat loss
    cfg.max_epochs = 50;
    cfg.patience = 3;
    cfg.adam.lr = 0.0;
    const std::vector<EpochStats> history = train(m, windows, cfg);
    CHECK(history.size() == 4);  // 1 best epoch + patience bad ones
}

TEST_CASE("training contract violations are fatal") {
    std::vector<WindowSample> windows = make_windows(4, 91);
    ModelParameters m = make_model(TrainMode::kMaskValue, windows, 92);
    TrainConfig cfg;
    cfg.max_epochs = 1;

    cfg.mode = TrainMode::kMaskOnly;
    CHECK_THROWS_AS(train(m, windows, cfg), ConfigError);
    cfg.mode = TrainMode::kMaskValue;

    CHECK_THROWS_AS(train(m, {}, cfg), DataContractError);

    windows[2].malicious = true;
    CHECK_THROWS_WITH_AS(train(m, windows, cfg), doctest::Contains("malicious window"),
                         DataContractError);
    windows[2].malicious = false;

    ModelParameters bare = init_model(small_arch(), LossConfig{}, TrainMode::kMaskValue, kT,
                                      kFeatureCount, 93);
    CHECK_THROWS_WITH_AS(train(bare, windows, cfg), doctest::Contains("normalization"),
                         DataContractError);
}

TEST_CASE("resolve_pos_weight is the inactive/active ratio with clamps") {
    auto with_mask = [](std::vector<double> cells, int rows, int cols) {
        WindowSample s;
        s.m = Matrix(rows, cols);
        s.m.data = std::move(cells);
        return s;
    };
    // 3 active of 8 cells: ratio (8-3)/3.
    const std::vector<WindowSample> mixed = {
        with_mask({1, 0, 0, 0}, 2, 2),
        with_mask({1, 1, 0, 0}, 2, 2),
    };
    CHECK(resolve_pos_weight(mixed) == (8.0 - 3.0) / 3.0);

    // 1 active of 100: ratio 99 capped at 50.
    std::vector<double> sparse(100, 0.0);
    sparse[0] = 1.0;
    CHECK(resolve_pos_weight({with_mask(sparse, 10, 10)}) == LossConfig::kPosWeightCap);

    // No active cells at all: the cap again.
    CHECK(resolve_pos_weight({with_mask({0, 0, 0, 0}, 2, 2)}) == LossConfig::kPosWeightCap);

    // Fully active: clamped up to 0.01.
    CHECK(resolve_pos_weight({with_mask({1, 1, 1, 1}, 2, 2)}) == 0.01);
}

}  // TEST_SUITE
