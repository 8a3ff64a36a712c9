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

#pragma once

#include "ueba/losses.hpp"
#include "ueba/nn.hpp"
#include "ueba/optim.hpp"
#include "ueba/tensor.hpp"
#include "ueba/windowing.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ueba {

struct ArchConfig {
    int latent_dim = 32;
    std::vector<int> widths = {16, 32, 64};  // exactly 3 encoder blocks
    int kernel = 3;                          // square kernel, padding 1
    double leaky_slope = 0.01;

    void validate() const;
};

enum class TrainMode { kMaskValue, kMaskOnly, kValueOnly, kStandardAe };

const char* train_mode_name(TrainMode m);
TrainMode train_mode_from_name(const std::string& name);

/// Channels the mode feeds to the network. standard_ae is the single-channel
/// value autoencoder baseline; every other mode stacks mask then value.
int input_channels_for(TrainMode m);

struct TrainConfig {
    int batch_size = 32;
    int max_epochs = 50;
    int patience = 5;         // epochs without improvement before stopping
    double min_delta = 1e-4;  // minimum loss improvement that resets patience
    std::uint64_t seed = 0;
    TrainMode mode = TrainMode::kMaskValue;
    AdamConfig adam;

    void validate() const;
};

struct ConvLayer {
    Tensor4 w;
    std::vector<double> b;
};

struct DenseLayer {
    Matrix w;  // out x in
    std::vector<double> b;
};

/// The nine learned layers. Also used for gradients, which mirror the
/// parameter shapes exactly.
struct LayerSet {
    ConvLayer enc1, enc2, enc3;
    DenseLayer enc_fc, dec_fc;
    ConvLayer dec1, dec2, head_mask, head_value;

    /// Visits every parameter blob in a fixed canonical order.
    template <typename Fn>
    void for_each(Fn&& fn) {
        fn("enc1.w", enc1.w.data);
        fn("enc1.b", enc1.b);
        fn("enc2.w", enc2.w.data);
        fn("enc2.b", enc2.b);
        fn("enc3.w", enc3.w.data);
        fn("enc3.b", enc3.b);
        fn("enc_fc.w", enc_fc.w.data);
        fn("enc_fc.b", enc_fc.b);
        fn("dec_fc.w", dec_fc.w.data);
        fn("dec_fc.b", dec_fc.b);
        fn("dec1.w", dec1.w.data);
        fn("dec1.b", dec1.b);
        fn("dec2.w", dec2.w.data);
        fn("dec2.b", dec2.b);
        fn("head_mask.w", head_mask.w.data);
        fn("head_mask.b", head_mask.b);
        fn("head_value.w", head_value.w.data);
        fn("head_value.b", head_value.b);
    }
    template <typename Fn>
    void for_each(Fn&& fn) const {
        const_cast<LayerSet*>(this)->for_each(
            [&](const char* name, const std::vector<double>& v) { fn(name, v); });
    }
};

struct ModelParameters {
    ArchConfig arch;
    LossConfig loss;  // pos_weight here is the resolved positive value
    TrainMode mode = TrainMode::kMaskValue;
    NormStats norm;
    std::uint64_t init_seed = 0;
    int epochs_run = 0;
    int f = kFeatureCount;
    // Encoder bucket-axis sizes {T, T1, T2, T3}; the decoder's output padding
    // is derived from this chain so every W in {12,24,48} round-trips.
    std::vector<int> t_chain;

    LayerSet layers;

    int t() const { return t_chain.front(); }
    int latent_dim() const { return arch.latent_dim; }
};

/// Deterministic He-initialized model; runs a probe forward pass on a zero
/// input as a shape self-check.
ModelParameters init_model(const ArchConfig& arch, const LossConfig& loss, TrainMode mode, int t,
                           int f, std::uint64_t seed);

struct ForwardCache {
    Tensor4 input;
    Tensor4 a1_pre, a1, a2_pre, a2, a3_pre, a3;
    Matrix z;       // batch x d, linear (no activation on the latent)
    Matrix d0_pre;  // batch x (c3 * T3 * F)
    Tensor4 d0, d1_pre, d1, d2_pre, d2;
    Tensor4 mask_logits;  // batch x 1 x T x F
    Tensor4 value_out;    // batch x 1 x T x F
};

ForwardCache forward(const ModelParameters& m, const Tensor4& input);

/// Encoder half only.
std::vector<double> encode(const ModelParameters& m, const Tensor4& single_input);

/// Decoder half only; z must have length latent_dim.
std::pair<Matrix, Matrix> decode(const ModelParameters& m, const std::vector<double>& z);

/// Backpropagates head gradients (plus an optional extra gradient injected at
/// the latent, used by the temporal loss) into parameter gradients.
LayerSet backward(const ModelParameters& m, const ForwardCache& cache,
                  const Tensor4& g_mask_logits, const Tensor4& g_value_out,
                  const Matrix& g_z_extra);

LayerSet zero_grads_like(const ModelParameters& m);

/// One assembled minibatch: stacked inputs, per-sample targets, and the
/// within-batch index pairs the temporal term couples.
struct BatchData {
    Tensor4 input;
    std::vector<Matrix> mask_target;   // binary T x F per sample
    std::vector<Matrix> value_target;  // normalized T x F per sample
    std::vector<std::pair<int, int>> pairs;
};

/// Builds the network input for one sample: [mask, normalized value] stacked
/// along channels, or the value channel alone for standard_ae.
void fill_input(const ModelParameters& m, const WindowSample& s, Tensor4& batch, int slot);

struct BatchStats {
    double total = 0.0;
    double l_mask = 0.0;
    double l_value = 0.0;
    double l_temp = 0.0;
};

/// Mode-aware batch loss. Per-window losses use mean-over-cells reduction and
/// are averaged over the batch; the temporal term averages over the batch's
/// pairs.
BatchStats batch_loss(const ModelParameters& m, const BatchData& batch);

/// Same loss, plus gradients for every parameter.
BatchStats batch_loss_and_grads(const ModelParameters& m, const BatchData& batch,
                                LayerSet& grads);

struct EpochStats {
    int epoch = 0;  // 1-based
    double loss = 0.0;
    double l_mask = 0.0;
    double l_value = 0.0;
    double l_temp = 0.0;
};

/// Minibatch Adam with early stopping on the training-loss plateau. Batch
/// units are disjoint chronologically adjacent same-user window pairs (plus
/// singletons), built once and shuffled per epoch, so the temporal term sees
/// the same pairing regardless of lambda_temp. A malicious window in the
/// input is a split-contract violation and fatal.
std::vector<EpochStats> train(ModelParameters& m, const std::vector<WindowSample>& windows,
                              const TrainConfig& cfg);

/// Ratio (inactive cells)/(active cells) over the mask channel, capped at
/// LossConfig::kPosWeightCap; used when the configured pos_weight is 0 (auto).
double resolve_pos_weight(const std::vector<WindowSample>& windows);

void save_checkpoint(const ModelParameters& m, const std::string& path);
ModelParameters load_checkpoint(const std::string& path);

}  // namespace ueba
