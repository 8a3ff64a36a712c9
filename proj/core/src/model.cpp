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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>

namespace ueba {

namespace {

constexpr char kMagic[8] = {'U', 'E', 'B', 'A', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;

ConvSpec conv_spec() { return ConvSpec{2, 1, 1, 1}; }

Matrix tensor_as_matrix(const Tensor4& t) {
    Matrix out(t.n, static_cast<int>(t.sample_size()));
    out.data = t.data;
    return out;
}

Tensor4 matrix_as_tensor(const Matrix& m, int c, int h, int w) {
    Tensor4 out(m.rows, c, h, w);
    if (out.data.size() != m.data.size()) {
        throw NumericError("matrix_as_tensor: element count mismatch");
    }
    out.data = m.data;
    return out;
}

Matrix sample_matrix(const Tensor4& t, int n, int channel) {
    Matrix out(t.h, t.w);
    const double* src = t.sample(n) + static_cast<std::size_t>(channel) * t.h * t.w;
    std::copy(src, src + out.data.size(), out.data.begin());
    return out;
}

int out_pad_for(int in_dim, int target, int kernel) {
    const int base = tconv_out_dim(in_dim, kernel, 2, 1, 0);
    const int op = target - base;
    if (op < 0 || op >= 2) {
        throw NumericError("decoder output padding out of range for target dim " +
                           std::to_string(target));
    }
    return op;
}

/// Allocates all layer tensors for the given geometry (weights zeroed).
LayerSet build_layers(const ArchConfig& arch, int in_channels, const std::vector<int>& t_chain,
                      int f) {
    const int k = arch.kernel;
    const int c1 = arch.widths[0];
    const int c2 = arch.widths[1];
    const int c3 = arch.widths[2];
    const int d = arch.latent_dim;
    const int flat = c3 * t_chain[3] * f;

    LayerSet L;
    L.enc1 = {Tensor4(c1, in_channels, k, k), std::vector<double>(c1, 0.0)};
    L.enc2 = {Tensor4(c2, c1, k, k), std::vector<double>(c2, 0.0)};
    L.enc3 = {Tensor4(c3, c2, k, k), std::vector<double>(c3, 0.0)};
    L.enc_fc = {Matrix(d, flat), std::vector<double>(d, 0.0)};
    L.dec_fc = {Matrix(flat, d), std::vector<double>(flat, 0.0)};
    // Transposed-conv weights use (in_c, out_c, kh, kw) layout.
    L.dec1 = {Tensor4(c3, c2, k, k), std::vector<double>(c2, 0.0)};
    L.dec2 = {Tensor4(c2, c1, k, k), std::vector<double>(c1, 0.0)};
    L.head_mask = {Tensor4(c1, 1, k, k), std::vector<double>(1, 0.0)};
    L.head_value = {Tensor4(c1, 1, k, k), std::vector<double>(1, 0.0)};
    return L;
}

double effective_lambda_value(const ModelParameters& m) {
    switch (m.mode) {
        case TrainMode::kMaskValue: return m.loss.lambda_value;
        case TrainMode::kMaskOnly: return 0.0;
        case TrainMode::kValueOnly:
        case TrainMode::kStandardAe: return 1.0;
    }
    return 0.0;
}

bool uses_mask_loss(TrainMode mode) {
    return mode == TrainMode::kMaskValue || mode == TrainMode::kMaskOnly;
}

// ---- checkpoint byte helpers (explicit little-endian) ----

void put_bytes(std::string& buf, const void* p, std::size_t len) {
    buf.append(static_cast<const char*>(p), len);
}

void put_u32(std::string& buf, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    put_bytes(buf, b, 4);
}

void put_u64(std::string& buf, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    put_bytes(buf, b, 8);
}

void put_f64(std::string& buf, double v) { put_u64(buf, std::bit_cast<std::uint64_t>(v)); }

void put_string(std::string& buf, const std::string& s) {
    put_u32(buf, static_cast<std::uint32_t>(s.size()));
    put_bytes(buf, s.data(), s.size());
}

struct ByteReader {
    const std::string& buf;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw DataContractError("checkpoint truncated");
    }
    void raw(void* p, std::size_t n) {
        need(n);
        std::memcpy(p, buf.data() + pos, n);
        pos += n;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        }
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        }
        pos += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const std::uint32_t n = u32();
        need(n);
        std::string s(buf.data() + pos, n);
        pos += n;
        return s;
    }
};

}  // namespace

void ArchConfig::validate() const {
    if (latent_dim < 1) throw ConfigError("arch: latent_dim must be >= 1");
    if (widths.size() != 3) throw ConfigError("arch: exactly 3 encoder blocks required");
    for (int w : widths) {
        if (w < 1) throw ConfigError("arch: channel widths must be >= 1");
    }
    if (kernel < 1 || kernel % 2 == 0) {
        throw ConfigError("arch: kernel must be a positive odd size");
    }
    if (!(leaky_slope >= 0.0) || leaky_slope >= 1.0) {
        throw ConfigError("arch: leaky_slope must be in [0, 1)");
    }
}

void TrainConfig::validate() const {
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (max_epochs < 1) throw ConfigError("train: max_epochs must be >= 1");
    if (patience < 1) throw ConfigError("train: patience must be >= 1");
    if (min_delta < 0.0) throw ConfigError("train: min_delta must be >= 0");
}

const char* train_mode_name(TrainMode m) {
    switch (m) {
        case TrainMode::kMaskValue: return "mask_value";
        case TrainMode::kMaskOnly: return "mask_only";
        case TrainMode::kValueOnly: return "value_only";
        case TrainMode::kStandardAe: return "standard_ae";
    }
    return "?";
}

TrainMode train_mode_from_name(const std::string& name) {
    if (name == "mask_value") return TrainMode::kMaskValue;
    if (name == "mask_only") return TrainMode::kMaskOnly;
    if (name == "value_only") return TrainMode::kValueOnly;
    if (name == "standard_ae") return TrainMode::kStandardAe;
    throw ConfigError("unknown training mode '" + name +
                      "' (expected mask_value|mask_only|value_only|standard_ae)");
}

int input_channels_for(TrainMode m) { return m == TrainMode::kStandardAe ? 1 : 2; }

ModelParameters init_model(const ArchConfig& arch, const LossConfig& loss, TrainMode mode, int t,
                           int f, std::uint64_t seed) {
    arch.validate();
    if (t < 1 || f < 1) throw ConfigError("init_model: t and f must be >= 1");

    ModelParameters m;
    m.arch = arch;
    m.loss = loss;
    m.mode = mode;
    m.init_seed = seed;
    m.f = f;

    m.t_chain = {t};
    for (int i = 0; i < 3; ++i) {
        const int next = conv_out_dim(m.t_chain.back(), arch.kernel, 2, 1);
        if (next < 1) {
            throw ConfigError("init_model: bucket axis too short for 3 stride-2 blocks (T=" +
                              std::to_string(t) + ")");
        }
        m.t_chain.push_back(next);
    }
    if (conv_out_dim(f, arch.kernel, 1, 1) != f) {
        throw ConfigError("init_model: feature axis not preserved by kernel/padding");
    }

    const int in_channels = input_channels_for(mode);
    m.layers = build_layers(arch, in_channels, m.t_chain, f);

    Rng rng(seed);
    auto init_conv = [&](ConvLayer& l) {
        he_init(l.w.data.data(), l.w.data.size(), l.w.c * l.w.h * l.w.w, rng);
    };
    auto init_tconv = [&](ConvLayer& l) {
        // (in_c, out_c, kh, kw): fan_in per output cell is in_c * k * k.
        he_init(l.w.data.data(), l.w.data.size(), l.w.n * l.w.h * l.w.w, rng);
    };
    auto init_dense = [&](DenseLayer& l) {
        he_init(l.w.data.data(), l.w.data.size(), l.w.cols, rng);
    };
    init_conv(m.layers.enc1);
    init_conv(m.layers.enc2);
    init_conv(m.layers.enc3);
    init_dense(m.layers.enc_fc);
    init_dense(m.layers.dec_fc);
    init_tconv(m.layers.dec1);
    init_tconv(m.layers.dec2);
    init_tconv(m.layers.head_mask);
    init_tconv(m.layers.head_value);

    // Probe forward on a zero input: shape and finiteness self-check.
    const ForwardCache probe = forward(m, Tensor4(1, in_channels, t, f));
    if (probe.mask_logits.h != t || probe.mask_logits.w != f || probe.value_out.h != t ||
        probe.value_out.w != f) {
        throw NumericError("init_model: decoder heads do not reproduce the input shape");
    }
    if (!all_finite(probe.mask_logits.data.data(), probe.mask_logits.data.size()) ||
        !all_finite(probe.value_out.data.data(), probe.value_out.data.size())) {
        throw NumericError("init_model: non-finite probe output");
    }
    return m;
}

ForwardCache forward(const ModelParameters& m, const Tensor4& input) {
    if (input.c != input_channels_for(m.mode) || input.h != m.t() || input.w != m.f) {
        throw NumericError("forward: input " + input.shape_str() + " does not match model (c=" +
                           std::to_string(input_channels_for(m.mode)) +
                           ", t=" + std::to_string(m.t()) + ", f=" + std::to_string(m.f) + ")");
    }
    if (!all_finite(input.data.data(), input.data.size())) {
        throw NumericError("forward: non-finite input");
    }
    const ConvSpec spec = conv_spec();
    const double slope = m.arch.leaky_slope;
    const LayerSet& L = m.layers;

    auto leaky4 = [&](const Tensor4& x) {
        Tensor4 y(x.n, x.c, x.h, x.w);
        leaky_relu_forward(x.data.data(), y.data.data(), x.data.size(), slope);
        return y;
    };

    ForwardCache c;
    c.input = input;
    c.a1_pre = conv2d_forward(input, L.enc1.w, L.enc1.b, spec);
    c.a1 = leaky4(c.a1_pre);
    c.a2_pre = conv2d_forward(c.a1, L.enc2.w, L.enc2.b, spec);
    c.a2 = leaky4(c.a2_pre);
    c.a3_pre = conv2d_forward(c.a2, L.enc3.w, L.enc3.b, spec);
    c.a3 = leaky4(c.a3_pre);

    c.z = dense_forward(tensor_as_matrix(c.a3), L.enc_fc.w, L.enc_fc.b);  // linear latent
    c.d0_pre = dense_forward(c.z, L.dec_fc.w, L.dec_fc.b);

    const int c3 = m.arch.widths[2];
    Matrix d0_act(c.d0_pre.rows, c.d0_pre.cols);
    leaky_relu_forward(c.d0_pre.data.data(), d0_act.data.data(), c.d0_pre.data.size(), slope);
    c.d0 = matrix_as_tensor(d0_act, c3, m.t_chain[3], m.f);

    const int k = m.arch.kernel;
    c.d1_pre = tconv2d_forward(c.d0, L.dec1.w, L.dec1.b, spec,
                               out_pad_for(m.t_chain[3], m.t_chain[2], k), 0);
    c.d1 = leaky4(c.d1_pre);
    c.d2_pre = tconv2d_forward(c.d1, L.dec2.w, L.dec2.b, spec,
                               out_pad_for(m.t_chain[2], m.t_chain[1], k), 0);
    c.d2 = leaky4(c.d2_pre);

    const int head_op = out_pad_for(m.t_chain[1], m.t_chain[0], k);
    c.mask_logits = tconv2d_forward(c.d2, L.head_mask.w, L.head_mask.b, spec, head_op, 0);
    c.value_out = tconv2d_forward(c.d2, L.head_value.w, L.head_value.b, spec, head_op, 0);
    return c;
}

std::vector<double> encode(const ModelParameters& m, const Tensor4& single_input) {
    if (single_input.n != 1) throw NumericError("encode: expects a single sample");
    const ForwardCache c = forward(m, single_input);
    return c.z.data;
}

std::pair<Matrix, Matrix> decode(const ModelParameters& m, const std::vector<double>& z) {
    if (static_cast<int>(z.size()) != m.arch.latent_dim) {
        throw NumericError("decode: latent length " + std::to_string(z.size()) +
                           " != latent_dim " + std::to_string(m.arch.latent_dim));
    }
    const ConvSpec spec = conv_spec();
    const double slope = m.arch.leaky_slope;
    const LayerSet& L = m.layers;
    const int k = m.arch.kernel;

    Matrix zm(1, m.arch.latent_dim);
    zm.data = z;
    const Matrix d0_pre = dense_forward(zm, L.dec_fc.w, L.dec_fc.b);
    Matrix d0_act(d0_pre.rows, d0_pre.cols);
    leaky_relu_forward(d0_pre.data.data(), d0_act.data.data(), d0_pre.data.size(), slope);
    Tensor4 d0 = matrix_as_tensor(d0_act, m.arch.widths[2], m.t_chain[3], m.f);

    auto leaky4 = [&](const Tensor4& x) {
        Tensor4 y(x.n, x.c, x.h, x.w);
        leaky_relu_forward(x.data.data(), y.data.data(), x.data.size(), slope);
        return y;
    };
    const Tensor4 d1 = leaky4(tconv2d_forward(d0, L.dec1.w, L.dec1.b, spec,
                                              out_pad_for(m.t_chain[3], m.t_chain[2], k), 0));
    const Tensor4 d2 = leaky4(tconv2d_forward(d1, L.dec2.w, L.dec2.b, spec,
                                              out_pad_for(m.t_chain[2], m.t_chain[1], k), 0));
    const int head_op = out_pad_for(m.t_chain[1], m.t_chain[0], k);
    const Tensor4 logits = tconv2d_forward(d2, L.head_mask.w, L.head_mask.b, spec, head_op, 0);
    const Tensor4 value = tconv2d_forward(d2, L.head_value.w, L.head_value.b, spec, head_op, 0);
    return {sample_matrix(logits, 0, 0), sample_matrix(value, 0, 0)};
}

LayerSet zero_grads_like(const ModelParameters& m) {
    return build_layers(m.arch, input_channels_for(m.mode), m.t_chain, m.f);
}

LayerSet backward(const ModelParameters& m, const ForwardCache& cache,
                  const Tensor4& g_mask_logits, const Tensor4& g_value_out,
                  const Matrix& g_z_extra) {
    const ConvSpec spec = conv_spec();
    const double slope = m.arch.leaky_slope;
    const LayerSet& L = m.layers;
    LayerSet g = zero_grads_like(m);

    auto leaky_back4 = [&](const Tensor4& gy, const Tensor4& x_pre) {
        Tensor4 gx(gy.n, gy.c, gy.h, gy.w);
        leaky_relu_backward(gy.data.data(), x_pre.data.data(), gx.data.data(), gy.data.size(),
                            slope);
        return gx;
    };

    // Heads share d2; their input gradients add.
    ConvGrads gm = tconv2d_backward(g_mask_logits, cache.d2, L.head_mask.w, spec);
    ConvGrads gv = tconv2d_backward(g_value_out, cache.d2, L.head_value.w, spec);
    g.head_mask.w = std::move(gm.weight);
    g.head_mask.b = std::move(gm.bias);
    g.head_value.w = std::move(gv.weight);
    g.head_value.b = std::move(gv.bias);
    Tensor4 g_d2 = std::move(gm.input);
    for (std::size_t i = 0; i < g_d2.data.size(); ++i) g_d2.data[i] += gv.input.data[i];

    ConvGrads g2 = tconv2d_backward(leaky_back4(g_d2, cache.d2_pre), cache.d1, L.dec2.w, spec);
    g.dec2.w = std::move(g2.weight);
    g.dec2.b = std::move(g2.bias);

    ConvGrads g1 = tconv2d_backward(leaky_back4(g2.input, cache.d1_pre), cache.d0, L.dec1.w,
                                    spec);
    g.dec1.w = std::move(g1.weight);
    g.dec1.b = std::move(g1.bias);

    // Undo the reshape + activation between dec_fc and dec1.
    Matrix g_d0_pre(cache.d0_pre.rows, cache.d0_pre.cols);
    leaky_relu_backward(g1.input.data.data(), cache.d0_pre.data.data(), g_d0_pre.data.data(),
                        g_d0_pre.data.size(), slope);

    DenseGrads gdec = dense_backward(g_d0_pre, cache.z, L.dec_fc.w);
    g.dec_fc.w = std::move(gdec.weight);
    g.dec_fc.b = std::move(gdec.bias);

    Matrix g_z = std::move(gdec.input);
    if (g_z_extra.rows > 0) {
        if (!g_z.same_shape(g_z_extra)) {
            throw NumericError("backward: latent gradient shape mismatch");
        }
        for (std::size_t i = 0; i < g_z.data.size(); ++i) g_z.data[i] += g_z_extra.data[i];
    }

    DenseGrads genc = dense_backward(g_z, tensor_as_matrix(cache.a3), L.enc_fc.w);
    g.enc_fc.w = std::move(genc.weight);
    g.enc_fc.b = std::move(genc.bias);

    Tensor4 g_a3 = matrix_as_tensor(genc.input, cache.a3.c, cache.a3.h, cache.a3.w);
    ConvGrads ge3 = conv2d_backward(leaky_back4(g_a3, cache.a3_pre), cache.a2, L.enc3.w, spec);
    g.enc3.w = std::move(ge3.weight);
    g.enc3.b = std::move(ge3.bias);

    ConvGrads ge2 = conv2d_backward(leaky_back4(ge3.input, cache.a2_pre), cache.a1, L.enc2.w,
                                    spec);
    g.enc2.w = std::move(ge2.weight);
    g.enc2.b = std::move(ge2.bias);

    ConvGrads ge1 = conv2d_backward(leaky_back4(ge2.input, cache.a1_pre), cache.input, L.enc1.w,
                                    spec);
    g.enc1.w = std::move(ge1.weight);
    g.enc1.b = std::move(ge1.bias);
    return g;
}

void fill_input(const ModelParameters& m, const WindowSample& s, Tensor4& batch, int slot) {
    if (m.norm.mean.empty()) {
        throw DataContractError("fill_input: model has no normalization stats");
    }
    if (s.v.rows != m.t() || s.v.cols != m.f) {
        throw DataContractError("fill_input: window " + std::to_string(s.v.rows) + "x" +
                                std::to_string(s.v.cols) + " does not match model t=" +
                                std::to_string(m.t()) + ", f=" + std::to_string(m.f));
    }
    const Matrix v_norm = apply_norm(s.v, m.norm);
    double* dst = batch.sample(slot);
    const std::size_t plane = static_cast<std::size_t>(batch.h) * batch.w;
    if (m.mode == TrainMode::kStandardAe) {
        std::copy(v_norm.data.begin(), v_norm.data.end(), dst);
    } else {
        std::copy(s.m.data.begin(), s.m.data.end(), dst);
        std::copy(v_norm.data.begin(), v_norm.data.end(), dst + plane);
    }
}

namespace {

BatchStats batch_pass(const ModelParameters& m, const BatchData& batch, LayerSet* grads) {
    const int b_count = batch.input.n;
    if (b_count == 0) throw NumericError("batch_pass: empty batch");
    const double inv_b = 1.0 / static_cast<double>(b_count);
    const double lambda_value = effective_lambda_value(m);
    const double lambda_temp = m.loss.lambda_temp;
    const bool mask_loss = uses_mask_loss(m.mode);
    const bool need_value =
        m.mode != TrainMode::kMaskOnly;  // value loss contributes in all other modes

    const ForwardCache cache = forward(m, batch.input);
    if (!all_finite(cache.mask_logits.data.data(), cache.mask_logits.data.size()) ||
        !all_finite(cache.value_out.data.data(), cache.value_out.data.size())) {
        throw NumericError("batch_pass: non-finite head outputs");
    }

    BatchStats stats;
    Tensor4 g_mask(b_count, 1, batch.input.h, batch.input.w);
    Tensor4 g_value(b_count, 1, batch.input.h, batch.input.w);

    for (int b = 0; b < b_count; ++b) {
        if (mask_loss) {
            const Matrix logits = sample_matrix(cache.mask_logits, b, 0);
            LossResult r = bce_with_logits(logits, batch.mask_target[b], m.loss.pos_weight);
            stats.l_mask += r.loss * inv_b;
            if (grads) {
                double* dst = g_mask.sample(b);
                for (std::size_t i = 0; i < r.grad.data.size(); ++i) {
                    dst[i] = r.grad.data[i] * inv_b;
                }
            }
        }
        if (need_value) {
            const Matrix value = sample_matrix(cache.value_out, b, 0);
            LossResult r = m.mode == TrainMode::kStandardAe
                               ? full_mse(value, batch.value_target[b])
                               : masked_mse(value, batch.value_target[b], batch.mask_target[b]);
            stats.l_value += r.loss * inv_b;
            if (grads) {
                double* dst = g_value.sample(b);
                for (std::size_t i = 0; i < r.grad.data.size(); ++i) {
                    dst[i] = lambda_value * r.grad.data[i] * inv_b;
                }
            }
        }
    }

    Matrix g_z_extra;
    if (lambda_temp > 0.0 && !batch.pairs.empty()) {
        std::vector<std::pair<std::vector<double>, std::vector<double>>> latent_pairs;
        latent_pairs.reserve(batch.pairs.size());
        const int d = cache.z.cols;
        for (const auto& [i, j] : batch.pairs) {
            std::vector<double> za(cache.z.data.begin() + static_cast<std::ptrdiff_t>(i) * d,
                                   cache.z.data.begin() + static_cast<std::ptrdiff_t>(i + 1) * d);
            std::vector<double> zb(cache.z.data.begin() + static_cast<std::ptrdiff_t>(j) * d,
                                   cache.z.data.begin() + static_cast<std::ptrdiff_t>(j + 1) * d);
            latent_pairs.emplace_back(std::move(za), std::move(zb));
        }
        TemporalResult tr = temporal_consistency(latent_pairs);
        stats.l_temp = tr.loss;
        if (grads) {
            g_z_extra = Matrix(b_count, d);
            for (std::size_t p = 0; p < batch.pairs.size(); ++p) {
                const auto [i, j] = batch.pairs[p];
                for (int q = 0; q < d; ++q) {
                    g_z_extra.at(i, q) += lambda_temp * tr.grads[p].first[q];
                    g_z_extra.at(j, q) += lambda_temp * tr.grads[p].second[q];
                }
            }
        }
    }

    stats.total = stats.l_mask + lambda_value * stats.l_value + lambda_temp * stats.l_temp;
    if (!std::isfinite(stats.total)) throw NumericError("batch_pass: non-finite loss");

    if (grads) {
        *grads = backward(m, cache, g_mask, g_value, g_z_extra);
    }
    return stats;
}

}  // namespace

BatchStats batch_loss(const ModelParameters& m, const BatchData& batch) {
    return batch_pass(m, batch, nullptr);
}

BatchStats batch_loss_and_grads(const ModelParameters& m, const BatchData& batch,
                                LayerSet& grads) {
    return batch_pass(m, batch, &grads);
}

double resolve_pos_weight(const std::vector<WindowSample>& windows) {
    double active = 0.0;
    double total = 0.0;
    for (const WindowSample& s : windows) {
        total += static_cast<double>(s.m.data.size());
        for (double v : s.m.data) active += v;
    }
    if (active <= 0.0) return LossConfig::kPosWeightCap;
    const double ratio = (total - active) / active;
    return std::min(std::max(ratio, 0.01), LossConfig::kPosWeightCap);
}

std::vector<EpochStats> train(ModelParameters& m, const std::vector<WindowSample>& windows,
                              const TrainConfig& cfg) {
    cfg.validate();
    if (cfg.mode != m.mode) {
        throw ConfigError("train: config mode '" + std::string(train_mode_name(cfg.mode)) +
                          "' does not match model mode '" + train_mode_name(m.mode) + "'");
    }
    if (windows.empty()) throw DataContractError("train: empty training set");
    for (const WindowSample& s : windows) {
        if (s.malicious) {
            throw DataContractError("train: malicious window in training input (user '" +
                                    s.user + "'); split contract violated");
        }
    }
    if (m.norm.mean.empty()) {
        throw DataContractError("train: normalization stats must be set before training");
    }
    if (m.loss.pos_weight <= 0.0) {
        m.loss.pos_weight = resolve_pos_weight(windows);
    }

    // Chronological per-user order; adjacent pairs are built once, before any
    // shuffling, and reused every epoch.
    std::vector<int> order(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) order[static_cast<int>(i)] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (windows[a].user != windows[b].user) return windows[a].user < windows[b].user;
        return windows[a].window_start < windows[b].window_start;
    });

    struct Unit {
        int a;
        int b;  // -1 for singleton
    };
    std::vector<Unit> units;
    for (std::size_t i = 0; i < order.size();) {
        const WindowSample& cur = windows[order[i]];
        if (i + 1 < order.size()) {
            const WindowSample& nxt = windows[order[i + 1]];
            if (nxt.user == cur.user && nxt.window_start == cur.window_end()) {
                units.push_back({order[i], order[i + 1]});
                i += 2;
                continue;
            }
        }
        units.push_back({order[i], -1});
        ++i;
    }

    const int channels = input_channels_for(m.mode);
    const int t = m.t();
    const int f = m.f;

    std::map<std::string, AdamState> adam;
    m.layers.for_each([&](const char* name, std::vector<double>& p) {
        adam.emplace(name, AdamState(p.size()));
    });

    Rng rng(cfg.seed);
    std::vector<EpochStats> history;
    double best = std::numeric_limits<double>::infinity();
    int bad_epochs = 0;
    std::int64_t step = 0;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        rng.shuffle(units);

        double ep_loss = 0.0, ep_mask = 0.0, ep_value = 0.0, ep_temp = 0.0;
        std::int64_t ep_windows = 0;

        std::size_t u = 0;
        while (u < units.size()) {
            // Pack whole units until the batch reaches batch_size windows.
            std::vector<int> members;
            std::vector<std::pair<int, int>> pairs;
            while (u < units.size() && static_cast<int>(members.size()) < cfg.batch_size) {
                const Unit& unit = units[u++];
                if (unit.b >= 0) {
                    pairs.emplace_back(static_cast<int>(members.size()),
                                       static_cast<int>(members.size()) + 1);
                    members.push_back(unit.a);
                    members.push_back(unit.b);
                } else {
                    members.push_back(unit.a);
                }
            }

            BatchData batch;
            batch.input = Tensor4(static_cast<int>(members.size()), channels, t, f);
            batch.mask_target.reserve(members.size());
            batch.value_target.reserve(members.size());
            batch.pairs = std::move(pairs);
            for (std::size_t s = 0; s < members.size(); ++s) {
                const WindowSample& w = windows[members[s]];
                fill_input(m, w, batch.input, static_cast<int>(s));
                batch.mask_target.push_back(w.m);
                batch.value_target.push_back(apply_norm(w.v, m.norm));
            }

            LayerSet grads = zero_grads_like(m);
            const BatchStats stats = batch_loss_and_grads(m, batch, grads);
            ++step;
            m.layers.for_each([&](const char* name, std::vector<double>& p) {
                std::vector<double>* g = nullptr;
                grads.for_each([&](const char* gname, std::vector<double>& gv) {
                    if (std::strcmp(gname, name) == 0) g = &gv;
                });
                adam_step(p, *g, adam.at(name), cfg.adam, step, name);
            });

            const double bw = static_cast<double>(members.size());
            ep_loss += stats.total * bw;
            ep_mask += stats.l_mask * bw;
            ep_value += stats.l_value * bw;
            ep_temp += stats.l_temp * bw;
            ep_windows += static_cast<std::int64_t>(members.size());
        }

        EpochStats es;
        es.epoch = epoch;
        es.loss = ep_loss / static_cast<double>(ep_windows);
        es.l_mask = ep_mask / static_cast<double>(ep_windows);
        es.l_value = ep_value / static_cast<double>(ep_windows);
        es.l_temp = ep_temp / static_cast<double>(ep_windows);
        history.push_back(es);
        m.epochs_run = epoch;

        if (best - es.loss >= cfg.min_delta) {
            best = es.loss;
            bad_epochs = 0;
        } else {
            ++bad_epochs;
            if (bad_epochs >= cfg.patience) break;
        }
    }
    return history;
}

void save_checkpoint(const ModelParameters& m, const std::string& path) {
    std::string buf;
    put_bytes(buf, kMagic, sizeof(kMagic));
    put_u32(buf, kCheckpointVersion);

    put_u32(buf, static_cast<std::uint32_t>(m.mode));
    put_u32(buf, static_cast<std::uint32_t>(m.arch.latent_dim));
    put_u32(buf, static_cast<std::uint32_t>(m.arch.widths.size()));
    for (int w : m.arch.widths) put_u32(buf, static_cast<std::uint32_t>(w));
    put_u32(buf, static_cast<std::uint32_t>(m.arch.kernel));
    put_f64(buf, m.arch.leaky_slope);

    put_f64(buf, m.loss.pos_weight);
    put_f64(buf, m.loss.lambda_value);
    put_f64(buf, m.loss.lambda_temp);

    put_u64(buf, m.init_seed);
    put_u32(buf, static_cast<std::uint32_t>(m.epochs_run));
    put_u32(buf, static_cast<std::uint32_t>(m.f));
    put_u32(buf, static_cast<std::uint32_t>(m.t_chain.size()));
    for (int t : m.t_chain) put_u32(buf, static_cast<std::uint32_t>(t));

    put_u32(buf, static_cast<std::uint32_t>(m.norm.mean.size()));
    for (double v : m.norm.mean) put_f64(buf, v);
    for (double v : m.norm.stdev) put_f64(buf, v);
    put_string(buf, m.norm.source);

    std::uint32_t n_params = 0;
    m.layers.for_each([&](const char*, const std::vector<double>&) { ++n_params; });
    put_u32(buf, n_params);
    m.layers.for_each([&](const char* name, const std::vector<double>& data) {
        put_string(buf, name);
        put_u64(buf, data.size());
        for (double v : data) put_f64(buf, v);
    });

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write checkpoint '" + path + "'");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw ConfigError("short write on checkpoint '" + path + "'");
}

ModelParameters load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open checkpoint '" + path + "'");
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    ByteReader r{buf};

    char magic[8];
    r.raw(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw DataContractError("'" + path + "' is not a model checkpoint (bad magic)");
    }
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion) {
        throw DataContractError("unsupported checkpoint version " + std::to_string(version) +
                                " (expected " + std::to_string(kCheckpointVersion) + ")");
    }

    ModelParameters m;
    const std::uint32_t mode = r.u32();
    if (mode > 3) throw DataContractError("checkpoint: invalid mode tag");
    m.mode = static_cast<TrainMode>(mode);
    m.arch.latent_dim = static_cast<int>(r.u32());
    m.arch.widths.resize(r.u32());
    for (int& w : m.arch.widths) w = static_cast<int>(r.u32());
    m.arch.kernel = static_cast<int>(r.u32());
    m.arch.leaky_slope = r.f64();
    m.arch.validate();

    m.loss.pos_weight = r.f64();
    m.loss.lambda_value = r.f64();
    m.loss.lambda_temp = r.f64();

    m.init_seed = r.u64();
    m.epochs_run = static_cast<int>(r.u32());
    m.f = static_cast<int>(r.u32());
    m.t_chain.resize(r.u32());
    if (m.t_chain.size() != 4) throw DataContractError("checkpoint: bad encoder chain");
    for (int& t : m.t_chain) t = static_cast<int>(r.u32());

    m.norm.mean.resize(r.u32());
    m.norm.stdev.resize(m.norm.mean.size());
    for (double& v : m.norm.mean) v = r.f64();
    for (double& v : m.norm.stdev) v = r.f64();
    m.norm.source = r.str();

    m.layers = build_layers(m.arch, input_channels_for(m.mode), m.t_chain, m.f);
    const std::uint32_t n_params = r.u32();
    std::uint32_t seen = 0;
    m.layers.for_each([&](const char* name, std::vector<double>& data) {
        if (seen++ >= n_params) throw DataContractError("checkpoint: missing parameters");
        const std::string got = r.str();
        if (got != name) {
            throw DataContractError("checkpoint: expected parameter '" + std::string(name) +
                                    "', found '" + got + "'");
        }
        const std::uint64_t len = r.u64();
        if (len != data.size()) {
            throw DataContractError("checkpoint: parameter '" + std::string(name) +
                                    "' has wrong size");
        }
        for (double& v : data) v = r.f64();
    });
    if (seen != n_params) throw DataContractError("checkpoint: extra parameters");
    if (r.pos != buf.size()) throw DataContractError("checkpoint: trailing bytes");
    return m;
}

}  // namespace ueba
