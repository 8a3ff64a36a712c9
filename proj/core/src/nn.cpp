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

#include "ueba/nn.hpp"

#include "ueba/common.hpp"

#include <cmath>
#include <cstring>

namespace ueba {

namespace {

// C(m x n) += A(m x k) * B(n x k)^T
void gemm_nt_accumulate(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * k;
        double* crow = c + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const double* brow = b + static_cast<std::size_t>(j) * k;
            double acc = 0.0;
            for (int l = 0; l < k; ++l) acc += arow[l] * brow[l];
            crow[j] += acc;
        }
    }
}

// C(m x n) += A(k x m)^T * B(k x n)
void gemm_tn_accumulate(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int l = 0; l < k; ++l) {
        const double* arow = a + static_cast<std::size_t>(l) * m;
        const double* brow = b + static_cast<std::size_t>(l) * n;
        for (int i = 0; i < m; ++i) {
            const double av = arow[i];
            if (av == 0.0) continue;
            double* crow = c + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// Gathers conv input patches: cols is (c*kh*kw) x (out_h*out_w).
void im2col(const double* img, int c, int h, int w, int kh, int kw, const ConvSpec& s, int out_h,
            int out_w, double* cols) {
    const int ohw = out_h * out_w;
    for (int ic = 0; ic < c; ++ic) {
        for (int r = 0; r < kh; ++r) {
            for (int q = 0; q < kw; ++q) {
                double* dst = cols + (static_cast<std::size_t>(ic) * kh * kw + r * kw + q) * ohw;
                for (int oh = 0; oh < out_h; ++oh) {
                    const int ih = oh * s.stride_h - s.pad_h + r;
                    if (ih < 0 || ih >= h) {
                        std::memset(dst + static_cast<std::size_t>(oh) * out_w, 0,
                                    sizeof(double) * out_w);
                        continue;
                    }
                    const double* src = img + (static_cast<std::size_t>(ic) * h + ih) * w;
                    double* drow = dst + static_cast<std::size_t>(oh) * out_w;
                    for (int ow = 0; ow < out_w; ++ow) {
                        const int iw = ow * s.stride_w - s.pad_w + q;
                        drow[ow] = (iw >= 0 && iw < w) ? src[iw] : 0.0;
                    }
                }
            }
        }
    }
}

// Scatter-adds cols back into the image; exact adjoint of im2col.
void col2im_accumulate(const double* cols, int c, int h, int w, int kh, int kw, const ConvSpec& s,
                       int out_h, int out_w, double* img) {
    const int ohw = out_h * out_w;
    for (int ic = 0; ic < c; ++ic) {
        for (int r = 0; r < kh; ++r) {
            for (int q = 0; q < kw; ++q) {
                const double* src = cols + (static_cast<std::size_t>(ic) * kh * kw + r * kw + q) * ohw;
                for (int oh = 0; oh < out_h; ++oh) {
                    const int ih = oh * s.stride_h - s.pad_h + r;
                    if (ih < 0 || ih >= h) continue;
                    double* dst = img + (static_cast<std::size_t>(ic) * h + ih) * w;
                    const double* srow = src + static_cast<std::size_t>(oh) * out_w;
                    for (int ow = 0; ow < out_w; ++ow) {
                        const int iw = ow * s.stride_w - s.pad_w + q;
                        if (iw >= 0 && iw < w) dst[iw] += srow[ow];
                    }
                }
            }
        }
    }
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw NumericError(msg);
}

}  // namespace

int conv_out_dim(int in, int k, int stride, int pad) {
    return (in + 2 * pad - k) / stride + 1;
}

int tconv_out_dim(int in, int k, int stride, int pad, int out_pad) {
    return (in - 1) * stride - 2 * pad + k + out_pad;
}

Tensor4 conv2d_forward(const Tensor4& input, const Tensor4& weight,
                       const std::vector<double>& bias, const ConvSpec& s) {
    require(weight.c == input.c,
            "conv2d: input " + input.shape_str() + " incompatible with weight " +
                weight.shape_str());
    require(bias.size() == static_cast<std::size_t>(weight.n), "conv2d: bias size mismatch");
    const int out_c = weight.n, kh = weight.h, kw = weight.w;
    const int out_h = conv_out_dim(input.h, kh, s.stride_h, s.pad_h);
    const int out_w = conv_out_dim(input.w, kw, s.stride_w, s.pad_w);
    require(out_h > 0 && out_w > 0, "conv2d: output dims collapse for input " + input.shape_str());

    Tensor4 out(input.n, out_c, out_h, out_w);
    const int icrs = input.c * kh * kw;
    const int ohw = out_h * out_w;
    std::vector<double> cols(static_cast<std::size_t>(icrs) * ohw);
    for (int n = 0; n < input.n; ++n) {
        im2col(input.sample(n), input.c, input.h, input.w, kh, kw, s, out_h, out_w, cols.data());
        gemm(weight.data.data(), cols.data(), out.sample(n), out_c, icrs, ohw);
        double* o = out.sample(n);
        for (int oc = 0; oc < out_c; ++oc) {
            const double b = bias[oc];
            for (int i = 0; i < ohw; ++i) o[static_cast<std::size_t>(oc) * ohw + i] += b;
        }
    }
    return out;
}

ConvGrads conv2d_backward(const Tensor4& grad_out, const Tensor4& input, const Tensor4& weight,
                          const ConvSpec& s) {
    const int out_c = weight.n, kh = weight.h, kw = weight.w;
    const int out_h = conv_out_dim(input.h, kh, s.stride_h, s.pad_h);
    const int out_w = conv_out_dim(input.w, kw, s.stride_w, s.pad_w);
    require(grad_out.n == input.n && grad_out.c == out_c && grad_out.h == out_h &&
                grad_out.w == out_w,
            "conv2d_backward: grad " + grad_out.shape_str() + " inconsistent with input " +
                input.shape_str());

    ConvGrads g;
    g.input = Tensor4(input.n, input.c, input.h, input.w);
    g.weight = Tensor4(weight.n, weight.c, weight.h, weight.w);
    g.bias.assign(out_c, 0.0);

    const int icrs = input.c * kh * kw;
    const int ohw = out_h * out_w;
    std::vector<double> cols(static_cast<std::size_t>(icrs) * ohw);
    std::vector<double> gcols(static_cast<std::size_t>(icrs) * ohw);
    for (int n = 0; n < input.n; ++n) {
        const double* go = grad_out.sample(n);
        im2col(input.sample(n), input.c, input.h, input.w, kh, kw, s, out_h, out_w, cols.data());
        // dW += gOut * cols^T
        gemm_nt_accumulate(go, cols.data(), g.weight.data.data(), out_c, ohw, icrs);
        // dCols = W^T * gOut
        std::memset(gcols.data(), 0, gcols.size() * sizeof(double));
        gemm_tn_accumulate(weight.data.data(), go, gcols.data(), icrs, out_c, ohw);
        col2im_accumulate(gcols.data(), input.c, input.h, input.w, kh, kw, s, out_h, out_w,
                          g.input.sample(n));
        for (int oc = 0; oc < out_c; ++oc) {
            double acc = 0.0;
            const double* row = go + static_cast<std::size_t>(oc) * ohw;
            for (int i = 0; i < ohw; ++i) acc += row[i];
            g.bias[oc] += acc;
        }
    }
    return g;
}

Tensor4 tconv2d_forward(const Tensor4& input, const Tensor4& weight,
                        const std::vector<double>& bias, const ConvSpec& s, int out_pad_h,
                        int out_pad_w) {
    require(weight.n == input.c,
            "tconv2d: input " + input.shape_str() + " incompatible with weight " +
                weight.shape_str());
    require(out_pad_h < s.stride_h && out_pad_w < s.stride_w && out_pad_h >= 0 && out_pad_w >= 0,
            "tconv2d: output padding must be < stride");
    const int out_c = weight.c, kh = weight.h, kw = weight.w;
    require(bias.size() == static_cast<std::size_t>(out_c), "tconv2d: bias size mismatch");
    const int out_h = tconv_out_dim(input.h, kh, s.stride_h, s.pad_h, out_pad_h);
    const int out_w = tconv_out_dim(input.w, kw, s.stride_w, s.pad_w, out_pad_w);
    require(out_h > 0 && out_w > 0, "tconv2d: output dims collapse for input " + input.shape_str());

    Tensor4 out(input.n, out_c, out_h, out_w);
    const int ocrs = out_c * kh * kw;
    const int ihw = input.h * input.w;
    std::vector<double> cols(static_cast<std::size_t>(ocrs) * ihw);
    for (int n = 0; n < input.n; ++n) {
        // cols = W^T * x, then scatter into the (larger) output image.
        std::memset(cols.data(), 0, cols.size() * sizeof(double));
        gemm_tn_accumulate(weight.data.data(), input.sample(n), cols.data(), ocrs, input.c, ihw);
        col2im_accumulate(cols.data(), out_c, out_h, out_w, kh, kw, s, input.h, input.w,
                          out.sample(n));
        double* o = out.sample(n);
        const int out_hw = out_h * out_w;
        for (int oc = 0; oc < out_c; ++oc) {
            const double b = bias[oc];
            for (int i = 0; i < out_hw; ++i) o[static_cast<std::size_t>(oc) * out_hw + i] += b;
        }
    }
    return out;
}

ConvGrads tconv2d_backward(const Tensor4& grad_out, const Tensor4& input, const Tensor4& weight,
                           const ConvSpec& s) {
    require(weight.n == input.c && grad_out.c == weight.c && grad_out.n == input.n,
            "tconv2d_backward: grad " + grad_out.shape_str() + " inconsistent with input " +
                input.shape_str());
    const int oph = grad_out.h - tconv_out_dim(input.h, weight.h, s.stride_h, s.pad_h, 0);
    const int opw = grad_out.w - tconv_out_dim(input.w, weight.w, s.stride_w, s.pad_w, 0);
    require(oph >= 0 && oph < s.stride_h && opw >= 0 && opw < s.stride_w,
            "tconv2d_backward: grad " + grad_out.shape_str() + " not reachable from input " +
                input.shape_str());

    const int out_c = weight.c, kh = weight.h, kw = weight.w;
    ConvGrads g;
    g.input = Tensor4(input.n, input.c, input.h, input.w);
    g.weight = Tensor4(weight.n, weight.c, weight.h, weight.w);
    g.bias.assign(out_c, 0.0);

    const int ocrs = out_c * kh * kw;
    const int ihw = input.h * input.w;
    const int out_hw = grad_out.h * grad_out.w;
    std::vector<double> gcols(static_cast<std::size_t>(ocrs) * ihw);
    for (int n = 0; n < input.n; ++n) {
        const double* go = grad_out.sample(n);
        // Gather patches of the output gradient at each input position.
        im2col(go, out_c, grad_out.h, grad_out.w, kh, kw, s, input.h, input.w, gcols.data());
        // dx = W * gcols
        gemm_accumulate(weight.data.data(), gcols.data(), g.input.sample(n), input.c, ocrs, ihw);
        // dW += x * gcols^T
        gemm_nt_accumulate(input.sample(n), gcols.data(), g.weight.data.data(), input.c, ihw, ocrs);
        for (int oc = 0; oc < out_c; ++oc) {
            double acc = 0.0;
            const double* row = go + static_cast<std::size_t>(oc) * out_hw;
            for (int i = 0; i < out_hw; ++i) acc += row[i];
            g.bias[oc] += acc;
        }
    }
    return g;
}

Matrix dense_forward(const Matrix& input, const Matrix& weight, const std::vector<double>& bias) {
    require(input.cols == weight.cols, "dense: input cols " + std::to_string(input.cols) +
                                           " != weight cols " + std::to_string(weight.cols));
    require(bias.size() == static_cast<std::size_t>(weight.rows), "dense: bias size mismatch");
    Matrix out(input.rows, weight.rows);
    gemm_nt_accumulate(input.data.data(), weight.data.data(), out.data.data(), input.rows,
                       input.cols, weight.rows);
    for (int r = 0; r < out.rows; ++r) {
        for (int c = 0; c < out.cols; ++c) out.at(r, c) += bias[c];
    }
    return out;
}

DenseGrads dense_backward(const Matrix& grad_out, const Matrix& input, const Matrix& weight) {
    require(grad_out.rows == input.rows && grad_out.cols == weight.rows,
            "dense_backward: grad shape (" + std::to_string(grad_out.rows) + "," +
                std::to_string(grad_out.cols) + ") inconsistent with weight (" +
                std::to_string(weight.rows) + "," + std::to_string(weight.cols) + ")");
    DenseGrads g;
    g.input = Matrix(input.rows, input.cols);
    g.weight = Matrix(weight.rows, weight.cols);
    g.bias.assign(weight.rows, 0.0);
    // dX = gOut * W
    gemm_accumulate(grad_out.data.data(), weight.data.data(), g.input.data.data(), input.rows,
                    weight.rows, weight.cols);
    // dW = gOut^T * X
    gemm_tn_accumulate(grad_out.data.data(), input.data.data(), g.weight.data.data(), weight.rows,
                       input.rows, input.cols);
    for (int r = 0; r < grad_out.rows; ++r) {
        for (int c = 0; c < grad_out.cols; ++c) g.bias[c] += grad_out.at(r, c);
    }
    return g;
}

void leaky_relu_forward(const double* x, double* y, std::size_t len, double slope) {
    for (std::size_t i = 0; i < len; ++i) y[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void leaky_relu_backward(const double* grad_y, const double* x, double* grad_x, std::size_t len,
                         double slope) {
    for (std::size_t i = 0; i < len; ++i) grad_x[i] = grad_y[i] * (x[i] > 0.0 ? 1.0 : slope);
}

void he_init(double* data, std::size_t len, int fan_in, Rng& rng) {
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (std::size_t i = 0; i < len; ++i) data[i] = stddev * rng.normal();
}

}  // namespace ueba
