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

#include "ueba/rng.hpp"
#include "ueba/tensor.hpp"

#include <vector>

namespace ueba {

// Layer primitives with hand-derived backward passes. Forward semantics are
// the usual cross-correlation / affine contracts; every backward pass is
// checked against central finite differences in the test suite.

struct ConvSpec {
    int stride_h = 1;
    int stride_w = 1;
    int pad_h = 0;
    int pad_w = 0;
};

struct ConvGrads {
    Tensor4 input;
    Tensor4 weight;
    std::vector<double> bias;
};

/// Output spatial dims: floor((in + 2*pad - k)/stride) + 1.
int conv_out_dim(int in, int k, int stride, int pad);

/// Transposed-conv output dim: (in-1)*stride - 2*pad + k + out_pad.
int tconv_out_dim(int in, int k, int stride, int pad, int out_pad);

/// weight layout (out_c, in_c, kh, kw).
Tensor4 conv2d_forward(const Tensor4& input, const Tensor4& weight,
                       const std::vector<double>& bias, const ConvSpec& spec);

ConvGrads conv2d_backward(const Tensor4& grad_out, const Tensor4& input, const Tensor4& weight,
                          const ConvSpec& spec);

/// Fractionally-strided (transposed) convolution; weight layout
/// (in_c, out_c, kh, kw). out_pad disambiguates the output size when the
/// paired convolution's stride divided its input unevenly.
Tensor4 tconv2d_forward(const Tensor4& input, const Tensor4& weight,
                        const std::vector<double>& bias, const ConvSpec& spec, int out_pad_h,
                        int out_pad_w);

ConvGrads tconv2d_backward(const Tensor4& grad_out, const Tensor4& input, const Tensor4& weight,
                           const ConvSpec& spec);

struct DenseGrads {
    Matrix input;
    Matrix weight;
    std::vector<double> bias;
};

/// input (batch x in), weight (out x in) -> (batch x out).
Matrix dense_forward(const Matrix& input, const Matrix& weight, const std::vector<double>& bias);

DenseGrads dense_backward(const Matrix& grad_out, const Matrix& input, const Matrix& weight);

/// y = x for x > 0, slope*x otherwise.
void leaky_relu_forward(const double* x, double* y, std::size_t len, double slope);

/// grad_x = grad_y * (x > 0 ? 1 : slope); x is the pre-activation input.
void leaky_relu_backward(const double* grad_y, const double* x, double* grad_x, std::size_t len,
                         double slope);

/// He initialization: N(0, 2/fan_in) per entry.
void he_init(double* data, std::size_t len, int fan_in, Rng& rng);

}  // namespace ueba
