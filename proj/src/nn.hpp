// Copyright 2026 The lumasci Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace lumasci {

/// Dense float array with an optional gradient slot of identical length.
/// Activations use N,C,H,W order (N = 1); kernels use Cout,Cin,Kh,Kw.
template <class T>
struct BasicTensor {
  std::vector<int> shape;
  std::vector<T> values;
  std::vector<T> grad;

  BasicTensor() = default;
  explicit BasicTensor(std::vector<int> dims, T fill = T(0));

  std::size_t size() const noexcept { return values.size(); }
  int dim(std::size_t i) const { return shape.at(i); }
  bool has_grad() const noexcept { return grad.size() == values.size() && !values.empty(); }
  void zero_grad() { grad.assign(values.size(), T(0)); }
};

using Tensor = BasicTensor<float>;

std::size_t shape_size(const std::vector<int>& shape);

enum class Activation : std::uint8_t { None = 0, Relu = 1 };

/// 3x3 convolution, stride 1, zero "same" padding, followed by an activation.
template <class T>
struct BasicConvLayer {
  BasicTensor<T> kernel;  // Cout x Cin x 3 x 3
  BasicTensor<T> bias;    // Cout
  Activation activation = Activation::None;

  BasicConvLayer() = default;
  BasicConvLayer(int in_channels, int out_channels, Activation act);

  int in_channels() const { return kernel.dim(1); }
  int out_channels() const { return kernel.dim(0); }
};

using ConvLayer = BasicConvLayer<float>;

template <class T>
struct ConvGradients {
  BasicTensor<T> input;
  BasicTensor<T> kernel;
  BasicTensor<T> bias;
};

template <class T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& input, const BasicConvLayer<T>& layer);

/// Exact gradients of conv2d_forward. `output` is the cached forward result,
/// which supplies the ReLU mask.
template <class T>
ConvGradients<T> conv2d_backward(const BasicTensor<T>& grad_out,
                                 const BasicTensor<T>& input,
                                 const BasicTensor<T>& output,
                                 const BasicConvLayer<T>& layer);

/// Runs a layer stack; activations[0] is the input, activations[i + 1] the
/// output of layer i.
template <class T>
std::vector<BasicTensor<T>> forward_chain(std::span<const BasicConvLayer<T>> layers,
                                          const BasicTensor<T>& input);

/// Backpropagates through a stack, accumulating kernel and bias gradients
/// into each layer's grad slot. Returns the gradient w.r.t. the stack input.
template <class T>
BasicTensor<T> backward_chain(std::span<BasicConvLayer<T>> layers,
                              std::span<const BasicTensor<T>> activations,
                              const BasicTensor<T>& grad_out);

template <class To, class From>
BasicConvLayer<To> cast_layer(const BasicConvLayer<From>& layer);

/// He-normal kernel: N(0, sqrt(2 / (Cin * 9))); deterministic in `seed`.
Tensor he_init(const std::vector<int>& kernel_shape, std::uint64_t seed);

/// Fresh layer with He-normal kernel and zero bias.
ConvLayer make_conv_layer(int in_channels, int out_channels, Activation act,
                          std::uint64_t seed);

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First and second moments mirror the parameter list they were created for.
struct AdamState {
  AdamOptions options;
  std::vector<std::vector<float>> m;
  std::vector<std::vector<float>> v;
  std::int64_t t = 0;
};

AdamState make_adam_state(std::span<Tensor* const> params, AdamOptions options = {});

/// Bias-corrected ADAM update from each parameter's grad slot.
void adam_step(std::span<Tensor* const> params, AdamState& state, double lr);

// Gradient checking --------------------------------------------------------

struct GradCheckOptions {
  // Near the cube root of double epsilon: small enough to step over few
  // ReLU/clamp kinks, large enough that rounding stays below 1e-9.
  double step = 1e-5;
  // Denominator floor so that vanishing gradients compare absolutely.
  double floor = 1e-6;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t parameters_checked = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compares analytic gradients against central differences.
///
/// `loss` evaluates the objective at the current parameter values.
/// `analytic` must fill every tensor's grad slot. Each parameter value is
/// perturbed in place and restored.
GradCheckReport check_gradients(std::span<BasicTensor<double>* const> params,
                                const std::function<double()>& loss,
                                const std::function<void()>& analytic,
                                GradCheckOptions options = {});

/// Scalar loss on a network output; fills `grad_output` when non-null.
using OutputLoss =
    std::function<double(const BasicTensor<double>& output, BasicTensor<double>* grad_output)>;

/// Gradient check of every kernel and bias in a conv stack under `loss`.
/// Returns the maximum relative error; 0 for a parameterless network.
double grad_check(std::vector<BasicConvLayer<double>>& network, const OutputLoss& loss,
                  const BasicTensor<double>& input, GradCheckOptions options = {});

}  // namespace lumasci
