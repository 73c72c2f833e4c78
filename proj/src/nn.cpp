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

#include "nn.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "error.hpp"

namespace lumasci {

std::size_t shape_size(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw Error(ErrorCode::ShapeMismatch, "negative tensor extent");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

template <class T>
BasicTensor<T>::BasicTensor(std::vector<int> dims, T fill)
    : shape(std::move(dims)), values(shape_size(shape), fill) {}

template <class T>
BasicConvLayer<T>::BasicConvLayer(int in_channels, int out_channels, Activation act)
    : kernel({out_channels, in_channels, 3, 3}), bias({out_channels}), activation(act) {}

namespace {

std::string shape_string(const std::vector<int>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

template <class T>
void check_activation(const BasicTensor<T>& t, int channels, const char* what) {
  if (t.shape.size() != 4 || t.shape[0] != 1 || t.shape[1] != channels ||
      t.values.size() != shape_size(t.shape)) {
    throw Error(ErrorCode::ShapeMismatch,
                std::string(what) + ": expected 1x" + std::to_string(channels) +
                    "xHxW, got " + shape_string(t.shape));
  }
}

template <class T>
void check_layer(const BasicConvLayer<T>& layer) {
  const auto& k = layer.kernel.shape;
  if (k.size() != 4 || k[2] != 3 || k[3] != 3 || layer.bias.shape.size() != 1 ||
      layer.bias.shape[0] != k[0]) {
    throw Error(ErrorCode::ShapeMismatch, "conv layer must be Cout x Cin x 3 x 3 with Cout bias, got " +
                                              shape_string(k));
  }
}

// Row-range helpers for a tap offset d in {-1, 0, 1} over extent n.
inline int lo(int d) { return d < 0 ? -d : 0; }
inline int hi(int d, int n) { return d > 0 ? n - d : n; }

}  // namespace

template <class T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& input, const BasicConvLayer<T>& layer) {
  check_layer(layer);
  const int cin = layer.in_channels();
  const int cout = layer.out_channels();
  check_activation(input, cin, "conv2d_forward input");
  const int h = input.shape[2];
  const int w = input.shape[3];
  const std::size_t plane = static_cast<std::size_t>(h) * w;

  BasicTensor<T> out({1, cout, h, w});
  for (int co = 0; co < cout; ++co) {
    T* o = out.values.data() + co * plane;
    std::fill(o, o + plane, layer.bias.values[co]);
    for (int ci = 0; ci < cin; ++ci) {
      const T* in = input.values.data() + ci * plane;
      const T* k = layer.kernel.values.data() + (static_cast<std::size_t>(co) * cin + ci) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const T wgt = k[ky * 3 + kx];
          if (wgt == T(0)) continue;
          const int x0 = lo(dx);
          const int x1 = hi(dx, w);
          for (int y = lo(dy); y < hi(dy, h); ++y) {
            T* orow = o + static_cast<std::size_t>(y) * w;
            const T* irow = in + static_cast<std::size_t>(y + dy) * w + dx;
            for (int x = x0; x < x1; ++x) orow[x] += wgt * irow[x];
          }
        }
      }
    }
  }
  if (layer.activation == Activation::Relu) {
    for (T& v : out.values) v = v > T(0) ? v : T(0);
  }
  return out;
}

template <class T>
ConvGradients<T> conv2d_backward(const BasicTensor<T>& grad_out, const BasicTensor<T>& input,
                                 const BasicTensor<T>& output, const BasicConvLayer<T>& layer) {
  check_layer(layer);
  const int cin = layer.in_channels();
  const int cout = layer.out_channels();
  check_activation(input, cin, "conv2d_backward input");
  check_activation(grad_out, cout, "conv2d_backward grad_out");
  check_activation(output, cout, "conv2d_backward output");
  const int h = input.shape[2];
  const int w = input.shape[3];
  if (grad_out.shape[2] != h || grad_out.shape[3] != w || output.shape != grad_out.shape) {
    throw Error(ErrorCode::ShapeMismatch, "conv2d_backward: spatial extents differ");
  }
  const std::size_t plane = static_cast<std::size_t>(h) * w;

  // Gradient w.r.t. the pre-activation.
  std::vector<T> gpre(grad_out.values);
  if (layer.activation == Activation::Relu) {
    for (std::size_t i = 0; i < gpre.size(); ++i) {
      if (!(output.values[i] > T(0))) gpre[i] = T(0);
    }
  }

  ConvGradients<T> g;
  g.input = BasicTensor<T>(input.shape);
  g.kernel = BasicTensor<T>(layer.kernel.shape);
  g.bias = BasicTensor<T>(layer.bias.shape);

  for (int co = 0; co < cout; ++co) {
    const T* go = gpre.data() + co * plane;
    double bsum = 0.0;
    for (std::size_t i = 0; i < plane; ++i) bsum += static_cast<double>(go[i]);
    g.bias.values[co] = static_cast<T>(bsum);

    for (int ci = 0; ci < cin; ++ci) {
      const T* in = input.values.data() + ci * plane;
      T* gin = g.input.values.data() + ci * plane;
      const std::size_t kbase = (static_cast<std::size_t>(co) * cin + ci) * 9;
      const T* k = layer.kernel.values.data() + kbase;
      T* gk = g.kernel.values.data() + kbase;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const T wgt = k[ky * 3 + kx];
          const int x0 = lo(dx);
          const int x1 = hi(dx, w);
          double acc = 0.0;
          for (int y = lo(dy); y < hi(dy, h); ++y) {
            const T* grow = go + static_cast<std::size_t>(y) * w;
            const T* irow = in + static_cast<std::size_t>(y + dy) * w + dx;
            T* girow = gin + static_cast<std::size_t>(y + dy) * w + dx;
            double row_acc = 0.0;
            for (int x = x0; x < x1; ++x) {
              row_acc += static_cast<double>(grow[x]) * static_cast<double>(irow[x]);
              girow[x] += wgt * grow[x];
            }
            acc += row_acc;
          }
          gk[ky * 3 + kx] = static_cast<T>(acc);
        }
      }
    }
  }
  return g;
}

template <class T>
std::vector<BasicTensor<T>> forward_chain(std::span<const BasicConvLayer<T>> layers,
                                          const BasicTensor<T>& input) {
  std::vector<BasicTensor<T>> acts;
  acts.reserve(layers.size() + 1);
  acts.push_back(input);
  for (const auto& layer : layers) acts.push_back(conv2d_forward(acts.back(), layer));
  return acts;
}

template <class T>
BasicTensor<T> backward_chain(std::span<BasicConvLayer<T>> layers,
                              std::span<const BasicTensor<T>> activations,
                              const BasicTensor<T>& grad_out) {
  if (activations.size() != layers.size() + 1) {
    throw Error(ErrorCode::ShapeMismatch, "backward_chain: activation cache does not match layers");
  }
  BasicTensor<T> g = grad_out;
  for (std::size_t i = layers.size(); i-- > 0;) {
    auto& layer = layers[i];
    ConvGradients<T> lg = conv2d_backward(g, activations[i], activations[i + 1], layer);
    if (!layer.kernel.has_grad()) layer.kernel.zero_grad();
    if (!layer.bias.has_grad()) layer.bias.zero_grad();
    for (std::size_t j = 0; j < lg.kernel.values.size(); ++j) layer.kernel.grad[j] += lg.kernel.values[j];
    for (std::size_t j = 0; j < lg.bias.values.size(); ++j) layer.bias.grad[j] += lg.bias.values[j];
    g = std::move(lg.input);
  }
  return g;
}

template <class To, class From>
BasicConvLayer<To> cast_layer(const BasicConvLayer<From>& layer) {
  BasicConvLayer<To> out;
  out.kernel.shape = layer.kernel.shape;
  out.kernel.values.assign(layer.kernel.values.begin(), layer.kernel.values.end());
  out.bias.shape = layer.bias.shape;
  out.bias.values.assign(layer.bias.values.begin(), layer.bias.values.end());
  out.activation = layer.activation;
  return out;
}

Tensor he_init(const std::vector<int>& kernel_shape, std::uint64_t seed) {
  if (kernel_shape.size() != 4 || kernel_shape[1] <= 0) {
    throw Error(ErrorCode::ShapeMismatch, "he_init expects a Cout x Cin x Kh x Kw shape");
  }
  Tensor t(kernel_shape);
  const double fan_in = static_cast<double>(kernel_shape[1]) * kernel_shape[2] * kernel_shape[3];
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
  for (float& v : t.values) v = static_cast<float>(dist(rng));
  return t;
}

ConvLayer make_conv_layer(int in_channels, int out_channels, Activation act, std::uint64_t seed) {
  ConvLayer layer(in_channels, out_channels, act);
  layer.kernel = he_init({out_channels, in_channels, 3, 3}, seed);
  return layer;
}

AdamState make_adam_state(std::span<Tensor* const> params, AdamOptions options) {
  AdamState state;
  state.options = options;
  for (const Tensor* p : params) {
    state.m.emplace_back(p->size(), 0.0f);
    state.v.emplace_back(p->size(), 0.0f);
  }
  return state;
}

void adam_step(std::span<Tensor* const> params, AdamState& state, double lr) {
  if (!(lr > 0.0)) throw Error(ErrorCode::InvalidArgument, "adam_step: lr must be positive");
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw Error(ErrorCode::ShapeMismatch, "adam_step: optimizer state does not match parameter list");
  }
  for (std::size_t p = 0; p < params.size(); ++p) {
    const Tensor& t = *params[p];
    if (state.m[p].size() != t.size() || state.v[p].size() != t.size() ||
        (!t.grad.empty() && t.grad.size() != t.size())) {
      throw Error(ErrorCode::ShapeMismatch,
                  "adam_step: parameter " + std::to_string(p) + " shape mismatch");
    }
  }
  state.t += 1;
  const AdamOptions& o = state.options;
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(state.t));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& t = *params[p];
    if (t.grad.empty()) continue;  // no gradient recorded: moments decay only
    auto& m = state.m[p];
    auto& v = state.v[p];
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double g = t.grad[i];
      const double mi = o.beta1 * m[i] + (1.0 - o.beta1) * g;
      const double vi = o.beta2 * v[i] + (1.0 - o.beta2) * g * g;
      m[i] = static_cast<float>(mi);
      v[i] = static_cast<float>(vi);
      const double update = lr * (mi / c1) / (std::sqrt(vi / c2) + o.eps);
      t.values[i] = static_cast<float>(t.values[i] - update);
    }
  }
}

GradCheckReport check_gradients(std::span<BasicTensor<double>* const> params,
                                const std::function<double()>& loss,
                                const std::function<void()>& analytic,
                                GradCheckOptions options) {
  for (auto* p : params) p->zero_grad();
  analytic();
  std::vector<std::vector<double>> grads;
  for (auto* p : params) {
    if (p->grad.size() != p->values.size()) {
      throw Error(ErrorCode::ShapeMismatch, "check_gradients: analytic pass left a grad slot unfilled");
    }
    grads.push_back(p->grad);
  }

  GradCheckReport report;
  std::size_t flat = 0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& values = params[p]->values;
    for (std::size_t i = 0; i < values.size(); ++i, ++flat) {
      const double orig = values[i];
      values[i] = orig + options.step;
      const double up = loss();
      values[i] = orig - options.step;
      const double down = loss();
      values[i] = orig;
      const double numeric = (up - down) / (2.0 * options.step);
      const double a = grads[p][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), options.floor});
      const double rel = std::abs(a - numeric) / denom;
      ++report.parameters_checked;
      if (rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst_index = flat;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

double grad_check(std::vector<BasicConvLayer<double>>& network, const OutputLoss& loss,
                  const BasicTensor<double>& input, GradCheckOptions options) {
  std::vector<BasicTensor<double>*> params;
  for (auto& layer : network) {
    params.push_back(&layer.kernel);
    params.push_back(&layer.bias);
  }
  if (params.empty()) return 0.0;

  std::span<const BasicConvLayer<double>> layers(network);
  auto eval = [&] {
    auto acts = forward_chain(layers, input);
    return loss(acts.back(), nullptr);
  };
  auto analytic = [&] {
    auto acts = forward_chain(layers, input);
    BasicTensor<double> g(acts.back().shape);
    loss(acts.back(), &g);
    backward_chain(std::span<BasicConvLayer<double>>(network),
                   std::span<const BasicTensor<double>>(acts), g);
  };
  return check_gradients(params, eval, analytic, options).max_relative_error;
}

#define LUMASCI_INSTANTIATE(T)                                                              \
  template struct BasicTensor<T>;                                                           \
  template struct BasicConvLayer<T>;                                                        \
  template BasicTensor<T> conv2d_forward(const BasicTensor<T>&, const BasicConvLayer<T>&);  \
  template ConvGradients<T> conv2d_backward(const BasicTensor<T>&, const BasicTensor<T>&,   \
                                            const BasicTensor<T>&, const BasicConvLayer<T>&); \
  template std::vector<BasicTensor<T>> forward_chain(std::span<const BasicConvLayer<T>>,    \
                                                     const BasicTensor<T>&);                \
  template BasicTensor<T> backward_chain(std::span<BasicConvLayer<T>>,                      \
                                         std::span<const BasicTensor<T>>, const BasicTensor<T>&);

LUMASCI_INSTANTIATE(float)
LUMASCI_INSTANTIATE(double)
#undef LUMASCI_INSTANTIATE

template BasicConvLayer<double> cast_layer<double, float>(const BasicConvLayer<float>&);
template BasicConvLayer<float> cast_layer<float, double>(const BasicConvLayer<double>&);
template BasicConvLayer<float> cast_layer<float, float>(const BasicConvLayer<float>&);
template BasicConvLayer<double> cast_layer<double, double>(const BasicConvLayer<double>&);

}  // namespace lumasci
