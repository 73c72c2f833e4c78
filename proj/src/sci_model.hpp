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

#include <cstdint>
#include <filesystem>
#include <vector>

#include "image.hpp"
#include "nn.hpp"

namespace lumasci {

/// Parameters of the illumination estimator and the self-calibration
/// network. Both map in_channels -> hidden -> hidden -> in_channels.
template <class T>
struct BasicSciWeights {
  std::vector<BasicConvLayer<T>> illumination;  // shared by every cascade stage
  std::vector<BasicConvLayer<T>> calibration;
  int in_channels = 1;
  int hidden_channels = 16;
  float epsilon = 1e-3f;  // illumination floor
};

using SciWeights = BasicSciWeights<float>;

struct SciArchitecture {
  int in_channels = 1;
  int hidden_channels = 16;
  float epsilon = 1e-3f;
};

/// He-initialised weights; the two networks draw from independent streams
/// derived from `seed`.
SciWeights make_sci_weights(const SciArchitecture& arch, std::uint64_t seed);

/// All kernels and biases zero (u = 0, s = 0).
SciWeights make_zero_weights(const SciArchitecture& arch);

template <class To, class From>
BasicSciWeights<To> cast_weights(const BasicSciWeights<From>& w);

/// Throws ShapeMismatch when a network does not chain in -> ... -> in.
template <class T>
void validate_weights(const BasicSciWeights<T>& w);

/// Every kernel then bias, illumination network first.
std::vector<Tensor*> parameters(SciWeights& w);
std::vector<BasicTensor<double>*> parameters(BasicSciWeights<double>& w);

/// FNV-1a over the raw bytes of a layer stack's parameters.
template <class T>
std::uint64_t parameter_digest(const std::vector<BasicConvLayer<T>>& layers);

template <class T>
struct BasicStageTrace {
  BasicTensor<T> v;  // stage input
  BasicTensor<T> u;  // illumination residual
  BasicTensor<T> x;  // illumination, in [epsilon, 1]
  BasicTensor<T> z;  // enhanced plane, in [0, 1]
  BasicTensor<T> s;  // calibration residual
  std::vector<BasicTensor<T>> illumination_acts;
  std::vector<BasicTensor<T>> calibration_acts;
  std::uint64_t illumination_digest = 0;  // parameter bytes this stage read
};

template <class T>
struct BasicCascadeTrace {
  BasicTensor<T> y;  // original observation
  float epsilon = 1e-3f;
  std::vector<BasicStageTrace<T>> stages;
};

using CascadeTrace = BasicCascadeTrace<float>;

/// Runs `stages` weight-shared stages starting from v0 = y:
///   u = H(v), x = clamp(v + u, eps, 1), z = clamp(y / x, 0, 1),
///   s = K(z), v_next = clamp(y + s, 0, 1).
/// Throws BadRange when y leaves [0, 1].
template <class T>
BasicCascadeTrace<T> cascade_forward(const BasicTensor<T>& y, const BasicSciWeights<T>& w,
                                     int stages);

CascadeTrace cascade_forward(const PlanarImage& y, const SciWeights& w, int stages);

/// Single-block inference: clamp(y / clamp(y + H(y), eps, 1), 0, 1). The
/// calibration network is not evaluated. Output keeps y's color space tag.
PlanarImage infer(const PlanarImage& y, const SciWeights& w);

struct LossConfig {
  double alpha = 1.0;   // fidelity weight
  double beta = 2.0;    // smoothness weight
  double sigma = 0.1;   // edge scale of the smoothness weights
};

struct LossBreakdown {
  double total = 0.0;
  std::vector<double> fidelity;    // per stage, unweighted
  std::vector<double> smoothness;  // per stage, unweighted
};

/// Unsupervised loss sum_t alpha * F_t + beta * S_t with
///   F_t = mean (x_t - v_t)^2,
///   S_t = mean sum_{right,down} w |x_t,i - x_t,i+d|,
///   w = exp(-(y_i - y_i+d)^2 / (2 sigma^2)).
template <class T>
LossBreakdown sci_loss_value(const BasicCascadeTrace<T>& trace, const LossConfig& cfg);

/// Same loss; also overwrites every parameter's grad slot in `w` with the
/// gradient through the full cascade. `w` must be the weights that produced
/// `trace`. Clamps pass gradients inside their range and block them outside.
template <class T>
double sci_loss(const BasicCascadeTrace<T>& trace, BasicSciWeights<T>& w, const LossConfig& cfg);

inline constexpr char kCheckpointMagic[4] = {'S', 'C', 'I', 'W'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

void save_weights(const SciWeights& w, const std::filesystem::path& path);
SciWeights load_weights(const std::filesystem::path& path);

/// PlanarImage planes <-> 1 x C x H x W tensor (same memory order).
Tensor to_tensor(const PlanarImage& img);
PlanarImage to_image(const Tensor& t, ColorSpace space);

}  // namespace lumasci
