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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "error.hpp"
#include "sci_model.hpp"
#include "test_support.hpp"

namespace lumasci {
namespace {

using DTensor = BasicTensor<double>;
using DWeights = BasicSciWeights<double>;
using testing::TempDir;

PlanarImage gray(int h, int w, float v) { return PlanarImage(h, w, 1, ColorSpace::Gray, v); }

SciWeights zero_weights() { return make_zero_weights({}); }

// Small random biases so ReLU units are not all at zero with zero input.
SciWeights random_weights(std::uint64_t seed, int in_channels = 1, int hidden = 4) {
  SciWeights w = make_sci_weights({in_channels, hidden, 1e-3f}, seed);
  std::mt19937_64 rng(seed * 31 + 7);
  std::uniform_real_distribution<float> u(-0.05f, 0.05f);
  for (Tensor* p : parameters(w)) {
    if (p->shape.size() == 1)
      for (float& b : p->values) b = u(rng);
  }
  return w;
}

std::vector<char> read_bytes(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& p, const std::vector<char>& bytes) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

TEST(Architecture, DefaultStacks) {
  SciWeights w = make_sci_weights({}, 1);
  ASSERT_EQ(w.illumination.size(), 3u);
  ASSERT_EQ(w.calibration.size(), 3u);
  EXPECT_EQ(w.illumination[0].kernel.shape, (std::vector<int>{16, 1, 3, 3}));
  EXPECT_EQ(w.illumination[1].kernel.shape, (std::vector<int>{16, 16, 3, 3}));
  EXPECT_EQ(w.illumination[2].kernel.shape, (std::vector<int>{1, 16, 3, 3}));
  EXPECT_EQ(w.illumination[0].activation, Activation::Relu);
  EXPECT_EQ(w.illumination[1].activation, Activation::Relu);
  EXPECT_EQ(w.illumination[2].activation, Activation::None);
  EXPECT_EQ(w.epsilon, 1e-3f);
  // Independent streams for the two networks.
  EXPECT_NE(w.illumination[0].kernel.values, w.calibration[0].kernel.values);
  EXPECT_EQ(make_sci_weights({}, 1).illumination[1].kernel.values, w.illumination[1].kernel.values);
}

TEST(Cascade, ZeroWeightsConstantInput) {
  CascadeTrace tr = cascade_forward(gray(5, 6, 0.25f), zero_weights(), 3);
  ASSERT_EQ(tr.stages.size(), 3u);
  for (const auto& st : tr.stages) {
    for (float v : st.u.values) EXPECT_EQ(v, 0.0f);
    for (float v : st.x.values) EXPECT_EQ(v, 0.25f);
    for (float v : st.z.values) EXPECT_EQ(v, 1.0f);
  }
}

TEST(Cascade, ZeroWeightsBlackInput) {
  CascadeTrace tr = cascade_forward(gray(4, 4, 0.0f), zero_weights(), 3);
  for (const auto& st : tr.stages) {
    for (float v : st.x.values) EXPECT_EQ(v, 1e-3f);
    for (float v : st.z.values) EXPECT_EQ(v, 0.0f);
  }
}

TEST(Cascade, FirstStageInputIsObservation) {
  PlanarImage y = testing::random_gray(6, 7, 3);
  CascadeTrace tr = cascade_forward(y, random_weights(3), 3);
  EXPECT_EQ(tr.stages[0].v.values, y.data);
  EXPECT_EQ(tr.y.values, y.data);
}

TEST(Cascade, RangesHoldForRandomWeights) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PlanarImage y = testing::random_gray(12, 10, seed + 100);
    y.data[0] = 0.0f;
    y.data[1] = 1.0f;
    SciWeights w = random_weights(seed);
    // Exaggerate the networks to push against every clamp.
    for (Tensor* p : parameters(w))
      for (float& v : p->values) v *= 4.0f;
    CascadeTrace tr = cascade_forward(y, w, 3);
    for (const auto& st : tr.stages) {
      for (float v : st.v.values) ASSERT_TRUE(v >= 0.0f && v <= 1.0f);
      for (float v : st.x.values) ASSERT_TRUE(v >= w.epsilon && v <= 1.0f);
      for (std::size_t i = 0; i < st.z.size(); ++i) {
        ASSERT_TRUE(st.z.values[i] >= 0.0f && st.z.values[i] <= 1.0f);
        ASSERT_GE(st.z.values[i], y.data[i] - 1e-6f);
      }
      for (float v : st.s.values) ASSERT_TRUE(std::isfinite(v));
    }
  }
}

TEST(Cascade, BadRange) {
  PlanarImage y = gray(3, 3, 0.5f);
  y.data[4] = 1.01f;
  try {
    cascade_forward(y, zero_weights(), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadRange);
  }
  y.data[4] = std::nanf("");
  EXPECT_THROW(infer(y, zero_weights()), Error);
  y.data[4] = -0.01f;
  EXPECT_THROW(infer(y, zero_weights()), Error);
}

TEST(Cascade, ChannelMismatch) {
  EXPECT_THROW(cascade_forward(testing::random_rgb(4, 4, 1), zero_weights(), 2), Error);
}

TEST(Cascade, StagesShareIlluminationBytes) {
  SciWeights w = random_weights(5);
  CascadeTrace tr = cascade_forward(testing::random_gray(6, 6, 5), w, 4);
  const std::uint64_t digest = parameter_digest(w.illumination);
  for (const auto& st : tr.stages) EXPECT_EQ(st.illumination_digest, digest);
  EXPECT_NE(digest, parameter_digest(w.calibration));
}

TEST(Cascade, RgbMode) {
  SciWeights w = random_weights(2, 3);
  PlanarImage rgb = testing::random_rgb(5, 5, 2);
  CascadeTrace tr = cascade_forward(rgb, w, 2);
  EXPECT_EQ(tr.stages[1].z.shape, (std::vector<int>{1, 3, 5, 5}));
  EXPECT_EQ(infer(rgb, w).data, tr.stages[0].z.values);
}

TEST(Infer, EqualsStageZero) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PlanarImage y = testing::random_gray(9 + seed % 3, 11, seed);
    SciWeights w = random_weights(seed + 50, 1, 8);
    const PlanarImage out = infer(y, w);
    for (int stages : {1, 3}) {
      CascadeTrace tr = cascade_forward(y, w, stages);
      ASSERT_EQ(out.data.size(), tr.stages[0].z.values.size());
      EXPECT_EQ(std::memcmp(out.data.data(), tr.stages[0].z.values.data(), out.data.size() * sizeof(float)), 0);
    }
  }
}

TEST(Infer, ZeroWeights) {
  for (float v : infer(gray(3, 4, 0.25f), zero_weights()).data) EXPECT_EQ(v, 1.0f);
  for (float v : infer(gray(3, 4, 1.0f), zero_weights()).data) EXPECT_EQ(v, 1.0f);
  EXPECT_EQ(infer(gray(3, 4, 1.0f), zero_weights()).space, ColorSpace::Gray);
}

TEST(Infer, NeverDarkens) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PlanarImage y = testing::random_gray(10, 10, seed, 0.0f, 0.3f);
    PlanarImage out = infer(y, random_weights(seed));
    for (std::size_t i = 0; i < y.data.size(); ++i) ASSERT_GE(out.data[i], y.data[i] - 1e-6f);
  }
}

// Independent evaluation of the loss from a trace.
double reference_loss(const CascadeTrace& tr, const LossConfig& cfg) {
  const int h = tr.y.dim(2), w = tr.y.dim(3);
  const std::size_t n = static_cast<std::size_t>(h) * w;
  double total = 0;
  for (const auto& st : tr.stages) {
    double f = 0, s = 0;
    for (std::size_t i = 0; i < n; ++i) f += std::pow(double(st.x.values[i]) - st.v.values[i], 2);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * w + c;
        auto term = [&](std::size_t j) {
          const double dy = double(tr.y.values[i]) - tr.y.values[j];
          return std::exp(-dy * dy / (2 * cfg.sigma * cfg.sigma)) * std::abs(double(st.x.values[i]) - st.x.values[j]);
        };
        if (c + 1 < w) s += term(i + 1);
        if (r + 1 < h) s += term(i + w);
      }
    total += cfg.alpha * f / n + cfg.beta * s / n;
  }
  return total;
}

TEST(Loss, MatchesReferenceEvaluation) {
  LossConfig cfg{0.7, 1.9, 0.15};
  PlanarImage y = testing::random_gray(7, 9, 40, 0.05f, 0.5f);
  SciWeights w = random_weights(40);
  CascadeTrace tr = cascade_forward(y, w, 3);
  const LossBreakdown b = sci_loss_value(tr, cfg);
  EXPECT_NEAR(b.total, reference_loss(tr, cfg), 1e-9);
  ASSERT_EQ(b.fidelity.size(), 3u);
  ASSERT_EQ(b.smoothness.size(), 3u);
  EXPECT_DOUBLE_EQ(sci_loss(tr, w, cfg), b.total);
}

TEST(Loss, ZeroWeightsHaveNoFidelityTerm) {
  CascadeTrace tr = cascade_forward(testing::random_gray(8, 8, 2, 0.1f, 0.9f), zero_weights(), 3);
  const LossBreakdown b = sci_loss_value(tr, LossConfig{});
  for (double f : b.fidelity) EXPECT_EQ(f, 0.0);
}

TEST(Loss, ConstantPlaneHasNoSmoothnessTerm) {
  CascadeTrace tr = cascade_forward(gray(8, 8, 0.4f), zero_weights(), 3);
  for (double s : sci_loss_value(tr, LossConfig{}).smoothness) EXPECT_EQ(s, 0.0);
  // Bias-only networks still give a constant illumination map.
  SciWeights w = zero_weights();
  w.illumination.back().bias.values[0] = 0.1f;
  CascadeTrace tr2 = cascade_forward(gray(8, 8, 0.4f), w, 3);
  const LossBreakdown b = sci_loss_value(tr2, LossConfig{});
  for (double s : b.smoothness) EXPECT_EQ(s, 0.0);
  EXPECT_GT(b.fidelity[0], 0.0);
}

TEST(Loss, FillsEveryGradient) {
  SciWeights w = random_weights(9);
  CascadeTrace tr = cascade_forward(testing::random_gray(6, 6, 9, 0.1f, 0.5f), w, 3);
  sci_loss(tr, w, LossConfig{});
  for (Tensor* p : parameters(w)) {
    ASSERT_TRUE(p->has_grad());
    for (float g : p->grad) ASSERT_TRUE(std::isfinite(g));
  }
}

// Composed cascade and loss against central differences in double.
TEST(Loss, FiniteDifferenceOracle) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    DWeights w = cast_weights<double>(random_weights(seed + 60));
    DTensor y = testing::random_tensor({1, 1, 8, 8}, seed + 61, 0.1, 0.6);
    const LossConfig cfg;
    auto params = parameters(w);
    GradCheckReport r = check_gradients(
        params, [&] { return sci_loss_value(cascade_forward(y, w, 3), cfg).total; },
        [&] { sci_loss(cascade_forward(y, w, 3), w, cfg); });
    EXPECT_LT(r.max_relative_error, 1e-4) << "seed " << seed << " analytic " << r.worst_analytic << " numeric "
                                          << r.worst_numeric;
    EXPECT_GT(r.parameters_checked, 100u);
  }
}

TEST(Checkpoint, RoundTripIsBitExact) {
  TempDir tmp;
  SciWeights w = random_weights(11, 1, 16);
  w.epsilon = 2e-3f;
  save_weights(w, tmp / "w.sciw");
  SciWeights back = load_weights(tmp / "w.sciw");
  EXPECT_EQ(back.in_channels, w.in_channels);
  EXPECT_EQ(back.hidden_channels, w.hidden_channels);
  EXPECT_EQ(back.epsilon, w.epsilon);
  auto a = parameters(w), b = parameters(back);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i]->shape, b[i]->shape);
    ASSERT_EQ(std::memcmp(a[i]->values.data(), b[i]->values.data(), a[i]->size() * 4), 0);
  }
  for (std::size_t i = 0; i < w.illumination.size(); ++i)
    EXPECT_EQ(back.illumination[i].activation, w.illumination[i].activation);
  // Saving the loaded weights reproduces the file byte for byte.
  save_weights(back, tmp / "again.sciw");
  EXPECT_EQ(read_bytes(tmp / "w.sciw"), read_bytes(tmp / "again.sciw"));
}

TEST(Checkpoint, HeaderLayout) {
  TempDir tmp;
  save_weights(make_zero_weights({1, 4, 1e-3f}), tmp / "w.sciw");
  std::vector<char> b = read_bytes(tmp / "w.sciw");
  ASSERT_GE(b.size(), 10u);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "SCIW");
  EXPECT_EQ(b[4], 1);
  EXPECT_EQ(b[5], 0);
  EXPECT_EQ(b[6], 6);  // six layers
  // Header, six 18-byte table rows, parameters, 12-byte echo.
  const std::size_t params = 2 * ((4 * 1 * 9 + 4) + (4 * 4 * 9 + 4) + (1 * 4 * 9 + 1));
  EXPECT_EQ(b.size(), 10 + 6 * 18 + params * 4 + 12);
}

void expect_format_error(const std::filesystem::path& p, const std::string& fragment) {
  try {
    load_weights(p);
    FAIL() << "no error for " << fragment;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FormatError);
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(Checkpoint, TruncatedFile) {
  TempDir tmp;
  save_weights(random_weights(1), tmp / "w.sciw");
  std::vector<char> b = read_bytes(tmp / "w.sciw");
  for (std::size_t keep : {std::size_t{3}, std::size_t{12}, b.size() / 2, b.size() - 1}) {
    write_bytes(tmp / "t.sciw", std::vector<char>(b.begin(), b.begin() + keep));
    expect_format_error(tmp / "t.sciw", "");
  }
}

TEST(Checkpoint, BadMagicAndVersion) {
  TempDir tmp;
  save_weights(random_weights(1), tmp / "w.sciw");
  std::vector<char> b = read_bytes(tmp / "w.sciw");
  auto bad = b;
  bad[0] = 'X';
  write_bytes(tmp / "m.sciw", bad);
  expect_format_error(tmp / "m.sciw", "magic");
  bad = b;
  bad[4] = 9;
  write_bytes(tmp / "v.sciw", bad);
  expect_format_error(tmp / "v.sciw", "version");
}

TEST(Checkpoint, MismatchedShapeTableNamesLayer) {
  TempDir tmp;
  save_weights(random_weights(1, 1, 4), tmp / "w.sciw");
  std::vector<char> b = read_bytes(tmp / "w.sciw");
  // Row 1 starts at 10 + 18; its Cin field follows the network byte and Cout.
  b[10 + 18 + 1 + 4] = 3;
  write_bytes(tmp / "s.sciw", b);
  expect_format_error(tmp / "s.sciw", "layer 1");
}

TEST(Checkpoint, TrailingBytes) {
  TempDir tmp;
  save_weights(random_weights(1), tmp / "w.sciw");
  std::vector<char> b = read_bytes(tmp / "w.sciw");
  b.insert(b.end() - 12, 4, '\0');
  write_bytes(tmp / "x.sciw", b);
  expect_format_error(tmp / "x.sciw", "trailing");
}

TEST(Checkpoint, MissingFileAndUnwritablePath) {
  TempDir tmp;
  EXPECT_THROW(load_weights(tmp / "none.sciw"), Error);
  try {
    save_weights(zero_weights(), tmp / "a" / "b" / "c.sciw");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

}  // namespace
}  // namespace lumasci
