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

#include "sci_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "error.hpp"

namespace lumasci {

namespace {

std::vector<ConvLayer> make_stack(const SciArchitecture& arch, std::uint64_t seed,
                                  bool zero) {
  const int c = arch.in_channels;
  const int hdn = arch.hidden_channels;
  std::vector<ConvLayer> layers;
  if (zero) {
    layers.emplace_back(c, hdn, Activation::Relu);
    layers.emplace_back(hdn, hdn, Activation::Relu);
    layers.emplace_back(hdn, c, Activation::None);
  } else {
    layers.push_back(make_conv_layer(c, hdn, Activation::Relu, seed * 4 + 1));
    layers.push_back(make_conv_layer(hdn, hdn, Activation::Relu, seed * 4 + 2));
    layers.push_back(make_conv_layer(hdn, c, Activation::None, seed * 4 + 3));
  }
  return layers;
}

void check_arch(const SciArchitecture& arch) {
  if (arch.in_channels != 1 && arch.in_channels != 3) {
    throw Error(ErrorCode::InvalidArgument, "in_channels must be 1 or 3");
  }
  if (arch.hidden_channels < 1) {
    throw Error(ErrorCode::InvalidArgument, "hidden_channels must be positive");
  }
  if (!(arch.epsilon > 0.0f && arch.epsilon < 1.0f)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
  }
}

}  // namespace

SciWeights make_sci_weights(const SciArchitecture& arch, std::uint64_t seed) {
  check_arch(arch);
  SciWeights w;
  w.in_channels = arch.in_channels;
  w.hidden_channels = arch.hidden_channels;
  w.epsilon = arch.epsilon;
  w.illumination = make_stack(arch, seed * 2, false);
  w.calibration = make_stack(arch, seed * 2 + 1, false);
  return w;
}

SciWeights make_zero_weights(const SciArchitecture& arch) {
  check_arch(arch);
  SciWeights w;
  w.in_channels = arch.in_channels;
  w.hidden_channels = arch.hidden_channels;
  w.epsilon = arch.epsilon;
  w.illumination = make_stack(arch, 0, true);
  w.calibration = make_stack(arch, 0, true);
  return w;
}

template <class To, class From>
BasicSciWeights<To> cast_weights(const BasicSciWeights<From>& w) {
  BasicSciWeights<To> out;
  out.in_channels = w.in_channels;
  out.hidden_channels = w.hidden_channels;
  out.epsilon = w.epsilon;
  for (const auto& l : w.illumination) out.illumination.push_back(cast_layer<To>(l));
  for (const auto& l : w.calibration) out.calibration.push_back(cast_layer<To>(l));
  return out;
}

template <class T>
void validate_weights(const BasicSciWeights<T>& w) {
  auto check = [&](const std::vector<BasicConvLayer<T>>& layers, const char* name) {
    if (layers.empty()) {
      throw Error(ErrorCode::ShapeMismatch, std::string(name) + " network has no layers");
    }
    int expected = w.in_channels;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& k = layers[i].kernel.shape;
      if (k.size() != 4 || k[1] != expected || k[2] != 3 || k[3] != 3 ||
          layers[i].bias.shape != std::vector<int>{k[0]} ||
          layers[i].kernel.values.size() != shape_size(k) ||
          layers[i].bias.values.size() != static_cast<std::size_t>(k[0])) {
        throw Error(ErrorCode::ShapeMismatch,
                    std::string(name) + " layer " + std::to_string(i) + " has an inconsistent shape");
      }
      expected = k[0];
    }
    if (expected != w.in_channels) {
      throw Error(ErrorCode::ShapeMismatch,
                  std::string(name) + " network does not map back to in_channels");
    }
  };
  check(w.illumination, "illumination");
  check(w.calibration, "calibration");
}

std::vector<Tensor*> parameters(SciWeights& w) {
  std::vector<Tensor*> out;
  for (auto* stack : {&w.illumination, &w.calibration}) {
    for (auto& l : *stack) {
      out.push_back(&l.kernel);
      out.push_back(&l.bias);
    }
  }
  return out;
}

std::vector<BasicTensor<double>*> parameters(BasicSciWeights<double>& w) {
  std::vector<BasicTensor<double>*> out;
  for (auto* stack : {&w.illumination, &w.calibration}) {
    for (auto& l : *stack) {
      out.push_back(&l.kernel);
      out.push_back(&l.bias);
    }
  }
  return out;
}

template <class T>
std::uint64_t parameter_digest(const std::vector<BasicConvLayer<T>>& layers) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const std::vector<T>& v) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(v.data());
    for (std::size_t i = 0; i < v.size() * sizeof(T); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& l : layers) {
    mix(l.kernel.values);
    mix(l.bias.values);
  }
  return h;
}

namespace {

template <class T>
void check_unit_range(const BasicTensor<T>& y) {
  for (T v : y.values) {
    if (!(v >= T(0) && v <= T(1))) {
      throw Error(ErrorCode::BadRange, "luminance input outside [0, 1]");
    }
  }
}

template <class T>
void check_input(const BasicTensor<T>& y, const BasicSciWeights<T>& w) {
  if (y.shape.size() != 4 || y.shape[0] != 1 || y.shape[1] != w.in_channels) {
    throw Error(ErrorCode::ShapeMismatch,
                "input must be 1 x " + std::to_string(w.in_channels) + " x H x W");
  }
  check_unit_range(y);
}

// One illumination block; shared verbatim by the cascade and by inference.
template <class T>
void illumination_block(const BasicTensor<T>& v, const BasicTensor<T>& y,
                        const BasicSciWeights<T>& w, BasicStageTrace<T>& st) {
  st.illumination_acts =
      forward_chain(std::span<const BasicConvLayer<T>>(w.illumination), v);
  st.u = st.illumination_acts.back();
  const T eps = static_cast<T>(w.epsilon);
  st.x = BasicTensor<T>(v.shape);
  st.z = BasicTensor<T>(v.shape);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const T p = v.values[i] + st.u.values[i];
    const T x = std::clamp(p, eps, T(1));
    st.x.values[i] = x;
    st.z.values[i] = std::clamp(y.values[i] / x, T(0), T(1));
  }
}

template <class T>
struct EdgeWeights {
  std::vector<T> right;  // zero in the last column
  std::vector<T> down;   // zero in the last row
};

template <class T>
EdgeWeights<T> edge_weights(const BasicTensor<T>& y, double sigma) {
  const int c = y.shape[1];
  const int h = y.shape[2];
  const int w = y.shape[3];
  const double inv = 1.0 / (2.0 * sigma * sigma);
  EdgeWeights<T> e{std::vector<T>(y.size(), T(0)), std::vector<T>(y.size(), T(0))};
  for (int ch = 0; ch < c; ++ch) {
    const std::size_t base = static_cast<std::size_t>(ch) * h * w;
    for (int r = 0; r < h; ++r) {
      for (int col = 0; col < w; ++col) {
        const std::size_t i = base + static_cast<std::size_t>(r) * w + col;
        if (col + 1 < w) {
          const double d = static_cast<double>(y.values[i]) - y.values[i + 1];
          e.right[i] = static_cast<T>(std::exp(-d * d * inv));
        }
        if (r + 1 < h) {
          const double d = static_cast<double>(y.values[i]) - y.values[i + w];
          e.down[i] = static_cast<T>(std::exp(-d * d * inv));
        }
      }
    }
  }
  return e;
}

template <class T>
double smoothness(const BasicTensor<T>& x, const EdgeWeights<T>& e) {
  const int w = x.shape[3];
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (e.right[i] != T(0)) acc += e.right[i] * std::abs(static_cast<double>(x.values[i]) - x.values[i + 1]);
    if (e.down[i] != T(0)) acc += e.down[i] * std::abs(static_cast<double>(x.values[i]) - x.values[i + w]);
  }
  return acc / static_cast<double>(x.size());
}

template <class T>
double fidelity(const BasicTensor<T>& x, const BasicTensor<T>& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = static_cast<double>(x.values[i]) - v.values[i];
    acc += d * d;
  }
  return acc / static_cast<double>(x.size());
}

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_loss_config(const LossConfig& cfg) {
  if (!(cfg.sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
}

}  // namespace

template <class T>
BasicCascadeTrace<T> cascade_forward(const BasicTensor<T>& y, const BasicSciWeights<T>& w,
                                     int stages) {
  if (stages < 1) throw Error(ErrorCode::InvalidArgument, "stage count must be at least 1");
  validate_weights(w);
  check_input(y, w);

  BasicCascadeTrace<T> trace;
  trace.y = y;
  trace.epsilon = w.epsilon;
  trace.stages.resize(static_cast<std::size_t>(stages));
  BasicTensor<T> v = y;
  for (int t = 0; t < stages; ++t) {
    auto& st = trace.stages[static_cast<std::size_t>(t)];
    st.illumination_digest = parameter_digest(w.illumination);
    st.v = v;
    illumination_block(st.v, y, w, st);
    st.calibration_acts =
        forward_chain(std::span<const BasicConvLayer<T>>(w.calibration), st.z);
    st.s = st.calibration_acts.back();
    v = BasicTensor<T>(y.shape);
    for (std::size_t i = 0; i < y.size(); ++i) {
      v.values[i] = std::clamp(y.values[i] + st.s.values[i], T(0), T(1));
    }
  }
  return trace;
}

CascadeTrace cascade_forward(const PlanarImage& y, const SciWeights& w, int stages) {
  return cascade_forward(to_tensor(y), w, stages);
}

PlanarImage infer(const PlanarImage& y, const SciWeights& w) {
  validate_weights(w);
  const Tensor yt = to_tensor(y);
  check_input(yt, w);
  BasicStageTrace<float> st;
  illumination_block(yt, yt, w, st);
  return to_image(st.z, y.space);
}

template <class T>
LossBreakdown sci_loss_value(const BasicCascadeTrace<T>& trace, const LossConfig& cfg) {
  check_loss_config(cfg);
  const auto edges = edge_weights(trace.y, cfg.sigma);
  LossBreakdown out;
  for (const auto& st : trace.stages) {
    const double f = fidelity(st.x, st.v);
    const double s = smoothness(st.x, edges);
    out.fidelity.push_back(f);
    out.smoothness.push_back(s);
    out.total += cfg.alpha * f + cfg.beta * s;
  }
  return out;
}

template <class T>
double sci_loss(const BasicCascadeTrace<T>& trace, BasicSciWeights<T>& w, const LossConfig& cfg) {
  check_loss_config(cfg);
  for (auto* stack : {&w.illumination, &w.calibration}) {
    for (auto& l : *stack) {
      l.kernel.zero_grad();
      l.bias.zero_grad();
    }
  }
  const auto edges = edge_weights(trace.y, cfg.sigma);
  const auto& y = trace.y;
  const std::size_t n = y.size();
  const int width = y.shape[3];
  const double inv_n = 1.0 / static_cast<double>(n);
  const T eps = static_cast<T>(trace.epsilon);
  const std::size_t stages = trace.stages.size();

  double total = 0.0;
  BasicTensor<T> gv_next(y.shape);  // d loss / d v_{t+1}
  for (std::size_t t = stages; t-- > 0;) {
    const auto& st = trace.stages[t];
    total += cfg.alpha * fidelity(st.x, st.v) + cfg.beta * smoothness(st.x, edges);

    std::vector<double> gx(n, 0.0);
    BasicTensor<T> gv(y.shape);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = 2.0 * cfg.alpha * inv_n * (static_cast<double>(st.x.values[i]) - st.v.values[i]);
      gx[i] += d;
      gv.values[i] = static_cast<T>(-d);
    }
    const double sb = cfg.beta * inv_n;
    for (std::size_t i = 0; i < n; ++i) {
      if (edges.right[i] != T(0)) {
        const double g = sb * edges.right[i] * sign(static_cast<double>(st.x.values[i]) - st.x.values[i + 1]);
        gx[i] += g;
        gx[i + 1] -= g;
      }
      if (edges.down[i] != T(0)) {
        const double g = sb * edges.down[i] * sign(static_cast<double>(st.x.values[i]) - st.x.values[i + width]);
        gx[i] += g;
        gx[i + width] -= g;
      }
    }

    // v_{t+1} = clamp(y + s_t, 0, 1); s_t = K(z_t); z_t = clamp(y / x_t, 0, 1).
    if (t + 1 < stages) {
      BasicTensor<T> gs(y.shape);
      for (std::size_t i = 0; i < n; ++i) {
        const T r = y.values[i] + st.s.values[i];
        gs.values[i] = (r >= T(0) && r <= T(1)) ? gv_next.values[i] : T(0);
      }
      const BasicTensor<T> gz = backward_chain(std::span<BasicConvLayer<T>>(w.calibration),
                                               std::span<const BasicTensor<T>>(st.calibration_acts), gs);
      for (std::size_t i = 0; i < n; ++i) {
        const T x = st.x.values[i];
        const T q = y.values[i] / x;
        if (q >= T(0) && q <= T(1)) {
          gx[i] -= static_cast<double>(gz.values[i]) * y.values[i] / (static_cast<double>(x) * x);
        }
      }
    }

    // x_t = clamp(v_t + u_t, eps, 1); u_t = H(v_t).
    BasicTensor<T> gu(y.shape);
    for (std::size_t i = 0; i < n; ++i) {
      const T p = st.v.values[i] + st.u.values[i];
      const T g = (p >= eps && p <= T(1)) ? static_cast<T>(gx[i]) : T(0);
      gu.values[i] = g;
      gv.values[i] += g;
    }
    const BasicTensor<T> gin = backward_chain(std::span<BasicConvLayer<T>>(w.illumination),
                                              std::span<const BasicTensor<T>>(st.illumination_acts), gu);
    for (std::size_t i = 0; i < n; ++i) gv.values[i] += gin.values[i];
    gv_next = std::move(gv);
  }
  return total;
}

Tensor to_tensor(const PlanarImage& img) {
  Tensor t({1, img.channels, img.height, img.width});
  t.values = img.data;
  return t;
}

PlanarImage to_image(const Tensor& t, ColorSpace space) {
  if (t.shape.size() != 4 || t.shape[0] != 1) {
    throw Error(ErrorCode::ShapeMismatch, "to_image expects a 1 x C x H x W tensor");
  }
  PlanarImage img(t.shape[2], t.shape[3], t.shape[1], space);
  img.data = t.values;
  return img;
}

// Checkpoint I/O ---------------------------------------------------------

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  Reader(const std::vector<std::uint8_t>& bytes, std::string path)
      : bytes_(bytes), path_(std::move(path)) {}

  std::uint8_t u8() { need(1); return bytes_[pos_++]; }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  bool at_end() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::FormatError, path_ + ": " + what);
  }

 private:
  void need(std::size_t n) {
    if (bytes_.size() - pos_ < n) fail("truncated checkpoint");
  }
  const std::vector<std::uint8_t>& bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

struct TableEntry {
  std::uint8_t network;
  std::uint32_t cout, cin, kh, kw;
  std::uint8_t activation;
};

}  // namespace

void save_weights(const SciWeights& w, const std::filesystem::path& path) {
  validate_weights(w);
  Writer out;
  out.raw(kCheckpointMagic, 4);
  out.u16(kCheckpointVersion);
  out.u32(static_cast<std::uint32_t>(w.illumination.size() + w.calibration.size()));
  std::uint8_t net = 0;
  for (const auto* stack : {&w.illumination, &w.calibration}) {
    for (const auto& l : *stack) {
      out.u8(net);
      for (int d : l.kernel.shape) out.u32(static_cast<std::uint32_t>(d));
      out.u8(static_cast<std::uint8_t>(l.activation));
    }
    ++net;
  }
  for (const auto* stack : {&w.illumination, &w.calibration}) {
    for (const auto& l : *stack) {
      for (float v : l.kernel.values) out.f32(v);
      for (float v : l.bias.values) out.f32(v);
    }
  }
  out.u32(static_cast<std::uint32_t>(w.in_channels));
  out.u32(static_cast<std::uint32_t>(w.hidden_channels));
  out.f32(w.epsilon);

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::IoError, "cannot write checkpoint: " + path.string());
  const auto& bytes = out.bytes();
  file.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

SciWeights load_weights(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::IoError, "cannot read checkpoint: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  Reader in(bytes, path.string());

  char magic[4];
  for (char& c : magic) c = static_cast<char>(in.u8());
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0) in.fail("bad magic");
  const std::uint16_t version = in.u16();
  if (version != kCheckpointVersion) in.fail("unsupported version " + std::to_string(version));

  const std::uint32_t count = in.u32();
  // Each table row takes 18 bytes; reject counts the file cannot hold.
  if (count == 0 || count > in.remaining() / 18) in.fail("implausible layer count");
  std::vector<TableEntry> table(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    TableEntry& e = table[i];
    e.network = in.u8();
    e.cout = in.u32();
    e.cin = in.u32();
    e.kh = in.u32();
    e.kw = in.u32();
    e.activation = in.u8();
    const std::string where = "layer " + std::to_string(i);
    if (e.network > 1) in.fail(where + ": unknown network id");
    if (i > 0 && e.network < table[i - 1].network) in.fail(where + ": network order");
    if (e.kh != 3 || e.kw != 3) in.fail(where + ": kernel must be 3x3");
    if (e.activation > 1) in.fail(where + ": unknown activation code");
    if (e.cout == 0 || e.cin == 0 || e.cout > 4096 || e.cin > 4096) in.fail(where + ": bad channel count");
  }

  // The config echo sits in the last 12 bytes; read it first so the table
  // can be checked before any tensor data is trusted.
  if (in.remaining() < 12) in.fail("truncated checkpoint");
  const std::vector<std::uint8_t> tail(bytes.end() - 12, bytes.end());
  Reader echo(tail, path.string());
  const int in_channels = static_cast<int>(echo.u32());
  const int hidden_channels = static_cast<int>(echo.u32());
  const float epsilon = echo.f32();
  if (in_channels < 1 || hidden_channels < 1) in.fail("bad channel counts in config echo");
  if (!(epsilon > 0.0f && epsilon < 1.0f)) in.fail("epsilon outside (0, 1)");

  // Shape table must chain in -> hidden ... -> in for both networks.
  std::size_t data_bytes = 0;
  for (std::uint8_t net = 0; net < 2; ++net) {
    int expected = in_channels;
    std::uint32_t last = count;
    for (std::uint32_t i = 0; i < count; ++i) {
      const TableEntry& e = table[i];
      if (e.network != net) continue;
      const std::string where = "layer " + std::to_string(i);
      if (static_cast<int>(e.cin) != expected) {
        in.fail(where + ": expects " + std::to_string(e.cin) + " input channels, previous layer gives " +
                std::to_string(expected));
      }
      expected = static_cast<int>(e.cout);
      last = i;
      data_bytes += (static_cast<std::size_t>(e.cout) * e.cin * 9 + e.cout) * 4;
    }
    if (last == count) in.fail(std::string("missing ") + (net == 0 ? "illumination" : "calibration") + " network");
    if (expected != in_channels) in.fail("layer " + std::to_string(last) + ": output channels differ from in_channels");
  }
  if (in.remaining() - 12 < data_bytes) in.fail("truncated tensor data");
  if (in.remaining() - 12 > data_bytes) in.fail("trailing bytes after tensor data");

  SciWeights w;
  for (const TableEntry& e : table) {
    ConvLayer l(static_cast<int>(e.cin), static_cast<int>(e.cout), static_cast<Activation>(e.activation));
    for (float& v : l.kernel.values) v = in.f32();
    for (float& v : l.bias.values) v = in.f32();
    (e.network == 0 ? w.illumination : w.calibration).push_back(std::move(l));
  }
  w.in_channels = in_channels;
  w.hidden_channels = hidden_channels;
  w.epsilon = epsilon;
  return w;
}

#define LUMASCI_INSTANTIATE(T)                                                                      \
  template void validate_weights(const BasicSciWeights<T>&);                                        \
  template std::uint64_t parameter_digest(const std::vector<BasicConvLayer<T>>&);                   \
  template BasicCascadeTrace<T> cascade_forward(const BasicTensor<T>&, const BasicSciWeights<T>&, int); \
  template LossBreakdown sci_loss_value(const BasicCascadeTrace<T>&, const LossConfig&);            \
  template double sci_loss(const BasicCascadeTrace<T>&, BasicSciWeights<T>&, const LossConfig&);

LUMASCI_INSTANTIATE(float)
LUMASCI_INSTANTIATE(double)
#undef LUMASCI_INSTANTIATE

template BasicSciWeights<double> cast_weights<double, float>(const BasicSciWeights<float>&);
template BasicSciWeights<float> cast_weights<float, double>(const BasicSciWeights<double>&);

}  // namespace lumasci
