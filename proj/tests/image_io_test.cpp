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

#include <fstream>
#include <random>

#include <png.h>

#include "error.hpp"
#include "image.hpp"
#include "test_support.hpp"

namespace lumasci {
namespace {

using testing::TempDir;

// Writes raw 8-bit pixels with libpng so decoding is tested independently
// of save_image.
void write_raw_png(const std::filesystem::path& path, int w, int h, int color_type, int bit_depth,
                   const std::vector<unsigned char>& bytes) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  ASSERT_NE(fp, nullptr);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  png_init_io(png, fp);
  png_set_IHDR(png, info, w, h, bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t row = bytes.size() / h;
  for (int y = 0; y < h; ++y) png_write_row(png, bytes.data() + y * row);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

TEST(LoadImage, WhitePixel) {
  TempDir tmp;
  write_raw_png(tmp / "w.png", 1, 1, PNG_COLOR_TYPE_RGB, 8, {255, 255, 255});
  PlanarImage img = load_image(tmp / "w.png");
  EXPECT_EQ(img.height, 1);
  EXPECT_EQ(img.width, 1);
  EXPECT_EQ(img.channels, 3);
  EXPECT_EQ(img.space, ColorSpace::Rgb);
  for (float v : img.data) EXPECT_EQ(v, 1.0f);
}

TEST(LoadImage, BlackPixel) {
  TempDir tmp;
  write_raw_png(tmp / "b.png", 1, 1, PNG_COLOR_TYPE_RGB, 8, {0, 0, 0});
  for (float v : load_image(tmp / "b.png").data) EXPECT_EQ(v, 0.0f);
}

TEST(LoadImage, PrimaryColorsArePlanar) {
  TempDir tmp;
  write_raw_png(tmp / "rg.png", 2, 1, PNG_COLOR_TYPE_RGB, 8, {255, 0, 0, 0, 255, 0});
  PlanarImage img = load_image(tmp / "rg.png");
  ASSERT_EQ(img.width, 2);
  EXPECT_EQ(img.data, (std::vector<float>{1, 0, 0, 1, 0, 0}));
}

TEST(LoadImage, GrayPromotedToThreePlanes) {
  TempDir tmp;
  write_raw_png(tmp / "g.png", 3, 1, PNG_COLOR_TYPE_GRAY, 8, {0, 51, 255});
  PlanarImage img = load_image(tmp / "g.png");
  ASSERT_EQ(img.channels, 3);
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(img.at(c, 0, 0), 0.0f);
    EXPECT_EQ(img.at(c, 0, 1), 51.0f / 255.0f);
    EXPECT_EQ(img.at(c, 0, 2), 1.0f);
  }
}

TEST(LoadImage, AlphaDropped) {
  TempDir tmp;
  write_raw_png(tmp / "a.png", 1, 1, PNG_COLOR_TYPE_RGBA, 8, {10, 20, 30, 0});
  PlanarImage img = load_image(tmp / "a.png");
  ASSERT_EQ(img.channels, 3);
  EXPECT_EQ(img.data, (std::vector<float>{10 / 255.0f, 20 / 255.0f, 30 / 255.0f}));
}

TEST(LoadImage, SixteenBitRejected) {
  TempDir tmp;
  write_raw_png(tmp / "d.png", 1, 1, PNG_COLOR_TYPE_RGB, 16, {1, 2, 3, 4, 5, 6});
  try {
    load_image(tmp / "d.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DecodeError);
    EXPECT_NE(std::string(e.what()).find("d.png"), std::string::npos);
  }
}

TEST(LoadImage, MissingFile) {
  TempDir tmp;
  try {
    load_image(tmp / "nope.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FileNotFound);
    EXPECT_NE(std::string(e.what()).find("nope.png"), std::string::npos);
  }
}

TEST(LoadImage, CorruptFile) {
  TempDir tmp;
  std::ofstream(tmp / "bad.png") << "\x89PNG\r\n\x1a\n garbage";
  try {
    load_image(tmp / "bad.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DecodeError);
  }
}

TEST(SaveImage, QuantizationRule) {
  EXPECT_EQ(quantize_unit(1.0f), 255);
  EXPECT_EQ(quantize_unit(0.5f), 128);
  EXPECT_EQ(quantize_unit(1.7f), 255);
  EXPECT_EQ(quantize_unit(-0.3f), 0);
  EXPECT_EQ(quantize_unit(0.0f), 0);
}

TEST(SaveImage, WritesClampedRoundedBytes) {
  TempDir tmp;
  PlanarImage img(1, 3, 3, ColorSpace::Rgb);
  img.plane(0)[0] = 1.0f;
  img.plane(0)[1] = 0.5f;
  img.plane(0)[2] = 1.7f;
  save_image(img, tmp / "q.png");
  PlanarImage back = load_image(tmp / "q.png");
  EXPECT_EQ(back.at(0, 0, 0), 1.0f);
  EXPECT_EQ(back.at(0, 0, 1), 128.0f / 255.0f);
  EXPECT_EQ(back.at(0, 0, 2), 1.0f);
}

TEST(SaveImage, AllWhite) {
  TempDir tmp;
  save_image(PlanarImage(4, 5, 3, ColorSpace::Rgb, 1.0f), tmp / "w.png");
  for (float v : load_image(tmp / "w.png").data) EXPECT_EQ(v, 1.0f);
}

TEST(SaveImage, RejectsNonRgb) {
  TempDir tmp;
  PlanarImage gray(2, 2, 1, ColorSpace::Gray);
  EXPECT_THROW(save_image(gray, tmp / "g.png"), Error);
}

TEST(SaveImage, UnwritablePath) {
  TempDir tmp;
  try {
    save_image(PlanarImage(1, 1, 3, ColorSpace::Rgb), tmp / "no" / "such" / "dir.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

TEST(RoundTrip, FloatWithinHalfStep) {
  TempDir tmp;
  PlanarImage img = testing::random_rgb(17, 23, 7);
  save_image(img, tmp / "r.png");
  PlanarImage back = load_image(tmp / "r.png");
  ASSERT_EQ(back.data.size(), img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    EXPECT_LE(std::abs(back.data[i] - img.data[i]), 1.0f / 510.0f + 1e-7f);
  }
}

TEST(RoundTrip, IntegerValuedIsBitExact) {
  TempDir tmp;
  std::mt19937 rng(3);
  PlanarImage img(9, 11, 3, ColorSpace::Rgb);
  for (float& v : img.data) v = static_cast<float>(rng() % 256) / 255.0f;
  save_image(img, tmp / "i.png");
  EXPECT_EQ(load_image(tmp / "i.png").data, img.data);
}

TEST(Quantize8Bit, MatchesFileRoundTrip) {
  TempDir tmp;
  PlanarImage img = testing::random_rgb(6, 7, 11, -0.2f, 1.2f);
  save_image(img, tmp / "x.png");
  EXPECT_EQ(quantize_8bit(img).data, load_image(tmp / "x.png").data);
}

}  // namespace
}  // namespace lumasci
