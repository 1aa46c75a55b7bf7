// Copyright 2026 The pqvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "pqvc/data.hpp"

namespace pqvc {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            (std::string("pqvc_data_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

/// Byte-exact pixels so the IDX round trip is lossless.
Dataset byte_dataset(std::size_t count, int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> byte(0, 255), label(0, 9);
  Dataset d;
  d.num_classes = 10;
  d.rows = rows;
  d.cols = cols;
  for (std::size_t i = 0; i < count; ++i) {
    Sample s;
    s.label = label(rng);
    s.pixels.resize(static_cast<std::size_t>(rows) * cols);
    for (double& v : s.pixels) v = byte(rng) / 255.0;
    d.samples.push_back(std::move(s));
  }
  return d;
}

void write_bytes(const fs::path& p, const std::vector<unsigned char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<unsigned char> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void expect_same(const Dataset& a, const Dataset& b) {
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(a.rows, b.rows);
  EXPECT_EQ(a.cols, b.cols);
  EXPECT_EQ(a.num_classes, b.num_classes);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.samples[i].label, b.samples[i].label);
    EXPECT_EQ(a.samples[i].pixels, b.samples[i].pixels);
  }
}

// ---- IDX -------------------------------------------------------------------

TEST(LoadIdx, TwoImageRoundTrip) {
  TempDir dir;
  const Dataset d = byte_dataset(2, 28, 28, 1);
  write_idx(d, dir / "img", dir / "lbl");
  const Dataset back = load_idx(dir / "img", dir / "lbl");
  EXPECT_EQ(back.size(), 2u);
  EXPECT_EQ(back.rows, 28);
  EXPECT_EQ(back.cols, 28);
  expect_same(back, d);
}

TEST(LoadIdx, HeaderIsBigEndian) {
  TempDir dir;
  write_idx(byte_dataset(3, 2, 4, 2), dir / "img", dir / "lbl");
  const auto bytes = read_bytes(dir / "img");
  const std::vector<unsigned char> header(bytes.begin(), bytes.begin() + 16);
  EXPECT_EQ(header, (std::vector<unsigned char>{0, 0, 8, 3, 0, 0, 0, 3, 0, 0, 0, 2, 0, 0, 0, 4}));
  EXPECT_EQ(bytes.size(), 16u + 3 * 8);
}

TEST(LoadIdx, WrongMagicNamesTheFile) {
  TempDir dir;
  write_idx(byte_dataset(2, 4, 4, 3), dir / "img", dir / "lbl");
  auto bytes = read_bytes(dir / "img");
  bytes[3] = 0x01;
  write_bytes(dir / "bad_img", bytes);
  try {
    load_idx(dir / "bad_img", dir / "lbl");
    FAIL() << "expected IdxError";
  } catch (const IdxError& e) {
    EXPECT_EQ(e.kind(), IdxError::Kind::kBadMagic);
    EXPECT_NE(std::string(e.what()).find("bad_img"), std::string::npos);
  }
}

TEST(LoadIdx, CountMismatch) {
  TempDir dir;
  write_idx(byte_dataset(2, 4, 4, 4), dir / "img", dir / "lbl");
  write_idx(byte_dataset(3, 4, 4, 5), dir / "img3", dir / "lbl3");
  try {
    load_idx(dir / "img", dir / "lbl3");
    FAIL() << "expected IdxError";
  } catch (const IdxError& e) {
    EXPECT_EQ(e.kind(), IdxError::Kind::kCountMismatch);
  }
}

TEST(LoadIdx, TruncatedFile) {
  TempDir dir;
  write_idx(byte_dataset(2, 4, 4, 6), dir / "img", dir / "lbl");
  auto bytes = read_bytes(dir / "img");
  bytes.resize(bytes.size() - 5);
  write_bytes(dir / "short", bytes);
  try {
    load_idx(dir / "short", dir / "lbl");
    FAIL() << "expected IdxError";
  } catch (const IdxError& e) {
    EXPECT_EQ(e.kind(), IdxError::Kind::kTruncated);
  }
}

TEST(LoadIdx, MissingFile) {
  TempDir dir;
  try {
    load_idx(dir / "nope", dir / "nope2");
    FAIL() << "expected IdxError";
  } catch (const IdxError& e) {
    EXPECT_EQ(e.kind(), IdxError::Kind::kIo);
  }
}

TEST(LoadIdx, WriteThenLoadIsIdentity) {
  TempDir dir;
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    const Dataset d = byte_dataset(7, 8, 8, seed);
    write_idx(d, dir / "img", dir / "lbl");
    expect_same(load_idx(dir / "img", dir / "lbl"), d);
  }
}

// ---- preprocess ------------------------------------------------------------

TEST(Preprocess, PadsMnistSizeTo32) {
  Dataset d{{Sample{std::vector<double>(28 * 28, 1.0), 3}}, 10, 28, 28};
  const Dataset out = preprocess(d, 1024);
  ASSERT_EQ(out.rows, 32);
  ASSERT_EQ(out.cols, 32);
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) {
      const bool inside = r >= 2 && r < 30 && c >= 2 && c < 30;
      EXPECT_EQ(out.samples[0].pixels[r * 32 + c], inside ? 1.0 : 0.0) << r << "," << c;
    }
  }
  EXPECT_EQ(out.samples[0].label, 3);
}

TEST(Preprocess, CheckerboardBlockAverageIsHalf) {
  Sample s;
  s.pixels.resize(32 * 32);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) s.pixels[r * 32 + c] = (r + c) % 2;
  const Dataset out = preprocess(Dataset{{s}, 2, 32, 32}, 64);
  ASSERT_EQ(out.rows, 8);
  for (double v : out.samples[0].pixels) EXPECT_EQ(v, 0.5);
}

TEST(Preprocess, SameSizeIsIdempotent) {
  const Dataset d = byte_dataset(3, 8, 8, 7);
  expect_same(preprocess(d, 64), d);
  const Dataset once = preprocess(byte_dataset(3, 28, 28, 8), 1024);
  expect_same(preprocess(once, 1024), once);
}

TEST(Preprocess, OddExponentGivesTwoToOneRectangle) {
  const Dataset out = preprocess(byte_dataset(1, 28, 28, 9), 512);
  EXPECT_EQ(out.pixel_count(), 512u);
  EXPECT_EQ(out.rows, 32);
  EXPECT_EQ(out.cols, 16);
}

TEST(Preprocess, RejectsImpossibleTarget) {
  EXPECT_THROW(preprocess(byte_dataset(1, 8, 8, 10), 48), DataError);
  EXPECT_THROW(preprocess(byte_dataset(1, 8, 8, 10), 0), DataError);
}

TEST(Preprocess, ValuesStayInUnitInterval) {
  for (std::size_t target : {16u, 64u, 256u, 1024u}) {
    const Dataset out = preprocess(byte_dataset(5, 28, 28, target), target);
    for (const auto& s : out.samples) {
      EXPECT_GE(*std::min_element(s.pixels.begin(), s.pixels.end()), 0.0);
      EXPECT_LE(*std::max_element(s.pixels.begin(), s.pixels.end()), 1.0);
    }
  }
}

// ---- encodings -------------------------------------------------------------

TEST(AmplitudeEncode, UniformImage) {
  const PureState s = amplitude_encode(std::vector<double>(16, 0.3));
  EXPECT_EQ(s.num_qubits(), 4);
  for (int i = 0; i < 16; ++i) EXPECT_NEAR(s.amplitudes()(i).real(), 0.25, 1e-15);
}

TEST(AmplitudeEncode, OneHotIsBasisState) {
  std::vector<double> px(8, 0.0);
  px[5] = 0.7;
  const PureState s = amplitude_encode(px);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(s.amplitudes()(i), Complex(i == 5 ? 1.0 : 0.0));
}

TEST(AmplitudeEncode, ThreeFourZeroZero) {
  const PureState s = amplitude_encode({3 / 255.0, 4 / 255.0, 0, 0});
  EXPECT_NEAR(s.amplitudes()(0).real(), 0.6, 1e-15);
  EXPECT_NEAR(s.amplitudes()(1).real(), 0.8, 1e-15);
  EXPECT_EQ(s.amplitudes()(2), Complex(0.0));
}

TEST(AmplitudeEncode, RejectsZeroAndBadLength) {
  EXPECT_THROW(amplitude_encode(std::vector<double>(8, 0.0)), DataError);
  EXPECT_THROW(amplitude_encode(std::vector<double>(6, 1.0)), DataError);
}

TEST(CompressedEncode, SinglePixel) {
  const PureState s = compressed_amplitude_encode({1, 0, 0, 0});
  EXPECT_EQ(s.num_qubits(), 1);
  EXPECT_EQ(s.amplitudes()(0), Complex(1.0));
  EXPECT_EQ(s.amplitudes()(1), Complex(0.0));
}

TEST(CompressedEncode, AllOnes) {
  const PureState s = compressed_amplitude_encode({1, 1, 1, 1});
  EXPECT_LT(std::abs(s.amplitudes()(0) - Complex(0.5, 0.5)), 1e-15);
  EXPECT_LT(std::abs(s.amplitudes()(1) - Complex(0.5, 0.5)), 1e-15);
}

TEST(CompressedEncode, RejectsZero) {
  EXPECT_THROW(compressed_amplitude_encode({0, 0, 0, 0}), DataError);
}

TEST(Encodings, UnitNormOnRandomInputs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> px(std::size_t{2} << (trial % 8));
    for (double& v : px) v = u(rng);
    EXPECT_NEAR(amplitude_encode(px).amplitudes().squaredNorm(), 1.0, 1e-12);
    EXPECT_NEAR(compressed_amplitude_encode(px).amplitudes().squaredNorm(), 1.0, 1e-12);
  }
}

TEST(Encodings, QubitCounts) {
  EXPECT_EQ(qubits_for_pixels(64, Encoding::kAmplitude), 6);
  EXPECT_EQ(qubits_for_pixels(64, Encoding::kCompressed), 5);
  EXPECT_THROW(qubits_for_pixels(60, Encoding::kAmplitude), DataError);
}

// ---- batching --------------------------------------------------------------

TEST(Batches, SameSeedSameOrder) {
  const Dataset d = synthetic_dataset(1, 4, 16, 10);
  EXPECT_EQ(batches(d, 7, 99), batches(d, 7, 99));
  EXPECT_NE(batches(d, 7, 99), batches(d, 7, 100));
}

TEST(Batches, FullSizeBatchIsSingle) {
  const Dataset d = synthetic_dataset(1, 4, 16, 10);
  const auto b = batches(d, d.size(), 5);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].size(), d.size());
}

TEST(Batches, UnionIsWholeDataset) {
  const Dataset d = synthetic_dataset(1, 3, 16, 11);
  std::vector<std::size_t> all;
  for (const auto& b : batches(d, 4, 6)) all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  ASSERT_EQ(all.size(), d.size());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
}

TEST(Batches, RejectsZeroSize) {
  EXPECT_THROW(batches(synthetic_dataset(1, 2, 16, 2), 0, 1), std::invalid_argument);
}

// ---- synthetic generator ---------------------------------------------------

TEST(Synthetic, SameSeedSameData) {
  expect_same(synthetic_dataset(4, 4, 64, 20), synthetic_dataset(4, 4, 64, 20));
}

TEST(Synthetic, ZeroNoiseMakesClassesConstant) {
  const Dataset d = synthetic_dataset(4, 4, 64, 5, 0.0);
  for (const auto& s : d.samples) {
    const auto& first = *std::find_if(d.samples.begin(), d.samples.end(),
                                      [&](const Sample& o) { return o.label == s.label; });
    EXPECT_EQ(s.pixels, first.pixels);
  }
}

TEST(Synthetic, NearestCentroidSeparatesFourClasses) {
  const Dataset fit = synthetic_dataset(21, 4, 64, 100);
  const Dataset held = synthetic_dataset(22, 4, 64, 100);
  auto unit = [](std::vector<double> v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    for (double& x : v) x /= std::sqrt(n);
    return v;
  };
  std::vector<std::vector<double>> centroid(4, std::vector<double>(64, 0.0));
  for (const auto& s : fit.samples) {
    const auto u = unit(s.pixels);
    for (int i = 0; i < 64; ++i) centroid[s.label][i] += u[i];
  }
  int correct = 0;
  for (const auto& s : held.samples) {
    const auto u = unit(s.pixels);
    int best = 0;
    double best_d = 1e300;
    for (int k = 0; k < 4; ++k) {
      const auto c = unit(centroid[k]);
      double d2 = 0.0;
      for (int i = 0; i < 64; ++i) d2 += (u[i] - c[i]) * (u[i] - c[i]);
      if (d2 < best_d) best_d = d2, best = k;
    }
    correct += best == s.label;
  }
  EXPECT_GT(correct / static_cast<double>(held.size()), 0.9);
}

TEST(Synthetic, SplitIsDisjointAndComplete) {
  const Dataset d = synthetic_dataset(5, 4, 16, 25);
  const auto [train, test] = split_dataset(d, 20, 3);
  EXPECT_EQ(train.size(), 80u);
  EXPECT_EQ(test.size(), 20u);
  EXPECT_THROW(split_dataset(d, d.size(), 3), DataError);
}

// ---- container -------------------------------------------------------------

TEST(Container, RoundTripIsBitExact) {
  TempDir dir;
  Dataset d = synthetic_dataset(6, 4, 64, 5);
  for (auto& s : d.samples)
    for (double& v : s.pixels) v = static_cast<float>(v);
  write_container(d, dir / "d.pqds");
  expect_same(read_container(dir / "d.pqds"), d);
}

TEST(Container, HeaderLayout) {
  TempDir dir;
  write_container(synthetic_dataset(6, 3, 16, 2), dir / "d.pqds");
  const auto b = read_bytes(dir / "d.pqds");
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "PQDS");
  EXPECT_EQ(b[4], 1);   // version
  EXPECT_EQ(b[8], 4);   // qubits
  EXPECT_EQ(b[12], 6);  // count
  EXPECT_EQ(b[16], 3);  // classes
  EXPECT_EQ(b.size(), 28u + 6 * 4 + 6 * 16 * 4);
}

TEST(Container, RejectsCorruptFile) {
  TempDir dir;
  write_container(synthetic_dataset(6, 3, 16, 2), dir / "d.pqds");
  auto b = read_bytes(dir / "d.pqds");
  b.pop_back();
  write_bytes(dir / "bad.pqds", b);
  EXPECT_THROW(read_container(dir / "bad.pqds"), DataError);
  b[0] = 'X';
  write_bytes(dir / "bad2.pqds", b);
  EXPECT_THROW(read_container(dir / "bad2.pqds"), DataError);
}

}  // namespace
}  // namespace pqvc
