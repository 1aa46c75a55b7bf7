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

#include "pqvc/data.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>

namespace pqvc {

namespace {

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxError::Kind::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& buf, std::size_t at,
                        const std::filesystem::path& path) {
  if (at + 4 > buf.size()) {
    throw IdxError(IdxError::Kind::kTruncated, path.string() + ": truncated header");
  }
  return (std::uint32_t{buf[at]} << 24) | (std::uint32_t{buf[at + 1]} << 16) |
         (std::uint32_t{buf[at + 2]} << 8) | std::uint32_t{buf[at + 3]};
}

void put_be32(std::ofstream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                              static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b.data(), 4);
}

void put_le32(std::ofstream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v), static_cast<char>(v >> 8),
                              static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
  out.write(b.data(), 4);
}

std::uint32_t get_le32(const std::vector<unsigned char>& buf, std::size_t at) {
  return std::uint32_t{buf[at]} | (std::uint32_t{buf[at + 1]} << 8) |
         (std::uint32_t{buf[at + 2]} << 16) | (std::uint32_t{buf[at + 3]} << 24);
}

std::pair<int, int> shape_for(std::size_t target_pixels) {
  if (target_pixels == 0 || !std::has_single_bit(target_pixels)) {
    throw DataError("preprocess: target pixel count " + std::to_string(target_pixels) +
                    " is not a power of two");
  }
  const int e = std::countr_zero(target_pixels);
  return {1 << ((e + 1) / 2), 1 << (e / 2)};
}

void check_pixels(const std::vector<double>& pixels) {
  if (pixels.empty() || !std::has_single_bit(pixels.size())) {
    throw DataError("encoding needs a power-of-two pixel count, got " +
                    std::to_string(pixels.size()));
  }
}

}  // namespace

void Dataset::validate() const {
  for (const auto& s : samples) {
    if (s.pixels.size() != pixel_count()) {
      throw DataError("sample has " + std::to_string(s.pixels.size()) + " pixels, expected " +
                      std::to_string(pixel_count()));
    }
    if (s.label < 0 || s.label >= num_classes) {
      throw DataError("label " + std::to_string(s.label) + " outside [0, " +
                      std::to_string(num_classes) + ")");
    }
  }
}

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto ibuf = read_file(images);
  const auto lbuf = read_file(labels);
  if (read_be32(ibuf, 0, images) != kIdxImagesMagic) {
    throw IdxError(IdxError::Kind::kBadMagic, images.string() + ": bad IDX image magic");
  }
  if (read_be32(lbuf, 0, labels) != kIdxLabelsMagic) {
    throw IdxError(IdxError::Kind::kBadMagic, labels.string() + ": bad IDX label magic");
  }
  const std::size_t count = read_be32(ibuf, 4, images);
  const std::size_t rows = read_be32(ibuf, 8, images);
  const std::size_t cols = read_be32(ibuf, 12, images);
  const std::size_t label_count = read_be32(lbuf, 4, labels);
  if (count != label_count) {
    throw IdxError(IdxError::Kind::kCountMismatch,
                   "IDX count mismatch: " + std::to_string(count) + " images vs " +
                       std::to_string(label_count) + " labels");
  }
  const std::size_t px = rows * cols;
  if (ibuf.size() < 16 + count * px) {
    throw IdxError(IdxError::Kind::kTruncated, images.string() + ": truncated pixel data");
  }
  if (lbuf.size() < 8 + count) {
    throw IdxError(IdxError::Kind::kTruncated, labels.string() + ": truncated label data");
  }
  Dataset d;
  d.rows = static_cast<int>(rows);
  d.cols = static_cast<int>(cols);
  d.samples.resize(count);
  int max_label = 0;
  for (std::size_t i = 0; i < count; ++i) {
    auto& s = d.samples[i];
    s.pixels.resize(px);
    for (std::size_t j = 0; j < px; ++j) s.pixels[j] = ibuf[16 + i * px + j] / 255.0;
    s.label = lbuf[8 + i];
    max_label = std::max(max_label, s.label);
  }
  d.num_classes = std::max(10, max_label + 1);
  return d;
}

void write_idx(const Dataset& d, const std::filesystem::path& images,
               const std::filesystem::path& labels) {
  std::ofstream im(images, std::ios::binary);
  std::ofstream lb(labels, std::ios::binary);
  if (!im || !lb) throw DataError("cannot open IDX output files");
  put_be32(im, kIdxImagesMagic);
  put_be32(im, static_cast<std::uint32_t>(d.size()));
  put_be32(im, static_cast<std::uint32_t>(d.rows));
  put_be32(im, static_cast<std::uint32_t>(d.cols));
  put_be32(lb, kIdxLabelsMagic);
  put_be32(lb, static_cast<std::uint32_t>(d.size()));
  for (const auto& s : d.samples) {
    for (double v : s.pixels) {
      im.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0))));
    }
    lb.put(static_cast<char>(s.label));
  }
}

Dataset preprocess(const Dataset& d, std::size_t target_pixels) {
  const auto [tr, tc] = shape_for(target_pixels);
  if (d.rows == tr && d.cols == tc) return d;
  if (d.rows <= 0 || d.cols <= 0) throw DataError("preprocess: empty source images");
  const int pr = (d.rows + tr - 1) / tr * tr;
  const int pc = (d.cols + tc - 1) / tc * tc;
  const int top = (pr - d.rows) / 2;
  const int left = (pc - d.cols) / 2;
  const int fr = pr / tr;
  const int fc = pc / tc;
  const double norm = 1.0 / (static_cast<double>(fr) * fc);

  Dataset out;
  out.num_classes = d.num_classes;
  out.rows = tr;
  out.cols = tc;
  out.samples.reserve(d.size());
  std::vector<double> padded(static_cast<std::size_t>(pr) * pc);
  for (const auto& s : d.samples) {
    std::fill(padded.begin(), padded.end(), 0.0);
    for (int r = 0; r < d.rows; ++r) {
      for (int c = 0; c < d.cols; ++c) {
        padded[static_cast<std::size_t>(r + top) * pc + (c + left)] =
            s.pixels[static_cast<std::size_t>(r) * d.cols + c];
      }
    }
    Sample o;
    o.label = s.label;
    o.pixels.assign(static_cast<std::size_t>(tr) * tc, 0.0);
    for (int r = 0; r < pr; ++r) {
      for (int c = 0; c < pc; ++c) {
        o.pixels[static_cast<std::size_t>(r / fr) * tc + c / fc] +=
            padded[static_cast<std::size_t>(r) * pc + c];
      }
    }
    for (double& v : o.pixels) v = std::clamp(v * norm, 0.0, 1.0);
    out.samples.push_back(std::move(o));
  }
  return out;
}

PureState amplitude_encode(const std::vector<double>& pixels) {
  check_pixels(pixels);
  double norm2 = 0.0;
  for (double v : pixels) norm2 += v * v;
  if (norm2 == 0.0) throw DataError("cannot amplitude-encode an all-zero image");
  const double inv = 1.0 / std::sqrt(norm2);
  ComplexVector a(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) a(i) = pixels[i] * inv;
  a /= a.norm();
  return PureState::from_amplitudes(std::move(a));
}

PureState compressed_amplitude_encode(const std::vector<double>& pixels) {
  check_pixels(pixels);
  if (pixels.size() < 2) throw DataError("compressed encoding needs at least 2 pixels");
  ComplexVector a(pixels.size() / 2);
  for (std::size_t j = 0; j < pixels.size() / 2; ++j) {
    a(j) = Complex(pixels[2 * j], pixels[2 * j + 1]);
  }
  const double norm = a.norm();
  if (norm == 0.0) throw DataError("cannot amplitude-encode an all-zero image");
  a /= norm;
  a /= a.norm();
  return PureState::from_amplitudes(std::move(a));
}

EncodedState encode(const Sample& s, Encoding encoding) {
  return EncodedState{encoding == Encoding::kAmplitude ? amplitude_encode(s.pixels)
                                                       : compressed_amplitude_encode(s.pixels),
                      s.label};
}

int qubits_for_pixels(std::size_t pixel_count, Encoding encoding) {
  if (pixel_count == 0 || !std::has_single_bit(pixel_count)) {
    throw DataError("pixel count " + std::to_string(pixel_count) + " is not a power of two");
  }
  const int n = std::countr_zero(pixel_count);
  return encoding == Encoding::kAmplitude ? n : n - 1;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    // Unbiased draw in [0, i) by rejection.
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(perm[i - 1], perm[r % bound]);
  }
  return perm;
}

std::vector<std::vector<std::size_t>> batches(const Dataset& d, std::size_t batch_size,
                                              std::uint64_t seed) {
  if (batch_size == 0) throw std::invalid_argument("batch size must be at least 1");
  const auto perm = seeded_permutation(d.size(), seed);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < perm.size(); i += batch_size) {
    const std::size_t end = std::min(perm.size(), i + batch_size);
    out.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(i),
                     perm.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

Dataset synthetic_dataset(std::uint64_t seed, int num_classes, std::size_t pixels_per_image,
                          std::size_t samples_per_class, double noise_amplitude) {
  if (num_classes <= 0 || samples_per_class == 0) {
    throw DataError("synthetic dataset needs positive class and sample counts");
  }
  const auto [rows, cols] = shape_for(pixels_per_image);
  Dataset d;
  d.num_classes = num_classes;
  d.rows = rows;
  d.cols = cols;

  // Class templates: bumps evenly spaced on a ring around the image center.
  const double cy = 0.5 * (rows - 1);
  const double cx = 0.5 * (cols - 1);
  const double radius = 0.3 * std::min(rows, cols);
  const double width = std::max(0.75, 0.15 * std::min(rows, cols));
  std::vector<std::vector<double>> templates(num_classes);
  for (int k = 0; k < num_classes; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / num_classes + std::numbers::pi / 4.0;
    const double by = cy + radius * std::sin(angle);
    const double bx = cx + radius * std::cos(angle);
    auto& t = templates[k];
    t.resize(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double dy = r - by;
        const double dx = c - bx;
        t[static_cast<std::size_t>(r) * cols + c] =
            std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
      }
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  for (std::size_t i = 0; i < samples_per_class; ++i) {
    for (int k = 0; k < num_classes; ++k) {
      Sample s;
      s.label = k;
      s.pixels = templates[k];
      for (double& v : s.pixels) v = std::clamp(v + noise_amplitude * noise(rng), 0.0, 1.0);
      d.samples.push_back(std::move(s));
    }
  }
  return d;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& d, std::size_t test_count,
                                          std::uint64_t seed) {
  if (test_count >= d.size()) throw DataError("test split leaves no training samples");
  const auto perm = seeded_permutation(d.size(), seed);
  Dataset train{{}, d.num_classes, d.rows, d.cols};
  Dataset test{{}, d.num_classes, d.rows, d.cols};
  for (std::size_t i = 0; i < perm.size(); ++i) {
    (i < d.size() - test_count ? train : test).samples.push_back(d.samples[perm[i]]);
  }
  return {std::move(train), std::move(test)};
}

void write_container(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write("PQDS", 4);
  put_le32(out, kContainerVersion);
  const std::size_t px = d.pixel_count();
  put_le32(out, px > 0 && std::has_single_bit(px) ? static_cast<std::uint32_t>(std::countr_zero(px)) : 0U);
  put_le32(out, static_cast<std::uint32_t>(d.size()));
  put_le32(out, static_cast<std::uint32_t>(d.num_classes));
  put_le32(out, static_cast<std::uint32_t>(d.rows));
  put_le32(out, static_cast<std::uint32_t>(d.cols));
  for (const auto& s : d.samples) put_le32(out, static_cast<std::uint32_t>(s.label));
  for (const auto& s : d.samples) {
    for (double v : s.pixels) {
      const float f = static_cast<float>(v);
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      put_le32(out, bits);
    }
  }
}

Dataset read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  const std::vector<unsigned char> buf{std::istreambuf_iterator<char>(in),
                                      std::istreambuf_iterator<char>()};
  if (buf.size() < 28 || std::memcmp(buf.data(), "PQDS", 4) != 0) {
    throw DataError(path.string() + ": not a dataset container");
  }
  if (get_le32(buf, 4) != kContainerVersion) {
    throw DataError(path.string() + ": unsupported container version");
  }
  Dataset d;
  const std::size_t count = get_le32(buf, 12);
  d.num_classes = static_cast<int>(get_le32(buf, 16));
  d.rows = static_cast<int>(get_le32(buf, 20));
  d.cols = static_cast<int>(get_le32(buf, 24));
  const std::size_t px = d.pixel_count();
  if (buf.size() != 28 + 4 * count + 4 * count * px) {
    throw DataError(path.string() + ": container size does not match header");
  }
  d.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    d.samples[i].label = static_cast<int>(get_le32(buf, 28 + 4 * i));
  }
  std::size_t at = 28 + 4 * count;
  for (auto& s : d.samples) {
    s.pixels.resize(px);
    for (double& v : s.pixels) {
      const std::uint32_t bits = get_le32(buf, at);
      float f;
      std::memcpy(&f, &bits, 4);
      v = f;
      at += 4;
    }
  }
  d.validate();
  return d;
}

}  // namespace pqvc
