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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pqvc/errors.hpp"
#include "pqvc/linalg.hpp"

namespace pqvc {

struct Sample {
  std::vector<double> pixels;  // row-major, intensities in [0, 1]
  int label = 0;
};

struct Dataset {
  std::vector<Sample> samples;
  int num_classes = 0;
  int rows = 0;
  int cols = 0;

  std::size_t pixel_count() const { return static_cast<std::size_t>(rows) * cols; }
  std::size_t size() const { return samples.size(); }
  /// Throws DataError if pixel counts or labels are inconsistent.
  void validate() const;
};

enum class Encoding { kAmplitude, kCompressed };

struct EncodedState {
  PureState state;
  int source_label = 0;
};

class IdxError : public DataError {
 public:
  enum class Kind { kIo, kBadMagic, kTruncated, kCountMismatch };
  IdxError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Reads an IDX image file (magic 0x00000803) and label file (0x00000801).
/// Pixel bytes are divided by 255.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

/// Writes the dataset back as IDX (pixels rounded to bytes).
void write_idx(const Dataset& d, const std::filesystem::path& images,
               const std::filesystem::path& labels);

/// Resizes every image to `target_pixels` (a power of two). Even exponents give
/// a square image, odd ones a 2:1 rectangle. Sources are zero-padded
/// symmetrically up to a multiple of the target shape, then block-averaged.
Dataset preprocess(const Dataset& d, std::size_t target_pixels);

/// Real amplitudes pixels / ||pixels||_2.
PureState amplitude_encode(const std::vector<double>& pixels);

/// Pixel pairs become complex amplitudes (p[2j] + i p[2j+1]), normalized; one
/// qubit fewer than plain amplitude encoding.
PureState compressed_amplitude_encode(const std::vector<double>& pixels);

EncodedState encode(const Sample& s, Encoding encoding);

/// Qubits needed to hold `pixel_count` pixels under `encoding`.
int qubits_for_pixels(std::size_t pixel_count, Encoding encoding);

/// Seeded permutation of sample indices, chunked into batches. The last batch
/// may be short.
std::vector<std::vector<std::size_t>> batches(const Dataset& d, std::size_t batch_size,
                                              std::uint64_t seed);

/// Fisher-Yates permutation of [0, n) driven by mt19937_64.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

/// Each class is a 2-D Gaussian bump at a class-specific location plus
/// uniform noise of the given amplitude, clamped to [0, 1].
Dataset synthetic_dataset(std::uint64_t seed, int num_classes, std::size_t pixels_per_image,
                          std::size_t samples_per_class, double noise_amplitude = 0.1);

/// Splits off `test_count` samples chosen by a seeded permutation.
std::pair<Dataset, Dataset> split_dataset(const Dataset& d, std::size_t test_count,
                                          std::uint64_t seed);

// Binary container written by the `dataset` subcommand. Layout, all integers
// little-endian:
//   char[4] "PQDS" | u32 version (1) | u32 qubits | u32 count | u32 classes
//   | u32 rows | u32 cols | count x u32 label | count*rows*cols x f32 pixels
inline constexpr std::uint32_t kContainerVersion = 1;

void write_container(const Dataset& d, const std::filesystem::path& path);
Dataset read_container(const std::filesystem::path& path);

}  // namespace pqvc
