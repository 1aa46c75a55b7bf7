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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pqvc/config.hpp"
#include "pqvc/data.hpp"
#include "pqvc/training.hpp"

namespace pqvc {

// Stable process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // a check ran and failed
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kRecordSchema = "train_records/v1";

struct RunOptions {
  std::optional<std::filesystem::path> config_path;
  std::optional<std::filesystem::path> output_dir;
  std::vector<std::string> overrides;  // KEY=VALUE, applied after the file
  int threads = 0;                     // 0 keeps the runtime default
};

int cmd_train(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_channel_check(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_estimate(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_dataset(const RunOptions& options, std::ostream& out, std::ostream& err);

/// File plus overrides, before sweep expansion.
RawConfig load_raw_config(const RunOptions& options);

/// Train and test sets described by the dataset section, preprocessed.
std::pair<Dataset, Dataset> prepare_datasets(const DatasetConfig& cfg, int n_qubits);

/// CSV text: versioned comment line, header, one row per record.
std::string records_csv(const std::vector<TrainRecord>& records, bool include_wall_time);

std::string sha256_hex(const std::filesystem::path& file);

}  // namespace pqvc
