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

// Command-line front end. Precedence, lowest to highest: built-in defaults,
// the --config file, --set / --seed-override assignments, --output.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pqvc/runner.hpp"

namespace {

// "params=5" -> "seeds.params=5", "dataset=3" -> "dataset.seed=3"; dotted keys
// pass through unchanged.
std::string seed_assignment(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) return kv;
  const std::string key = kv.substr(0, eq);
  if (key.find('.') != std::string::npos) return kv;
  if (key == "dataset") return "dataset.seed" + kv.substr(eq);
  if (key == "channel_check") return "channel_check.seed" + kv.substr(eq);
  return "seeds." + kv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy variational quantum classifier simulator and resource estimator"};
  app.set_version_flag("--version", std::string(pqvc::kVersion));
  app.require_subcommand(1);

  pqvc::RunOptions options;
  std::string config;
  std::string output;
  std::vector<std::string> seeds;
  std::vector<std::string> sets;
  app.add_option("--config", config, "Configuration file (key = value lines)");
  app.add_option("--output", output, "Output directory, overrides output.dir");
  app.add_option("--seed-override", seeds, "Seed assignment NAME=VALUE (params, shots, batches, dataset)");
  app.add_option("--set", sets, "Any configuration assignment KEY=VALUE");
  app.add_option("--threads", options.threads, "Worker threads (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);

  auto* train = app.add_subcommand("train", "Train the classifier and write per-record CSV");
  auto* check = app.add_subcommand("channel-check", "Run the channel property suite");
  auto* estimate = app.add_subcommand("estimate-resources", "Error-correction resource estimates");
  auto* dataset = app.add_subcommand("dataset", "Prepare a dataset container and statistics");
  for (auto* sub : {train, check, estimate, dataset}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : pqvc::kExitConfig;
  }

  if (!config.empty()) options.config_path = config;
  if (!output.empty()) options.output_dir = output;
  options.overrides = sets;
  for (const auto& s : seeds) options.overrides.push_back(seed_assignment(s));

  if (train->parsed()) return pqvc::cmd_train(options, std::cout, std::cerr);
  if (check->parsed()) return pqvc::cmd_channel_check(options, std::cout, std::cerr);
  if (estimate->parsed()) return pqvc::cmd_estimate(options, std::cout, std::cerr);
  return pqvc::cmd_dataset(options, std::cout, std::cerr);
}
