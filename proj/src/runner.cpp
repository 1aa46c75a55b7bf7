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

#include "pqvc/runner.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pqvc/channel_checks.hpp"
#include "pqvc/errors.hpp"
#include "pqvc/estimator.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pqvc {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// Runs `body`, mapping library exceptions onto the stable exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const qec::UnreachableError& e) {
    err << "unreachable target: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

std::string sweep_dir_name(const std::string& label) {
  std::string s = label;
  for (char& c : s) {
    if (c == '/' || c == ' ') c = '_';
    if (c == ',') c = '+';
  }
  return s;
}

// Manifest over every regular file already in `dir`.
void write_manifest(const fs::path& dir, const std::string& command, const json& extra,
                    double wall_seconds, const std::string& started) {
  json m;
  m["version"] = kVersion;
  m["command"] = command;
  m["started_utc"] = started;
  m["wall_seconds"] = wall_seconds;
  m["metadata"] = extra;
  json files = json::object();
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() != "manifest.json") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) files[p.filename().string()] = sha256_hex(p);
  m["artifacts"] = files;
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

json noise_metadata(const ExperimentConfig& cfg) {
  json j;
  j["entangler"] = cfg.model.entangler == Entangler::kChain ? "nearest-neighbour CZ chain"
                                                            : "CZ ring";
  j["crosstalk_boundary"] = "open: neighbour pairs outside the register are dropped";
  j["padding"] = "symmetric zero padding, then block averaging";
  j["shot_model"] = cfg.model.joint_sampling ? "joint bitstring sampling"
                                             : "independent per-qubit binomial";
  return j;
}

int train_one(const ExperimentConfig& cfg, const fs::path& dir, const std::string& label,
              std::ostream& out) {
  const auto started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(dir);
  write_text(dir / "config.resolved", resolved_text(cfg));

  auto [train_set, test_set] = prepare_datasets(cfg.dataset, cfg.model.n_qubits);
  TrainConfig tc = cfg.train;
  tc.encoding = cfg.dataset.encoding;
  std::optional<CircuitParams> initial;
  const auto& single = cfg.model.noise.single;
  if (cfg.compensate_phase_mean && single.phase_damping && single.mu != 0.0) {
    initial = init_params(cfg.model, tc.seed_params);
    compensate_phase_mean(*initial, single.mu, single.phase_placement);
  }
  const TrainResult result = train(cfg.model, tc, train_set, test_set, initial);
  write_text(dir / "train_records.csv", records_csv(result.records, cfg.record_wall_time));

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json extra = noise_metadata(cfg);
  extra["sweep_point"] = label;
  extra["train_images"] = train_set.size();
  extra["test_images"] = test_set.size();
  extra["floored_probabilities"] = result.diagnostics.floored;
  json timings = json::array();
  for (const auto& r : result.records) timings.push_back({r.images_seen, r.wall_seconds});
  extra["record_wall_seconds"] = timings;
  write_manifest(dir, "train", extra, wall, started);

  const auto& last = result.records.back();
  out << (label.empty() ? std::string("run") : label) << ": " << last.images_seen
      << " images, loss " << num(last.loss) << ", test success " << num(last.test_success_rate)
      << " -> " << dir.string() << "\n";
  return kExitOk;
}

json cost_json(const qec::CostReport& r) {
  return json{{"layers", r.layers},
              {"spatial_d2", r.spatial},
              {"temporal_d", r.temporal},
              {"spacetime_d3", r.spacetime},
              {"dominant_temporal_term", r.dominant_temporal},
              {"p_out", r.p_out},
              {"temporal_per_layer", r.temporal_per_layer},
              {"error_per_layer", r.error_per_layer}};
}

}  // namespace

std::string sha256_hex(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

RawConfig load_raw_config(const RunOptions& options) {
  RawConfig raw;
  if (options.config_path) raw = read_config_file(*options.config_path);
  for (const auto& o : options.overrides) apply_override(raw, o);
  if (options.output_dir) raw["output.dir"] = options.output_dir->string();
  return raw;
}

std::pair<Dataset, Dataset> prepare_datasets(const DatasetConfig& cfg, int n_qubits) {
  std::size_t pixels = cfg.target_pixels;
  if (pixels == 0) {
    pixels = std::size_t{1} << (cfg.encoding == Encoding::kAmplitude ? n_qubits : n_qubits + 1);
  }
  if (cfg.kind == DatasetConfig::Kind::kSynthetic) {
    const Dataset all = synthetic_dataset(cfg.seed, cfg.num_classes, pixels, cfg.samples_per_class,
                                          cfg.noise_amplitude);
    return split_dataset(all, cfg.test_count, cfg.seed + 1);
  }
  if (cfg.images.empty() || cfg.labels.empty()) {
    throw ConfigError("dataset.kind = idx needs dataset.images and dataset.labels");
  }
  auto filter = [&](Dataset d) {
    if (cfg.max_label > 0) {
      std::erase_if(d.samples, [&](const Sample& s) { return s.label >= cfg.max_label; });
      d.num_classes = cfg.max_label;
    }
    return preprocess(d, pixels);
  };
  Dataset train_set = filter(load_idx(cfg.images, cfg.labels));
  if (!cfg.test_images.empty()) {
    Dataset test_set = filter(load_idx(cfg.test_images, cfg.test_labels));
    if (cfg.test_count > 0 && cfg.test_count < test_set.size()) {
      test_set.samples.resize(cfg.test_count);
    }
    return {std::move(train_set), std::move(test_set)};
  }
  return split_dataset(train_set, cfg.test_count, cfg.seed + 1);
}

std::string records_csv(const std::vector<TrainRecord>& records, bool include_wall_time) {
  std::ostringstream s;
  s << "# schema " << kRecordSchema << " pqvc " << kVersion << "\n";
  s << "images_seen,loss,mean_sq_grad,classical_mean_sq_grad,test_success_rate,wall_seconds\n";
  for (const auto& r : records) {
    s << r.images_seen << ',' << num(r.loss) << ',' << num(r.mean_sq_gradient) << ','
      << (r.classical_mean_sq_gradient ? num(*r.classical_mean_sq_gradient) : std::string())
      << ',' << num(r.test_success_rate) << ','
      << (include_wall_time ? num(r.wall_seconds) : std::string("0")) << "\n";
  }
  return s.str();
}

int cmd_train(const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    set_threads(options.threads);
    const RawConfig raw = load_raw_config(options);
    const auto points = expand_sweeps(raw);
    // Validate every point before any work starts.
    std::vector<ExperimentConfig> configs;
    for (const auto& p : points) configs.push_back(to_experiment(p.values));
    const fs::path root = configs.front().output_dir;
    if (points.size() == 1) return train_one(configs.front(), root, "", out);
    const auto started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(root);
    std::string index = "directory,sweep_point\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::string name = sweep_dir_name(points[i].label);
      index += name + "," + points[i].label + "\n";
      const int rc = train_one(configs[i], root / name, points[i].label, out);
      if (rc != kExitOk) return rc;
    }
    write_text(root / "sweep_index.csv", index);
    write_manifest(root, "train-sweep", json{{"points", points.size()}},
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
                   started);
    return kExitOk;
  });
}

int cmd_channel_check(const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    set_threads(options.threads);
    const RawConfig raw = load_raw_config(options);
    const auto points = expand_sweeps(raw);
    if (points.size() != 1) throw ConfigError("channel-check does not take sweeps");
    const ExperimentConfig cfg = to_experiment(points.front().values);
    const auto& c = cfg.channel_check;
    const auto results = run_channel_checks(
        ChannelCheckOptions{c.draws, c.mc_samples, c.seed, c.inject_wrong_dephasing});
    json report;
    bool all = true;
    json props = json::array();
    for (const auto& r : results) {
      all = all && r.passed;
      props.push_back({{"name", r.name},
                       {"passed", r.passed},
                       {"max_deviation", r.max_deviation},
                       {"tolerance", r.tolerance},
                       {"detail", r.detail}});
    }
    report["passed"] = all;
    report["draws"] = c.draws;
    report["mc_samples"] = c.mc_samples;
    report["seed"] = c.seed;
    report["properties"] = props;
    const std::string text = report.dump(2) + "\n";
    if (options.output_dir || raw.count("output.dir")) {
      fs::create_directories(cfg.output_dir);
      write_text(cfg.output_dir / "channel_check.json", text);
    }
    out << text;
    if (!all) {
      for (const auto& r : results) {
        if (!r.passed) err << "property failed: " << r.name << " (max deviation "
                           << num(r.max_deviation) << ", tolerance " << num(r.tolerance) << ")\n";
      }
      return kExitFailure;
    }
    return kExitOk;
  });
}

int cmd_estimate(const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RawConfig raw = load_raw_config(options);
    const auto points = expand_sweeps(raw);
    if (points.size() != 1) throw ConfigError("estimate-resources does not take sweeps");
    const ExperimentConfig cfg = to_experiment(points.front().values);
    const EstimatorConfig& e = cfg.estimator;

    const auto split = qec::budget_split(e.epsilon);
    const auto tiles = qec::logical_tiles(e.q_alg);
    const double patch_cycles = static_cast<double>(tiles) * e.logical_cycles;
    const auto rate = qec::required_rate(split.eps_log, patch_cycles);
    const int d = qec::choose_distance(e.p_phys, rate.exact, e.p_star, e.coeff);
    const double eps_l = qec::logical_error_rate(e.p_phys, d, e.p_star, e.coeff);
    const auto qubits = qec::data_qubits(e.q_alg, d);

    const double r = qec::rotation_error_from_t(e.eps_t, e.eps_synth, e.t_scaling);
    const double p_depol = qec::depol_from_gate_error(r);
    const double bound = qec::shot_noise_bound(e.shots, e.bernoulli_p);

    json j;
    j["budget"] = {{"epsilon", e.epsilon},
                   {"eps_log", split.eps_log},
                   {"eps_dis", split.eps_dis},
                   {"eps_syn", split.eps_syn}};
    j["surface_code"] = {{"p_phys", e.p_phys},
                         {"logical_tiles", tiles},
                         {"logical_cycles", e.logical_cycles},
                         {"patch_cycles", patch_cycles},
                         {"required_rate_exact", rate.exact},
                         {"required_rate_linearized", rate.linearized},
                         {"distance", d},
                         {"logical_error_rate", eps_l},
                         {"data_qubits", qubits}};
    json costs = json::array();
    std::string cost_table;
    for (int L = 0; L <= e.max_layers; ++L) {
      try {
        const auto c = qec::spacetime_product(e.protocol, L, e.spatial_form);
        costs.push_back(cost_json(c));
        cost_table += "  L=" + std::to_string(L) + "  spatial " + num(c.spatial) + " d^2  temporal " +
                      num(c.temporal) + " d  spacetime " + num(c.spacetime) + " d^3  p_out " +
                      num(c.p_out) + "\n";
      } catch (const qec::UnreachableError& ex) {
        costs.push_back({{"layers", L}, {"error", ex.what()}});
        cost_table += "  L=" + std::to_string(L) + "  not suppressing: " + ex.what() + "\n";
      }
    }
    j["distillation"] = {{"protocol",
                          {{"m_x", e.protocol.m_x},
                           {"n", e.protocol.n_consume},
                           {"k", e.protocol.k_out},
                           {"d", e.protocol.d},
                           {"c", e.protocol.c_const},
                           {"p0", e.protocol.p0}}},
                         {"spatial_form", e.spatial_form == qec::SpatialForm::kTable ? "table" : "text"},
                         {"costs", costs}};
    j["conversion_chain"] = {{"eps_t", e.eps_t},
                             {"eps_synth", e.eps_synth},
                             {"t_scaling", e.t_scaling},
                             {"gate_error_r", r},
                             {"p_depol", p_depol},
                             {"rb_decay", qec::rb_decay(p_depol)}};
    j["shot_noise"] = {{"shots", e.shots}, {"bernoulli_p", e.bernoulli_p}, {"delta_loss", bound}};
    json catalog = json::array();
    for (const auto& row : qec::protocol_catalog()) {
      catalog.push_back({{"protocol", row.protocol},
                         {"distance", row.distance ? json(*row.distance) : json(nullptr)},
                         {"space_d2", row.space_d2},
                         {"time_d", row.time_d},
                         {"p_distilled", row.p_distilled ? json(*row.p_distilled) : json("p")}});
    }
    j["reference_catalog"] = catalog;

    std::ostringstream text;
    text << "error budget " << num(e.epsilon) << " split into thirds of " << num(split.eps_log)
         << "\n"
         << "surface code: p = " << num(e.p_phys) << ", " << tiles << " logical tiles x "
         << num(e.logical_cycles) << " cycles\n"
         << "  required logical rate " << num(rate.exact) << " (linearized "
         << num(rate.linearized) << ")\n"
         << "  distance " << d << ", logical error rate " << num(eps_l) << ", data qubits "
         << qubits << "\n"
         << "distillation costs:\n"
         << cost_table << "conversion chain: eps_T " << num(e.eps_t) << ", eps " << num(e.eps_synth)
         << ", scaling " << num(e.t_scaling) << " -> r " << num(r) << " -> p_depol "
         << num(p_depol) << "\n"
         << "shot-noise bound at N = " << num(e.shots) << ": " << num(bound) << "\n";
    out << text.str();

    if (options.output_dir || raw.count("output.dir")) {
      const auto started = utc_now();
      fs::create_directories(cfg.output_dir);
      write_text(cfg.output_dir / "estimate.txt", text.str());
      write_text(cfg.output_dir / "estimate.json", j.dump(2) + "\n");
      write_text(cfg.output_dir / "config.resolved", resolved_text(cfg));
      write_manifest(cfg.output_dir, "estimate-resources", json::object(), 0.0, started);
    } else {
      out << j.dump(2) << "\n";
    }
    return kExitOk;
  });
}

int cmd_dataset(const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto started = utc_now();
    const RawConfig raw = load_raw_config(options);
    const auto points = expand_sweeps(raw);
    if (points.size() != 1) throw ConfigError("dataset does not take sweeps");
    const ExperimentConfig cfg = to_experiment(points.front().values);
    auto [train_set, test_set] = prepare_datasets(cfg.dataset, cfg.model.n_qubits);
    fs::create_directories(cfg.output_dir);
    write_container(train_set, cfg.output_dir / "train.pqds");
    write_container(test_set, cfg.output_dir / "test.pqds");
    write_text(cfg.output_dir / "config.resolved", resolved_text(cfg));

    json stats;
    for (const auto& [name, d] : {std::pair<const char*, const Dataset*>{"train", &train_set},
                                  {"test", &test_set}}) {
      std::map<int, std::size_t> per_class;
      double lo = 1.0, hi = 0.0;
      for (const auto& s : d->samples) {
        ++per_class[s.label];
        for (double v : s.pixels) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      json counts = json::object();
      for (const auto& [label, count] : per_class) counts[std::to_string(label)] = count;
      stats[name] = {{"count", d->size()},
                     {"rows", d->rows},
                     {"cols", d->cols},
                     {"num_classes", d->num_classes},
                     {"per_class", counts},
                     {"pixel_min", d->size() ? lo : 0.0},
                     {"pixel_max", d->size() ? hi : 0.0}};
    }
    write_text(cfg.output_dir / "stats.json", stats.dump(2) + "\n");
    write_manifest(cfg.output_dir, "dataset", json::object(), 0.0, started);
    out << stats.dump(2) << "\n";
    return kExitOk;
  });
}

}  // namespace pqvc
