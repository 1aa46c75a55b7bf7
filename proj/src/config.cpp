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

#include "pqvc/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "pqvc/errors.hpp"

namespace pqvc {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool is_list(const std::string& v) { return v.size() >= 2 && v.front() == '[' && v.back() == ']'; }

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v.substr(1, v.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty entry in list " + v);
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError("empty sweep list");
  return out;
}

std::string fmt(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

std::string fmt(std::int64_t x) { return std::to_string(x); }
std::string fmt(bool b) { return b ? "true" : "false"; }

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return x;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec == std::errc() && r.ptr == v.data() + v.size()) return x;
  // Accept integral values written in exponent form, e.g. 1e6.
  const double d = parse_double(key, v);
  if (d != static_cast<double>(static_cast<std::int64_t>(d))) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return static_cast<std::int64_t>(d);
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  const std::int64_t x = parse_int(key, v);
  if (x < 0) throw ConfigError(key + ": must be non-negative");
  return static_cast<std::size_t>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

template <typename E>
E parse_enum(const std::string& key, const std::string& v,
             std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [name, value] : options) {
    if (v == name) return value;
    names += names.empty() ? name : std::string("|") + name;
  }
  throw ConfigError(key + ": expected one of " + names + ", got '" + v + "'");
}

template <typename E>
std::string enum_name(E v, std::initializer_list<std::pair<const char*, E>> options) {
  for (const auto& [name, value] : options) {
    if (v == value) return name;
  }
  return "?";
}

const std::initializer_list<std::pair<const char*, Placement>> kPlacements = {
    {"per_gate", Placement::kPerGate}, {"per_factor", Placement::kPerFactor}};
const std::initializer_list<std::pair<const char*, Readout>> kReadouts = {
    {"quantum", Readout::kQuantumOnly}, {"classical", Readout::kClassical}};
const std::initializer_list<std::pair<const char*, Entangler>> kEntanglers = {
    {"chain", Entangler::kChain}, {"ring", Entangler::kRing}};
const std::initializer_list<std::pair<const char*, GradMethod>> kGradMethods = {
    {"parameter_shift", GradMethod::kParameterShift},
    {"finite_difference", GradMethod::kFiniteDifference}};
const std::initializer_list<std::pair<const char*, Encoding>> kEncodings = {
    {"amplitude", Encoding::kAmplitude}, {"compressed", Encoding::kCompressed}};
const std::initializer_list<std::pair<const char*, DatasetConfig::Kind>> kKinds = {
    {"synthetic", DatasetConfig::Kind::kSynthetic}, {"idx", DatasetConfig::Kind::kIdx}};
const std::initializer_list<std::pair<const char*, qec::SpatialForm>> kSpatialForms = {
    {"table", qec::SpatialForm::kTable}, {"text", qec::SpatialForm::kText}};

struct Field {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define PQVC_DOUBLE(KEY, EXPR)                                                 \
  Field {                                                                      \
    KEY, [](const ExperimentConfig& c) { return fmt(static_cast<double>(c.EXPR)); }, \
        [](ExperimentConfig& c, const std::string& v) { c.EXPR = parse_double(KEY, v); } \
  }
#define PQVC_INT(KEY, EXPR)                                                            \
  Field {                                                                              \
    KEY, [](const ExperimentConfig& c) { return fmt(static_cast<std::int64_t>(c.EXPR)); }, \
        [](ExperimentConfig& c, const std::string& v) {                               \
          c.EXPR = static_cast<decltype(c.EXPR)>(parse_int(KEY, v));                  \
        }                                                                              \
  }
#define PQVC_COUNT(KEY, EXPR)                                                          \
  Field {                                                                              \
    KEY, [](const ExperimentConfig& c) { return fmt(static_cast<std::int64_t>(c.EXPR)); }, \
        [](ExperimentConfig& c, const std::string& v) {                               \
          c.EXPR = static_cast<decltype(c.EXPR)>(parse_count(KEY, v));                \
        }                                                                              \
  }
#define PQVC_BOOL(KEY, EXPR)                                               \
  Field {                                                                  \
    KEY, [](const ExperimentConfig& c) { return fmt(static_cast<bool>(c.EXPR)); }, \
        [](ExperimentConfig& c, const std::string& v) { c.EXPR = parse_bool(KEY, v); } \
  }
#define PQVC_ENUM(KEY, EXPR, TABLE)                                                  \
  Field {                                                                            \
    KEY, [](const ExperimentConfig& c) { return enum_name(c.EXPR, TABLE); },         \
        [](ExperimentConfig& c, const std::string& v) { c.EXPR = parse_enum(KEY, v, TABLE); } \
  }
#define PQVC_STRING(KEY, EXPR)                                                   \
  Field {                                                                        \
    KEY, [](const ExperimentConfig& c) { return c.EXPR.string(); },              \
        [](ExperimentConfig& c, const std::string& v) { c.EXPR = v; }            \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      PQVC_INT("model.n_qubits", model.n_qubits),
      PQVC_INT("model.n_layers", model.n_layers),
      PQVC_COUNT("model.shots", model.shots),
      PQVC_ENUM("model.readout", model.readout, kReadouts),
      PQVC_ENUM("model.entangler", model.entangler, kEntanglers),
      PQVC_INT("model.num_classes", model.num_classes),
      PQVC_BOOL("model.joint_sampling", model.joint_sampling),

      PQVC_DOUBLE("noise.p_depol", model.noise.single.p_depol),
      PQVC_ENUM("noise.depol_placement", model.noise.single.depol_placement, kPlacements),
      PQVC_BOOL("noise.phase_damping", model.noise.single.phase_damping),
      PQVC_DOUBLE("noise.mu", model.noise.single.mu),
      PQVC_DOUBLE("noise.sigma", model.noise.single.sigma),
      PQVC_ENUM("noise.phase_placement", model.noise.single.phase_placement, kPlacements),
      PQVC_BOOL("noise.thermal", model.noise.single.thermal),
      PQVC_DOUBLE("noise.t_tilde", model.noise.single.t_tilde),
      PQVC_DOUBLE("noise.gamma", model.noise.single.gamma),
      Field{"noise.two_qubit",
            [](const ExperimentConfig& c) { return fmt(c.model.noise.two_qubit.has_value()); },
            [](ExperimentConfig& c, const std::string& v) {
              if (parse_bool("noise.two_qubit", v)) {
                c.model.noise.two_qubit = c.two_qubit_strengths;
              } else {
                c.model.noise.two_qubit.reset();
              }
            }},
      Field{"noise.two_qubit_p_depol",
            [](const ExperimentConfig& c) {
              return fmt(c.model.noise.two_qubit.value_or(c.two_qubit_strengths)
                             .p_depol);
            },
            [](ExperimentConfig& c, const std::string& v) {
              const double x = parse_double("noise.two_qubit_p_depol", v);
              if (c.model.noise.two_qubit) c.model.noise.two_qubit->p_depol = x;
              c.two_qubit_strengths.p_depol = x;
            }},
      Field{"noise.two_qubit_alpha",
            [](const ExperimentConfig& c) {
              return fmt(c.model.noise.two_qubit.value_or(c.two_qubit_strengths)
                             .alpha);
            },
            [](ExperimentConfig& c, const std::string& v) {
              const double x = parse_double("noise.two_qubit_alpha", v);
              if (c.model.noise.two_qubit) c.model.noise.two_qubit->alpha = x;
              c.two_qubit_strengths.alpha = x;
            }},

      PQVC_DOUBLE("train.learning_rate", train.learning_rate),
      PQVC_COUNT("train.batch_size", train.batch_size),
      PQVC_DOUBLE("train.beta1", train.adam.beta1),
      PQVC_DOUBLE("train.beta2", train.adam.beta2),
      PQVC_DOUBLE("train.epsilon", train.adam.epsilon),
      PQVC_COUNT("train.max_images", train.max_images),
      PQVC_COUNT("train.eval_every", train.eval_every),
      PQVC_ENUM("train.grad_method", train.grad_method, kGradMethods),
      PQVC_BOOL("train.compensate_phase_mean", compensate_phase_mean),

      PQVC_ENUM("dataset.kind", dataset.kind, kKinds),
      PQVC_STRING("dataset.images", dataset.images),
      PQVC_STRING("dataset.labels", dataset.labels),
      PQVC_STRING("dataset.test_images", dataset.test_images),
      PQVC_STRING("dataset.test_labels", dataset.test_labels),
      PQVC_COUNT("dataset.target_pixels", dataset.target_pixels),
      PQVC_ENUM("dataset.encoding", dataset.encoding, kEncodings),
      PQVC_COUNT("dataset.seed", dataset.seed),
      PQVC_INT("dataset.num_classes", dataset.num_classes),
      PQVC_COUNT("dataset.samples_per_class", dataset.samples_per_class),
      PQVC_DOUBLE("dataset.noise_amplitude", dataset.noise_amplitude),
      PQVC_COUNT("dataset.test_count", dataset.test_count),
      PQVC_INT("dataset.max_label", dataset.max_label),

      PQVC_DOUBLE("estimator.epsilon", estimator.epsilon),
      PQVC_INT("estimator.q_alg", estimator.q_alg),
      PQVC_DOUBLE("estimator.p_phys", estimator.p_phys),
      PQVC_DOUBLE("estimator.p_star", estimator.p_star),
      PQVC_DOUBLE("estimator.coeff", estimator.coeff),
      PQVC_DOUBLE("estimator.logical_cycles", estimator.logical_cycles),
      PQVC_DOUBLE("estimator.eps_t", estimator.eps_t),
      PQVC_DOUBLE("estimator.eps_synth", estimator.eps_synth),
      PQVC_DOUBLE("estimator.t_scaling", estimator.t_scaling),
      PQVC_DOUBLE("estimator.shots", estimator.shots),
      PQVC_DOUBLE("estimator.bernoulli_p", estimator.bernoulli_p),
      PQVC_INT("estimator.max_layers", estimator.max_layers),
      PQVC_INT("estimator.m_x", estimator.protocol.m_x),
      PQVC_INT("estimator.n", estimator.protocol.n_consume),
      PQVC_INT("estimator.k", estimator.protocol.k_out),
      PQVC_INT("estimator.d", estimator.protocol.d),
      PQVC_DOUBLE("estimator.c", estimator.protocol.c_const),
      PQVC_DOUBLE("estimator.p0", estimator.protocol.p0),
      PQVC_ENUM("estimator.spatial_form", estimator.spatial_form, kSpatialForms),

      PQVC_COUNT("channel_check.draws", channel_check.draws),
      PQVC_COUNT("channel_check.mc_samples", channel_check.mc_samples),
      PQVC_COUNT("channel_check.seed", channel_check.seed),
      PQVC_BOOL("channel_check.inject_wrong_dephasing", channel_check.inject_wrong_dephasing),

      PQVC_STRING("output.dir", output_dir),
      PQVC_BOOL("output.record_wall_time", record_wall_time),

      PQVC_COUNT("seeds.params", train.seed_params),
      PQVC_COUNT("seeds.shots", train.seed_shots),
      PQVC_COUNT("seeds.batches", train.seed_batches),
  };
  return table;
}

#undef PQVC_DOUBLE
#undef PQVC_INT
#undef PQVC_COUNT
#undef PQVC_BOOL
#undef PQVC_ENUM
#undef PQVC_STRING

const Field* find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

ExperimentConfig defaults() {
  ExperimentConfig c;
  c.model.n_qubits = 6;
  c.model.n_layers = 4;
  c.model.num_classes = 4;
  c.train.max_images = 400;
  c.train.eval_every = 100;
  return c;
}

}  // namespace

RawConfig parse_config_text(const std::string& text) {
  RawConfig raw;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!find_field(key)) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (value.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    }
    raw[key] = value;
  }
  return raw;
}

RawConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void apply_override(RawConfig& raw, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must be KEY=VALUE: " + assignment);
  const std::string key = trim(std::string_view(assignment).substr(0, eq));
  const std::string value = trim(std::string_view(assignment).substr(eq + 1));
  if (!find_field(key)) throw ConfigError("unknown override key '" + key + "'");
  if (value.empty()) throw ConfigError("empty override value for '" + key + "'");
  raw[key] = value;
}

std::vector<SweepPoint> expand_sweeps(const RawConfig& raw) {
  std::vector<SweepPoint> points{SweepPoint{"", {}}};
  for (const auto& [key, value] : raw) {
    if (!is_list(value)) {
      for (auto& p : points) p.values[key] = value;
      continue;
    }
    std::vector<SweepPoint> next;
    for (const auto& p : points) {
      for (const auto& item : split_list(value)) {
        SweepPoint q = p;
        q.values[key] = item;
        q.label += (q.label.empty() ? "" : ",") + key + "=" + item;
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

ExperimentConfig to_experiment(const RawConfig& raw) {
  ExperimentConfig c = defaults();
  // The two-qubit toggle is applied last so its strengths can appear in any order.
  std::optional<std::string> toggle;
  for (const auto& [key, value] : raw) {
    if (is_list(value)) throw ConfigError(key + ": sweep lists must be expanded first");
    if (key == "noise.two_qubit") {
      toggle = value;
      continue;
    }
    find_field(key)->set(c, value);
  }
  if (toggle) {
    find_field("noise.two_qubit")->set(c, *toggle);
  }
  c.model.noise.single.depolarizing = c.model.noise.single.p_depol > 0.0;
  try {
    c.model.validate();
    c.train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

std::string resolved_text(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> lines;
  for (const auto& f : fields()) {
    // Unset paths are left out so the text parses back.
    std::string v = f.get(cfg);
    if (!v.empty()) lines.emplace_back(f.key, std::move(v));
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& [k, v] : lines) out += k + " = " + v + "\n";
  return out;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    std::sort(k.begin(), k.end());
    return k;
  }();
  return keys;
}

}  // namespace pqvc
