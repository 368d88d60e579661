// Copyright 2026 The taprecon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/config.hpp"

#include "core/error.hpp"
#include "core/metrics.hpp"
#include "core/simulator.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace taprecon
{

namespace
{

std::string trim(const std::string & s)
{
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void bad_value(const std::string & key, const std::string & value, const std::string & expected)
{
  fail(ErrorCode::kConfig, key + ": cannot parse '" + value + "' as " + expected);
}

template <typename T>
T parse_number(const std::string & key, const std::string & raw, const char * expected)
{
  const std::string s = trim(raw);
  T value{};
  const char * end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc() || ptr != end) {
    bad_value(key, raw, expected);
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      bad_value(key, raw, expected);
    }
  }
  return value;
}

double parse_double(const std::string & key, const std::string & s) { return parse_number<double>(key, s, "a number"); }
long parse_long(const std::string & key, const std::string & s) { return parse_number<long>(key, s, "an integer"); }
int parse_int(const std::string & key, const std::string & s) { return parse_number<int>(key, s, "an integer"); }

bool parse_bool(const std::string & key, const std::string & raw)
{
  const std::string s = lower(trim(raw));
  if (s == "true" || s == "1" || s == "yes" || s == "on") {
    return true;
  }
  if (s == "false" || s == "0" || s == "no" || s == "off") {
    return false;
  }
  bad_value(key, raw, "a boolean");
}

std::vector<std::string> split(const std::string & s, char sep)
{
  std::vector<std::string> out;
  if (trim(s).empty()) {
    return out;
  }
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    out.push_back(trim(item));
  }
  return out;
}

Policy parse_policy_value(const std::string & key, const std::string & s)
{
  const auto p = parse_policy(trim(s));
  if (!p) {
    bad_value(key, s, "a policy (active, pure_uncertainty, random)");
  }
  return *p;
}

std::vector<std::uint64_t> parse_seeds(const std::string & key, const std::string & s)
{
  std::vector<std::uint64_t> seeds;
  for (const auto & item : split(s, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(parse_number<std::uint64_t>(key, item, "a seed"));
      continue;
    }
    const auto lo = parse_number<std::uint64_t>(key, item.substr(0, dots), "a seed range");
    const auto hi = parse_number<std::uint64_t>(key, item.substr(dots + 2), "a seed range");
    if (hi < lo || hi - lo >= 1000000) {
      bad_value(key, item, "a seed range lo..hi");
    }
    for (std::uint64_t v = lo; v <= hi; ++v) {
      seeds.push_back(v);
    }
  }
  return seeds;
}

template <typename T, typename F>
std::string join(const std::vector<T> & items, const char * sep, F && fmt)
{
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += (i ? sep : "") + fmt(items[i]);
  }
  return out;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

struct KeyDef
{
  std::string key;
  std::string help;
  std::function<std::string(const ExperimentConfig &)> get;
  std::function<void(ExperimentConfig &, const std::string &)> set;
};

template <typename Member>
KeyDef number_key(std::string key, std::string help, Member member)
{
  using T = std::remove_reference_t<decltype(std::declval<ExperimentConfig &>().*member)>;
  KeyDef def{std::move(key), std::move(help), {}, {}};
  def.get = [member](const ExperimentConfig & c) {
    if constexpr (std::is_floating_point_v<T>) {
      return format_number(c.*member);
    } else {
      return std::to_string(c.*member);
    }
  };
  def.set = [member, k = def.key](ExperimentConfig & c, const std::string & v) {
    if constexpr (std::is_floating_point_v<T>) {
      c.*member = parse_double(k, v);
    } else if constexpr (std::is_same_v<T, int>) {
      c.*member = parse_int(k, v);
    } else {
      c.*member = parse_long(k, v);
    }
  };
  return def;
}

KeyDef axis_array_key(std::string key, std::string help, std::array<double, 3> ExperimentConfig::*member, int axis)
{
  KeyDef def{std::move(key), std::move(help), {}, {}};
  def.get = [member, axis](const ExperimentConfig & c) { return format_number((c.*member)[axis]); };
  def.set = [member, axis, k = def.key](ExperimentConfig & c, const std::string & v) {
    (c.*member)[axis] = parse_double(k, v);
  };
  return def;
}

std::vector<KeyDef> build_keys()
{
  using C = ExperimentConfig;
  std::vector<KeyDef> keys;
  keys.push_back(number_key("grid.sensor_taxels", "LR taxels per side (N)", &C::sensor_taxels));
  keys.push_back(number_key("grid.hr_taxels", "HR taxels per side (M)", &C::hr_taxels));
  keys.push_back(number_key("grid.scale", "state side over sensor side (alpha)", &C::scale));
  keys.push_back(number_key("grid.sensor_side_mm", "physical sensor side in mm", &C::sensor_side_mm));

  keys.push_back(number_key("prior.amplitude", "prior kernel amplitude A", &C::prior_amplitude));
  keys.push_back(
    {"prior.length_scale_mm", "prior kernel length scale r in mm, or auto (two HR pitches)",
     [](const C & c) { return c.prior_length_scale_mm ? format_number(*c.prior_length_scale_mm) : "auto"; },
     [](C & c, const std::string & v) {
       if (lower(trim(v)) == "auto") {
         c.prior_length_scale_mm.reset();
       } else {
         c.prior_length_scale_mm = parse_double("prior.length_scale_mm", v);
       }
     }});
  keys.push_back(number_key("prior.mean", "prior mean height", &C::prior_mean));

  const char * axes[] = {"x", "y", "z"};
  for (int a = 0; a < 3; ++a) {
    keys.push_back(axis_array_key(
      std::string("sensor.gamma_") + axes[a], std::string("degradation width for the ") + axes[a] + " axis", &C::gamma,
      a));
  }
  keys.push_back(number_key("sensor.beta_c", "clip matrix kernel width", &C::beta_c));
  keys.push_back(number_key("sensor.clip_drop_tolerance", "clip weights below this are dropped", &C::clip_drop_tolerance));
  keys.push_back(number_key("sensor.sobel_scale", "multiplier on the Sobel operators", &C::sobel_scale));
  for (int a = 0; a < 3; ++a) {
    keys.push_back(axis_array_key(
      std::string("sensor.sigma_") + axes[a], std::string("observation noise std for the ") + axes[a] + " axis",
      &C::sigma, a));
  }
  for (int a = 0; a < 3; ++a) {
    const std::string key = std::string("sensor.use_") + axes[a];
    keys.push_back(
      {key, std::string("feed ") + axes[a] + "-axis readings to the filter",
       [a](const C & c) { return bool_text(c.use_axis[a]); },
       [a, key](C & c, const std::string & v) { c.use_axis[a] = parse_bool(key, v); }});
  }

  for (int a = 0; a < 3; ++a) {
    const std::string key = std::string("simulator.gamma_") + axes[a];
    keys.push_back(
      {key, std::string("simulator degradation width for ") + axes[a] + ", or same",
       [a](const C & c) { return c.simulator_gamma[a] ? format_number(*c.simulator_gamma[a]) : "same"; },
       [a, key](C & c, const std::string & v) {
         if (lower(trim(v)) == "same") {
           c.simulator_gamma[a].reset();
         } else {
           c.simulator_gamma[a] = parse_double(key, v);
         }
       }});
  }
  keys.push_back(
    {"simulator.noise", "add Gaussian noise to simulated readings",
     [](const C & c) { return bool_text(c.simulator_noise); },
     [](C & c, const std::string & v) { c.simulator_noise = parse_bool("simulator.noise", v); }});

  keys.push_back(number_key("explorer.lambda", "explore-then-exploit rate", &C::lambda));
  keys.push_back(
    {"explorer.policy", "policy for single runs: active, pure_uncertainty or random",
     [](const C & c) { return std::string(policy_name(c.policy)); },
     [](C & c, const std::string & v) { c.policy = parse_policy_value("explorer.policy", v); }});
  keys.push_back(number_key("explorer.dx_mm", "translation step of the action lattice", &C::dx_mm));
  keys.push_back(number_key("explorer.dtheta_deg", "rotation step of the action lattice in degrees", &C::dtheta_deg));
  keys.push_back(number_key("explorer.threads", "threads for action scoring", &C::threads));

  keys.push_back(number_key("experiment.taps", "taps per episode (T)", &C::taps));
  keys.push_back(
    {"experiment.seeds", "comma separated seeds; lo..hi expands to a range",
     [](const C & c) { return join(c.seeds, ", ", [](std::uint64_t s) { return std::to_string(s); }); },
     [](C & c, const std::string & v) { c.seeds = parse_seeds("experiment.seeds", v); }});
  keys.push_back(
    {"experiment.surfaces", "semicolon separated shape descriptors or image paths",
     [](const C & c) { return join(c.surfaces, "; ", [](const std::string & s) { return s; }); },
     [](C & c, const std::string & v) { c.surfaces = split(v, ';'); }});
  keys.push_back(
    {"experiment.policies", "comma separated policies for suites",
     [](const C & c) { return join(c.policies, ", ", [](Policy p) { return std::string(policy_name(p)); }); },
     [](C & c, const std::string & v) {
       c.policies.clear();
       for (const auto & item : split(v, ',')) {
         c.policies.push_back(parse_policy_value("experiment.policies", item));
       }
     }});
  keys.push_back(
    {"experiment.output_dir", "directory for episode artifacts",
     [](const C & c) { return c.output_dir; }, [](C & c, const std::string & v) { c.output_dir = trim(v); }});
  keys.push_back(
    {"experiment.snapshot_taps", "taps after which reconstructions are saved",
     [](const C & c) { return join(c.snapshot_taps, ", ", [](long t) { return std::to_string(t); }); },
     [](C & c, const std::string & v) {
       c.snapshot_taps.clear();
       for (const auto & item : split(v, ',')) {
         c.snapshot_taps.push_back(parse_long("experiment.snapshot_taps", item));
       }
     }});
  keys.push_back(
    {"experiment.image_format", "pgm or png", [](const C & c) { return c.image_format; },
     [](C & c, const std::string & v) { c.image_format = lower(trim(v)); }});
  keys.push_back(number_key("experiment.workers", "episodes run concurrently by a suite", &C::workers));
  return keys;
}

const std::vector<KeyDef> & key_table()
{
  static const std::vector<KeyDef> table = build_keys();
  return table;
}

const KeyDef & find_key(const std::string & key)
{
  for (const auto & def : key_table()) {
    if (def.key == key) {
      return def;
    }
  }
  fail(ErrorCode::kConfig, "unknown config key '" + key + "'");
}

}  // namespace

GridSpec ExperimentConfig::grid() const
{
  return GridSpec::create(sensor_taxels, hr_taxels, scale, sensor_side_mm);
}

double ExperimentConfig::effective_length_scale() const
{
  return prior_length_scale_mm ? *prior_length_scale_mm : 2.0 * sensor_side_mm / hr_taxels;
}

PriorConfig ExperimentConfig::prior() const { return {prior_amplitude, effective_length_scale(), prior_mean}; }

SensorParams ExperimentConfig::sensor_params() const
{
  SensorParams p;
  p.gamma = gamma;
  p.beta_c = beta_c;
  p.clip_drop_tolerance = clip_drop_tolerance;
  p.sobel_scale = sobel_scale;
  p.noise.sigma = sigma;
  return p;
}

SensorParams ExperimentConfig::simulator_params() const
{
  SensorParams p = sensor_params();
  for (int a = 0; a < 3; ++a) {
    p.gamma[a] = simulator_gamma[a].value_or(gamma[a]);
  }
  return p;
}

TapUpdateOptions ExperimentConfig::tap_options() const
{
  TapUpdateOptions o;
  o.enabled = use_axis;
  return o;
}

double ExperimentConfig::dtheta_rad() const { return dtheta_deg * std::numbers::pi / 180.0; }

const std::vector<std::string> & config_keys()
{
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto & def : key_table()) {
      k.push_back(def.key);
    }
    return k;
  }();
  return keys;
}

const std::string & config_key_help(const std::string & key) { return find_key(key).help; }

void set_config_value(ExperimentConfig & cfg, const std::string & key, const std::string & value)
{
  find_key(key).set(cfg, value);
}

std::string get_config_value(const ExperimentConfig & cfg, const std::string & key) { return find_key(key).get(cfg); }

ExperimentConfig parse_config(const std::string & text)
{
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error & e) {
    fail(ErrorCode::kConfig, std::string("config syntax: ") + e.what());
  }
  ExperimentConfig cfg;
  for (const auto & [section, body] : tree) {
    if (body.empty()) {
      fail(ErrorCode::kConfig, "config key '" + section + "' must live in a section");
    }
    for (const auto & [name, value] : body) {
      set_config_value(cfg, section + "." + name, value.data());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kConfig, "cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const ExperimentConfig & cfg)
{
  std::ostringstream out;
  std::string section;
  for (const auto & def : key_table()) {
    const auto dot = def.key.find('.');
    const std::string s = def.key.substr(0, dot);
    if (s != section) {
      out << (section.empty() ? "" : "\n") << '[' << s << "]\n";
      section = s;
    }
    out << def.key.substr(dot + 1) << " = " << def.get(cfg) << '\n';
  }
  return out.str();
}

ExperimentConfig preset_config(const std::string & name)
{
  ExperimentConfig cfg;
  const std::string n = lower(trim(name));
  if (n == "paper" || n.empty()) {
    return cfg;
  }
  if (n == "patch") {
    cfg.scale = 1.0;
    cfg.taps = 1;
    cfg.policies = {Policy::kActive};
    cfg.seeds = {1, 2, 3, 4, 5};
    cfg.surfaces = {"disk(0, 0, 6)", "cross(0, 0, 16, 4)", "ring(0, 0, 8, 5)", "rect(2, -1, 12, 6, 30)"};
    cfg.snapshot_taps = {1};
    return cfg;
  }
  if (n == "convergence") {
    cfg.simulator_noise = false;
    cfg.policies = {Policy::kActive};
    return cfg;
  }
  if (n == "policy") {
    cfg.seeds = parse_seeds("experiment.seeds", "1..10");
    cfg.surfaces = {"disk(0, 0, 10)", "cross(0, 0, 24, 6)", "ring(0, 0, 12, 7)"};
    return cfg;
  }
  fail(ErrorCode::kConfig, "unknown preset '" + name + "'");
}

const std::vector<std::string> & preset_names()
{
  static const std::vector<std::string> names = {"paper", "patch", "convergence", "policy"};
  return names;
}

void validate_config(const ExperimentConfig & cfg, bool check_sources)
{
  auto check = [](bool ok, const std::string & what) { require(ok, ErrorCode::kConfig, what); };
  check(cfg.sensor_taxels >= 1, "grid.sensor_taxels must be at least 1");
  check(cfg.hr_taxels > cfg.sensor_taxels, "grid.hr_taxels must exceed grid.sensor_taxels");
  check(cfg.hr_taxels >= 3, "grid.hr_taxels must be at least 3");
  GridSpec grid = [&] {
    try {
      return cfg.grid();
    } catch (const Error & e) {
      fail(ErrorCode::kConfig, std::string("grid: ") + e.what());
    }
  }();
  (void)grid;
  check(cfg.prior_amplitude > 0.0, "prior.amplitude must be positive");
  check(cfg.effective_length_scale() > 0.0, "prior.length_scale_mm must be positive");
  for (int a = 0; a < 3; ++a) {
    check(cfg.gamma[a] > 0.0, "sensor.gamma values must be positive");
    check(cfg.sigma[a] >= 0.0, "sensor.sigma values must be non-negative");
    check(!cfg.simulator_gamma[a] || *cfg.simulator_gamma[a] > 0.0, "simulator.gamma values must be positive");
  }
  check(cfg.use_axis[0] || cfg.use_axis[1] || cfg.use_axis[2], "at least one sensor axis must be used");
  check(cfg.beta_c > 0.0, "sensor.beta_c must be positive");
  check(cfg.clip_drop_tolerance >= 0.0 && cfg.clip_drop_tolerance < 1.0, "sensor.clip_drop_tolerance must be in [0, 1)");
  check(cfg.sobel_scale > 0.0, "sensor.sobel_scale must be positive");
  check(cfg.lambda >= 0.0, "explorer.lambda must be non-negative");
  check(cfg.dx_mm > 0.0, "explorer.dx_mm must be positive");
  check(cfg.dtheta_deg > 0.0 && cfg.dtheta_deg <= 90.0, "explorer.dtheta_deg must be in (0, 90]");
  check(cfg.threads >= 1, "explorer.threads must be at least 1");
  check(cfg.taps >= 1, "experiment.taps must be at least 1");
  check(!cfg.seeds.empty(), "experiment.seeds must not be empty");
  check(!cfg.surfaces.empty(), "experiment.surfaces must not be empty");
  check(!cfg.policies.empty(), "experiment.policies must not be empty");
  check(!cfg.output_dir.empty(), "experiment.output_dir must not be empty");
  check(cfg.image_format == "pgm" || cfg.image_format == "png", "experiment.image_format must be pgm or png");
  check(cfg.workers >= 1, "experiment.workers must be at least 1");
  for (long t : cfg.snapshot_taps) {
    check(t >= 1, "experiment.snapshot_taps must be at least 1");
  }
  if (!check_sources) {
    return;
  }
  for (const auto & source : cfg.surfaces) {
    check(!source.empty(), "experiment.surfaces contains an empty entry");
    if (source.find('(') != std::string::npos) {
      try {
        Shape::parse(source);
      } catch (const Error & e) {
        fail(ErrorCode::kConfig, e.what());
      }
    } else {
      check(std::filesystem::is_regular_file(source), "surface file does not exist: " + source);
    }
  }
}

}  // namespace taprecon
