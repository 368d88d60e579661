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

// Command line front end. Exit codes: 0 success, 1 configuration error,
// 2 runtime failure, 3 suite finished with failed episodes.

#include <taprecon/taprecon.h>

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace
{

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitPartial = 3;

struct StatusError
{
  taprecon_status status;
};

void check(taprecon_status status)
{
  if (status != TAPRECON_OK) {
    throw StatusError{status};
  }
}

int exit_code(taprecon_status status)
{
  switch (status) {
    case TAPRECON_OK:
      return 0;
    case TAPRECON_ERR_CONFIG:
      return kExitConfig;
    case TAPRECON_ERR_PARTIAL:
      return kExitPartial;
    default:
      return kExitRuntime;
  }
}

using ConfigPtr = std::unique_ptr<taprecon_config, decltype(&taprecon_config_destroy)>;

struct ConfigOptions
{
  std::string file;
  std::string preset;
  std::map<std::string, std::string> overrides;
  std::vector<std::string> sets;

  void attach(CLI::App * app)
  {
    auto * file_opt = app->add_option("-c,--config", file, "INI configuration file")->check(CLI::ExistingFile);
    app->add_option("--preset", preset, "start from a preset: paper, patch, convergence, policy")
      ->excludes(file_opt);
    app->add_option("--set", sets, "override any key: section.key=value")->take_all();
    for (std::size_t i = 0; i < taprecon_config_key_count(); ++i) {
      const std::string key = taprecon_config_key_name(i);
      app->add_option_function<std::string>(
           "--" + key, [this, key](const std::string & v) { overrides[key] = v; }, taprecon_config_key_help(i))
        ->group("Config overrides");
    }
  }

  ConfigPtr build() const
  {
    taprecon_config * raw = nullptr;
    if (!file.empty()) {
      check(taprecon_config_load(file.c_str(), &raw));
    } else if (!preset.empty()) {
      check(taprecon_config_create_preset(preset.c_str(), &raw));
    } else {
      check(taprecon_config_create(&raw));
    }
    ConfigPtr cfg(raw, &taprecon_config_destroy);
    for (const auto & [key, value] : overrides) {
      check(taprecon_config_set(cfg.get(), key.c_str(), value.c_str()));
    }
    for (const auto & kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw CLI::ValidationError("--set", "expected section.key=value, got '" + kv + "'");
      }
      check(taprecon_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    return cfg;
  }
};

std::string get_value(const taprecon_config * cfg, const char * key)
{
  std::size_t needed = 0;
  taprecon_config_get(cfg, key, nullptr, 0, &needed);
  std::string buf(needed, '\0');
  check(taprecon_config_get(cfg, key, buf.data(), buf.size(), &needed));
  buf.resize(needed - 1);
  return buf;
}

std::string serialize(const taprecon_config * cfg)
{
  std::size_t needed = 0;
  taprecon_config_serialize(cfg, nullptr, 0, &needed);
  std::string buf(needed, '\0');
  check(taprecon_config_serialize(cfg, buf.data(), buf.size(), &needed));
  buf.resize(needed - 1);
  return buf;
}

std::string first_item(const std::string & list, char sep)
{
  const auto end = list.find(sep);
  std::string item = list.substr(0, end);
  const auto b = item.find_first_not_of(" \t");
  const auto e = item.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : item.substr(b, e - b + 1);
}

std::optional<taprecon_policy> policy_from_name(const std::string & name)
{
  if (name == "active") {
    return TAPRECON_POLICY_ACTIVE;
  }
  if (name == "pure_uncertainty" || name == "uncertainty") {
    return TAPRECON_POLICY_PURE_UNCERTAINTY;
  }
  if (name == "random") {
    return TAPRECON_POLICY_RANDOM;
  }
  return std::nullopt;
}

int report(taprecon_status status)
{
  std::fprintf(stderr, "taprecon: %s: %s\n", taprecon_status_string(status), taprecon_last_error());
  return exit_code(status);
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Tactile super-resolution by Kalman filtering of taps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(taprecon_version()));

  ConfigOptions run_cfg, suite_cfg, validate_cfg;

  auto * run = app.add_subcommand("run", "run one episode");
  run_cfg.attach(run);
  std::string surface, policy, stem = "episode";
  std::optional<std::uint64_t> seed;
  run->add_option("--surface", surface, "shape descriptor or image (default: first experiment surface)");
  run->add_option("--policy", policy, "active, pure_uncertainty or random (default: explorer.policy)");
  run->add_option("--seed", seed, "seed (default: first experiment seed)");
  run->add_option("--stem", stem, "file stem for the episode artifacts")->capture_default_str();

  auto * suite = app.add_subcommand("suite", "run surfaces x policies x seeds");
  suite_cfg.attach(suite);

  auto * render = app.add_subcommand("render", "turn an episode CSV into curve data and image grids");
  std::string csv, out_dir;
  render->add_option("csv", csv, "episode CSV")->required()->check(CLI::ExistingFile);
  render->add_option("-o,--output", out_dir, "output directory (default: next to the CSV)");

  auto * validate = app.add_subcommand("validate", "check a configuration");
  validate_cfg.attach(validate);
  bool print = false;
  validate->add_flag("--print", print, "print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      const ConfigPtr cfg = run_cfg.build();
      if (surface.empty()) {
        surface = first_item(get_value(cfg.get(), "experiment.surfaces"), ';');
      }
      if (policy.empty()) {
        policy = get_value(cfg.get(), "explorer.policy");
      }
      const auto p = policy_from_name(policy);
      if (!p) {
        std::fprintf(stderr, "taprecon: unknown policy '%s'\n", policy.c_str());
        return kExitConfig;
      }
      if (!seed) {
        seed = std::stoull(first_item(get_value(cfg.get(), "experiment.seeds"), ','));
      }
      taprecon_episode_summary summary{};
      check(taprecon_run_episode(cfg.get(), surface.c_str(), *p, *seed, stem.c_str(), &summary));
      std::printf(
        "taps %ld  ssim_state %.4f  mse_state %.6f  trace %.4f  update %.1f ms  scoring %.1f ms\n", summary.taps,
        summary.final_ssim_state, summary.final_mse_state, summary.final_trace, summary.update_ms_total,
        summary.scoring_ms_total);
      std::printf("wrote %s/%s.csv\n", get_value(cfg.get(), "experiment.output_dir").c_str(), stem.c_str());
    } else if (*suite) {
      const ConfigPtr cfg = suite_cfg.build();
      taprecon_suite_summary summary{};
      const taprecon_status status = taprecon_run_suite(cfg.get(), &summary);
      if (status != TAPRECON_OK && status != TAPRECON_ERR_PARTIAL) {
        return report(status);
      }
      std::printf(
        "%zu episodes, %zu failed; summary in %s/summary.csv\n", summary.episodes, summary.failed,
        get_value(cfg.get(), "experiment.output_dir").c_str());
      if (status == TAPRECON_ERR_PARTIAL) {
        return report(status);
      }
    } else if (*render) {
      check(taprecon_render(csv.c_str(), out_dir.empty() ? nullptr : out_dir.c_str()));
    } else if (*validate) {
      const ConfigPtr cfg = validate_cfg.build();
      check(taprecon_config_validate(cfg.get()));
      if (print) {
        std::fputs(serialize(cfg.get()).c_str(), stdout);
      } else {
        std::printf("configuration is valid\n");
      }
    }
  } catch (const StatusError & e) {
    return report(e.status);
  } catch (const CLI::ValidationError & e) {
    std::fprintf(stderr, "taprecon: %s\n", e.what());
    return kExitConfig;
  }
  return 0;
}
