#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "metronome/scenario.hpp"

namespace metronome {

// Flat key=value scenario format:
//
//   # comment
//   m_threads=3
//   t_long=500us          durations: ns, us, ms, s (decimals allowed)
//   rate=14.88mpps        rates: pps, kpps, mpps, gpps
//   load=0.8              shorthand for rate = load * mu
//
// Later assignments override earlier ones. Parsing collects every
// problem (unknown keys, bad units, missing keys, invariant violations)
// and throws a single ConfigError listing all of them.

using KeyValue = std::pair<std::string, std::string>;

ScenarioConfig parse_config(std::string_view text,
                            const std::vector<KeyValue>& overrides = {});

// Serializes every key; parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const ScenarioConfig& config);

struct KeyInfo {
  std::string name;
  std::string help;
};

const std::vector<KeyInfo>& config_keys();

// Unit parsing, exposed for reuse by the CLI.
std::optional<SimDuration> parse_duration(std::string_view text);
std::optional<double> parse_rate(std::string_view text);
std::string format_duration(SimDuration d);

struct PresetInfo {
  std::string name;
  std::string description;
};

const std::vector<PresetInfo>& presets();
std::optional<std::string> preset_text(std::string_view name);
ScenarioConfig preset_config(std::string_view name,
                             const std::vector<KeyValue>& overrides = {});

}  // namespace metronome
