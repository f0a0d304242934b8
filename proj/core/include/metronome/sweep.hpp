#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "metronome/metrics.hpp"
#include "metronome/scenario.hpp"

namespace metronome {

struct SweepPoint {
  std::string value;
  std::optional<metrics::SimulationReport> report;
  std::string error;  // set when the point failed
};

struct SweepResult {
  std::string key;
  std::vector<SweepPoint> points;  // same order as the requested values
};

// Runs one independent simulation per value of `key`. Points may run on
// `parallelism` worker threads; the result does not depend on it. A
// failing point is recorded and the sweep continues.
SweepResult run_sweep(const ScenarioConfig& base, const std::string& key,
                      const std::vector<std::string>& values, int parallelism = 1,
                      bool keep_cycles = false);

void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

}  // namespace metronome
