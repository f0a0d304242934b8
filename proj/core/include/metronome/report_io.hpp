#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "metronome/metrics.hpp"
#include "metronome/scenario.hpp"

namespace metronome {

// Writes the report as flat CSVs plus summary.txt into `dir`:
//
//   cycles.csv                 cycle_id,queue,thread,V_ns,B_ns,N_V,N_B
//   threads.csv                per-thread tries and awake fraction
//   queues.csv                 per-queue cycle statistics, tries, rho
//   latency_histogram.csv      bin_lo_ns,bin_hi_ns,count
//   controller_trace.csv       time_ns,queue,rho_est,t_short_ns
//   windows.csv                window_start_ns,arrivals,served,dropped,...
//   vacation_hist.csv          empirical vacation histogram
//   vacation_pdf_analytic.csv  model density on the same bin edges
//   config.txt                 resolved scenario, re-parseable
//   summary.txt                human-readable digest
//
// Returns the paths written. Throws Error naming the path on I/O failure.
std::vector<std::filesystem::path> emit_report(const metrics::SimulationReport& report,
                                               const ScenarioConfig& config,
                                               const std::filesystem::path& dir);

void write_summary(std::ostream& out, const metrics::SimulationReport& report,
                   const ScenarioConfig& config);

// Regime used for model comparisons of a scenario: high-load law whenever
// there are backups to speak of, low-load law for a single thread.
metrics::Regime default_regime(const ScenarioConfig& config);

}  // namespace metronome
