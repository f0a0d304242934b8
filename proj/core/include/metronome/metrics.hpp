#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "metronome/analytics.hpp"
#include "metronome/sim.hpp"

namespace metronome::metrics {

struct QueueSummary {
  std::uint32_t index = 0;
  std::uint64_t cycles = 0;
  std::uint64_t empty_cycles = 0;
  double mean_vacation = 0.0;  // ns
  double mean_busy = 0.0;      // ns
  double mean_n_vacation = 0.0;
  // Nearest-rank percentiles; zero when cycles were not recorded.
  SimDuration vacation_p50 = 0;
  SimDuration vacation_p99 = 0;
  SimDuration busy_p50 = 0;
  SimDuration busy_p99 = 0;
  double rho_measured = 0.0;  // sum B / (sum V + sum B)
  double rho_estimate = 0.0;  // controller state at the end of the run
  SimDuration t_short = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t served = 0;
  std::uint64_t dropped = 0;
  std::uint64_t backlog_final = 0;
  std::uint64_t total_tries = 0;
  std::uint64_t busy_tries = 0;
  double busy_tries_pct = 0.0;
  double mean_backlog = 0.0;  // time average, packets
  double mean_wait = 0.0;     // arrival to retrieval call, ns

  friend bool operator==(const QueueSummary&, const QueueSummary&) = default;
};

struct ThreadSummary {
  std::uint32_t id = 0;
  std::uint64_t total_tries = 0;
  std::uint64_t busy_tries = 0;
  double busy_tries_pct = 0.0;
  double awake_fraction = 0.0;
  std::uint64_t cycles_served = 0;

  friend bool operator==(const ThreadSummary&, const ThreadSummary&) = default;
};

struct GlobalSummary {
  SimDuration horizon = 0;
  SimDuration measured = 0;  // horizon - warmup
  std::uint64_t arrivals = 0;
  std::uint64_t served = 0;
  std::uint64_t dropped = 0;
  std::uint64_t backlog = 0;
  bool conservation_ok = false;
  std::uint64_t cycles = 0;
  std::uint64_t total_tries = 0;
  std::uint64_t busy_tries = 0;
  // Busy tries over all tries, and the mean of the per-thread percentages.
  double busy_tries_pct = 0.0;
  double busy_tries_pct_thread_mean = 0.0;
  double cpu_proxy = 0.0;
  double throughput = 0.0;  // packets/second served in the measured window
  double latency_mean = 0.0;
  SimDuration latency_max = 0;
  std::uint64_t latency_p50 = 0;  // upper bin edge
  std::uint64_t latency_p99 = 0;

  friend bool operator==(const GlobalSummary&, const GlobalSummary&) = default;
};

struct SimulationReport {
  GlobalSummary global;
  std::vector<QueueSummary> queues;
  std::vector<ThreadSummary> threads;
  RunOutput raw;

  friend bool operator==(const SimulationReport&, const SimulationReport&) = default;
};

SimulationReport summarize(RunOutput raw);

// Nearest-rank percentile (q in (0, 1]) of unsorted data; 0 when empty.
SimDuration percentile(std::vector<SimDuration> data, double q);

enum class Regime { high_load, low_load };

std::string to_string(Regime regime);

// Analytic vacation CDF including the atom at t_short.
double vacation_cdf(double x, const analytics::ModelParams& p, Regime regime);

struct DistributionComparison {
  double ks_statistic = 0.0;
  std::size_t n_samples = 0;
  std::string analytic_ref;
};

inline constexpr std::size_t kMinVacationSamples = 10'000;

// Two-sided Kolmogorov-Smirnov distance between the samples (ns) and the
// analytic vacation CDF. Throws InsufficientDataError below min_samples.
DistributionComparison compare_vacation_distribution(
    std::span<const double> samples, const analytics::ModelParams& p,
    Regime regime, std::size_t min_samples = kMinVacationSamples);

// Vacation lengths of one queue (or all queues when queue < 0). The
// filtered set keeps only cycles that served packets after a vacation
// that itself followed a non-empty service.
std::vector<double> vacation_samples(const RunOutput& raw, int queue, bool filtered);

struct CpuProxy {
  double total = 0.0;
  std::vector<double> per_thread;
};

CpuProxy cpu_proxy(const SimulationReport& report);

struct HistogramRow {
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t count = 0;
  double density = 0.0;           // empirical, per ns
  double analytic_density = 0.0;  // continuous part at bin centre, per ns
  double analytic_mass = 0.0;     // CDF(hi) - CDF(lo), atom included
};

// Fixed-width histogram on [0, max) plus one overflow row at [max, inf).
std::vector<HistogramRow> vacation_histogram(std::span<const double> samples,
                                             const analytics::ModelParams& p,
                                             Regime regime, double bin_width,
                                             double max_value);

}  // namespace metronome::metrics
