#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metronome/analytics.hpp"
#include "metronome/time.hpp"
#include "metronome/workload.hpp"

namespace metronome {

struct DrainSpec {
  double mu_rate = 29.25e6;  // packets/second
  std::uint32_t batch_size = 32;
  SimDuration wake_overhead = micros(1);
  SimDuration lock_overhead = 0;
};

enum class JitterKind { none, constant, uniform, heavy_tail };

std::string to_string(JitterKind kind);

// Extra delay added to every timer expiry. With probability `probability`
// a wake is delayed by a draw from the chosen law, otherwise it is on
// time:
//   constant    a
//   uniform     U[a, b]
//   heavy_tail  Pareto with scale a and tail index `shape`
struct JitterSpec {
  JitterKind kind = JitterKind::none;
  double probability = 1.0;
  SimDuration a = 0;
  SimDuration b = 0;
  double shape = 1.5;
  std::uint64_t seed = 2;
};

struct AdaptationSpec {
  bool enabled = true;
  double alpha = 0.1;
  double rho_init = 0.5;
  SimDuration t_short_min = micros(1);
  SimDuration t_short_max = 0;  // 0: (M/N) * target * 1.1
  // Lock acquisitions on an empty queue feed a B = 0 sample.
  bool feed_empty_cycles = true;
};

// always_poll is the static busy-polling referent: one thread per queue,
// never sleeping.
enum class PollMode { metronome, always_poll };

std::string to_string(PollMode mode);

struct ScenarioConfig {
  std::string name = "custom";

  int m_threads = 3;
  int n_queues = 1;
  SimDuration t_short = micros(10);  // fixed timer, or initial value
  SimDuration t_long = micros(500);
  SimDuration target_vacation = micros(10);

  DrainSpec drain;
  std::uint32_t queue_capacity = 4096;
  ArrivalSpec arrivals;
  JitterSpec jitter;
  AdaptationSpec adaptation;
  PollMode mode = PollMode::metronome;

  SimDuration horizon = seconds(1);
  SimDuration warmup = 0;
  std::uint64_t seed_queue = 3;

  // Reporting.
  std::string output_dir = "out";
  bool record_cycles = true;
  SimDuration trace_interval = millis(1);
  SimDuration window = 0;  // 0 disables windowed counters
  SimDuration vacation_bin = micros(1);
  SimDuration vacation_hist_max = 0;  // 0: 2 * t_long
  bool verify_invariants = false;

  analytics::ModelParams model() const;
  // Empty when valid.
  std::vector<std::string> problems() const;
};

}  // namespace metronome
