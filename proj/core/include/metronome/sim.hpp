#pragma once

#include <cstdint>
#include <vector>

#include "metronome/controller.hpp"
#include "metronome/histogram.hpp"
#include "metronome/scenario.hpp"
#include "metronome/time.hpp"
#include "metronome/workload.hpp"

namespace metronome {

// One renewal cycle on one queue: the vacation that ended with a
// successful trylock and the busy period that followed.
struct CycleRecord {
  std::uint64_t id = 0;
  std::uint32_t queue = 0;
  std::uint32_t thread = 0;
  SimTime start = 0;  // lock acquisition
  SimDuration vacation = 0;
  SimDuration busy = 0;
  std::uint32_t n_vacation = 0;
  std::uint32_t n_busy = 0;
  // The busy period that closed the preceding vacation served packets.
  bool after_service = false;

  friend bool operator==(const CycleRecord&, const CycleRecord&) = default;
};

struct ThreadCounters {
  std::uint64_t total_tries = 0;
  std::uint64_t busy_tries = 0;
  std::uint64_t cycles_served = 0;
  SimDuration awake = 0;
  Role final_role = Role::primary;

  friend bool operator==(const ThreadCounters&, const ThreadCounters&) = default;
};

struct QueueCounters {
  std::uint64_t arrivals = 0;
  std::uint64_t served = 0;
  std::uint64_t dropped = 0;
  std::uint64_t backlog_final = 0;
  std::uint64_t max_backlog = 0;
  std::uint64_t total_tries = 0;
  std::uint64_t busy_tries = 0;
  // Measurement-window aggregates (cycles that started after warmup).
  std::uint64_t cycles = 0;
  std::uint64_t empty_cycles = 0;
  double vacation_sum = 0.0;
  double busy_sum = 0.0;
  double n_vacation_sum = 0.0;
  SimDuration max_vacation = 0;
  std::uint64_t max_cycle_backlog = 0;
  // Time integral of backlog (packet * ns) and summed arrival-to-retrieval
  // waits over the measurement window, for Little's-law checks.
  double backlog_area = 0.0;
  double wait_sum = 0.0;
  std::uint64_t waits = 0;
  double final_rho_estimate = 0.0;
  SimDuration final_t_short = 0;

  friend bool operator==(const QueueCounters&, const QueueCounters&) = default;
};

struct ControllerSample {
  SimTime time = 0;
  std::uint32_t queue = 0;
  double rho_estimate = 0.0;
  SimDuration t_short = 0;

  friend bool operator==(const ControllerSample&, const ControllerSample&) = default;
};

struct WindowCounters {
  SimTime start = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t served = 0;
  std::uint64_t dropped = 0;

  friend bool operator==(const WindowCounters&, const WindowCounters&) = default;
};

// Everything the event loop observed; metrics::summarize turns it into a
// report.
struct RunOutput {
  SimDuration horizon = 0;
  SimDuration warmup = 0;
  std::vector<CycleRecord> cycles;  // empty unless record_cycles
  std::vector<ThreadCounters> threads;
  std::vector<QueueCounters> queues;
  std::vector<ControllerSample> controller_trace;
  std::vector<WindowCounters> windows;
  LogHistogram latency;  // arrival to retrieval completion, ns
  double latency_sum = 0.0;
  SimDuration latency_max = 0;
  std::uint64_t arrivals_total = 0;
  std::uint64_t served_total = 0;
  std::uint64_t dropped_total = 0;
  std::uint64_t backlog_total = 0;
  std::uint64_t events = 0;
  std::uint64_t invariant_violations = 0;

  friend bool operator==(const RunOutput&, const RunOutput&) = default;
};

// Single-threaded deterministic event loop. Ties are broken by
// (time, arrival < wake < drain-end, insertion order).
class Simulator {
 public:
  explicit Simulator(ScenarioConfig config);

  RunOutput run();
  RunOutput run(ArrivalSource& arrivals);

  const ScenarioConfig& config() const { return config_; }

 private:
  ScenarioConfig config_;
};

RunOutput simulate(const ScenarioConfig& config);

}  // namespace metronome
