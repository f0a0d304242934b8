#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "metronome/rng.hpp"
#include "metronome/time.hpp"

namespace metronome {

enum class ArrivalKind { poisson, cbr, ramp, flowmix };

std::string to_string(ArrivalKind kind);
std::optional<ArrivalKind> parse_arrival_kind(const std::string& text);

struct RampStep {
  SimDuration duration = 0;
  double rate = 0.0;  // packets/second
  friend bool operator==(const RampStep&, const RampStep&) = default;
};

// One component of a flow mixture. An empty flow_id means "a fresh
// uniformly random flow for every packet".
struct FlowShare {
  double weight = 0.0;
  std::optional<std::uint64_t> flow_id;
  friend bool operator==(const FlowShare&, const FlowShare&) = default;
};

struct ArrivalSpec {
  ArrivalKind kind = ArrivalKind::poisson;
  double rate = 0.0;  // packets/second, poisson/cbr/flowmix aggregate
  std::vector<RampStep> ramp_steps;
  std::vector<FlowShare> flows;
  // Optional per-queue split for poisson/cbr. When empty, each packet
  // gets a random flow id and is hashed onto a queue.
  std::vector<double> queue_weights;
  std::uint64_t seed = 1;

  // Returns human-readable problems; empty when valid.
  std::vector<std::string> problems(int n_queues) const;

  // Offered rate at time t (packets/second).
  double rate_at(SimTime t) const;
  SimDuration ramp_duration() const;
};

struct Arrival {
  SimTime time = 0;
  std::uint32_t queue = 0;
  std::uint64_t flow_id = 0;

  friend bool operator==(const Arrival&, const Arrival&) = default;
};

// Stable flow-to-queue hash modelling receive-side scaling.
std::uint32_t assign_queue(std::uint64_t flow_id, int n, std::uint64_t seed);

// Step-wise ramp: 2 s steps up to 14 Mpps at 30 s, then mirrored down.
ArrivalSpec standard_ramp_profile();

class ArrivalSource {
 public:
  virtual ~ArrivalSource() = default;
  // Next arrival strictly before the horizon, or nullopt at end of stream.
  virtual std::optional<Arrival> next() = 0;
};

class ArrivalGenerator final : public ArrivalSource {
 public:
  ArrivalGenerator(ArrivalSpec spec, int n_queues, SimTime horizon,
                   std::uint64_t hash_seed = 0);

  std::optional<Arrival> next() override;

 private:
  std::optional<SimTime> next_time();
  std::uint32_t pick_queue(std::uint64_t& flow_id);

  ArrivalSpec spec_;
  int n_queues_;
  SimTime horizon_;
  std::uint64_t hash_seed_;
  Rng rng_;

  // poisson clock, in nanoseconds
  double clock_ = 0.0;
  // cbr / ramp bookkeeping
  std::uint64_t index_in_segment_ = 0;
  std::size_t step_ = 0;
  SimTime segment_start_ = 0;

  std::vector<double> queue_cdf_;
  std::vector<double> flow_cdf_;
};

// Replays a recorded stream, dropping anything at or past the horizon.
class TraceArrivalSource final : public ArrivalSource {
 public:
  TraceArrivalSource(std::vector<Arrival> arrivals, SimTime horizon);
  std::optional<Arrival> next() override;

 private:
  std::vector<Arrival> arrivals_;
  SimTime horizon_;
  std::size_t pos_ = 0;
};

// CSV with header time_ns,queue,flow_id.
void write_arrival_trace(std::ostream& out, const std::vector<Arrival>& arrivals);
std::vector<Arrival> read_arrival_trace(std::istream& in);

}  // namespace metronome
