#include "metronome/workload.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "metronome/error.hpp"

namespace metronome {
namespace {

constexpr double kWeightTolerance = 1e-9;

std::vector<double> cumulative(const std::vector<double>& weights) {
  std::vector<double> cdf(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cdf.begin());
  if (!cdf.empty()) {
    const double total = cdf.back();
    for (auto& c : cdf) c /= total;
    cdf.back() = 1.0;
  }
  return cdf;
}

std::size_t draw_from(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
}

SimTime cbr_offset(std::uint64_t k, double rate) {
  return static_cast<SimTime>(
      std::llround(static_cast<double>(k) * 1e9 / rate));
}

}  // namespace

std::string to_string(ArrivalKind kind) {
  switch (kind) {
    case ArrivalKind::poisson: return "poisson";
    case ArrivalKind::cbr: return "cbr";
    case ArrivalKind::ramp: return "ramp";
    case ArrivalKind::flowmix: return "flowmix";
  }
  return "unknown";
}

std::optional<ArrivalKind> parse_arrival_kind(const std::string& text) {
  if (text == "poisson") return ArrivalKind::poisson;
  if (text == "cbr") return ArrivalKind::cbr;
  if (text == "ramp") return ArrivalKind::ramp;
  if (text == "flowmix") return ArrivalKind::flowmix;
  return std::nullopt;
}

std::vector<std::string> ArrivalSpec::problems(int n_queues) const {
  std::vector<std::string> out;
  if (!(rate >= 0.0)) out.push_back("rate must be >= 0");
  for (const auto& s : ramp_steps) {
    if (!(s.rate >= 0.0)) out.push_back("ramp_steps: rates must be >= 0");
    if (s.duration == 0) out.push_back("ramp_steps: durations must be > 0");
  }
  if (kind == ArrivalKind::ramp && ramp_steps.empty()) {
    out.push_back("ramp_steps: ramp arrivals need at least one step");
  }
  if (kind == ArrivalKind::flowmix) {
    if (flows.empty()) out.push_back("flows: flowmix arrivals need at least one flow");
    double total = 0.0;
    for (const auto& f : flows) {
      if (!(f.weight >= 0.0)) out.push_back("flows: weights must be >= 0");
      total += f.weight;
    }
    if (!flows.empty() && std::abs(total - 1.0) > kWeightTolerance) {
      out.push_back("flows: weights must sum to 1");
    }
  }
  if (!queue_weights.empty()) {
    if (static_cast<int>(queue_weights.size()) != n_queues) {
      out.push_back("queue_weights: needs one entry per queue");
    }
    double total = 0.0;
    for (double w : queue_weights) {
      if (!(w >= 0.0)) out.push_back("queue_weights: weights must be >= 0");
      total += w;
    }
    if (std::abs(total - 1.0) > kWeightTolerance) {
      out.push_back("queue_weights: weights must sum to 1");
    }
  }
  return out;
}

double ArrivalSpec::rate_at(SimTime t) const {
  if (kind != ArrivalKind::ramp) return rate;
  SimTime start = 0;
  for (const auto& s : ramp_steps) {
    if (t < start + s.duration) return s.rate;
    start += s.duration;
  }
  return 0.0;
}

SimDuration ArrivalSpec::ramp_duration() const {
  SimDuration total = 0;
  for (const auto& s : ramp_steps) total += s.duration;
  return total;
}

std::uint32_t assign_queue(std::uint64_t flow_id, int n, std::uint64_t seed) {
  if (n <= 1) return 0;
  const std::uint64_t h = mix64(flow_id ^ mix64(seed));
  return static_cast<std::uint32_t>(
      (static_cast<unsigned __int128>(h) * static_cast<unsigned>(n)) >> 64);
}

ArrivalSpec standard_ramp_profile() {
  constexpr int kStepsEachWay = 15;
  constexpr double kPeak = 14e6;
  ArrivalSpec spec;
  spec.kind = ArrivalKind::ramp;
  for (int k = 1; k <= kStepsEachWay; ++k) {
    spec.ramp_steps.push_back({seconds(2), kPeak * k / kStepsEachWay});
  }
  for (int k = kStepsEachWay; k >= 1; --k) {
    spec.ramp_steps.push_back({seconds(2), kPeak * k / kStepsEachWay});
  }
  return spec;
}

ArrivalGenerator::ArrivalGenerator(ArrivalSpec spec, int n_queues,
                                   SimTime horizon, std::uint64_t hash_seed)
    : spec_(std::move(spec)),
      n_queues_(n_queues),
      horizon_(horizon),
      hash_seed_(hash_seed),
      rng_(spec_.seed) {
  if (n_queues_ < 1) throw ParameterError("n_queues must be >= 1");
  if (auto p = spec_.problems(n_queues_); !p.empty()) {
    throw ParameterError(p.front());
  }
  if (!spec_.queue_weights.empty()) queue_cdf_ = cumulative(spec_.queue_weights);
  if (spec_.kind == ArrivalKind::flowmix) {
    std::vector<double> w;
    for (const auto& f : spec_.flows) w.push_back(f.weight);
    flow_cdf_ = cumulative(w);
  }
}

std::optional<SimTime> ArrivalGenerator::next_time() {
  switch (spec_.kind) {
    case ArrivalKind::poisson: {
      if (spec_.rate <= 0.0) return std::nullopt;
      clock_ += rng_.exponential(spec_.rate) * 1e9;
      if (clock_ >= static_cast<double>(horizon_)) return std::nullopt;
      return static_cast<SimTime>(clock_);
    }
    case ArrivalKind::cbr:
    case ArrivalKind::flowmix: {
      if (spec_.rate <= 0.0) return std::nullopt;
      // first packet one gap after t = 0
      const SimTime t = cbr_offset(++index_in_segment_, spec_.rate);
      if (t >= horizon_) return std::nullopt;
      return t;
    }
    case ArrivalKind::ramp: {
      while (step_ < spec_.ramp_steps.size()) {
        const auto& s = spec_.ramp_steps[step_];
        const SimTime end = segment_start_ + s.duration;
        if (s.rate > 0.0) {
          const SimTime t =
              segment_start_ + cbr_offset(index_in_segment_ + 1, s.rate);
          if (t < end) {
            ++index_in_segment_;
            if (t >= horizon_) return std::nullopt;
            return t;
          }
        }
        segment_start_ = end;
        index_in_segment_ = 0;
        ++step_;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::uint32_t ArrivalGenerator::pick_queue(std::uint64_t& flow_id) {
  if (spec_.kind == ArrivalKind::flowmix) {
    const auto& share = spec_.flows[draw_from(flow_cdf_, rng_.uniform01())];
    flow_id = share.flow_id ? *share.flow_id : rng_.next_u64();
    return assign_queue(flow_id, n_queues_, hash_seed_);
  }
  if (!queue_cdf_.empty()) {
    const auto q = static_cast<std::uint32_t>(draw_from(queue_cdf_, rng_.uniform01()));
    flow_id = q;
    return q;
  }
  if (n_queues_ == 1) {
    flow_id = 0;
    return 0;
  }
  flow_id = rng_.next_u64();
  return assign_queue(flow_id, n_queues_, hash_seed_);
}

std::optional<Arrival> ArrivalGenerator::next() {
  const auto t = next_time();
  if (!t) return std::nullopt;
  Arrival a;
  a.time = *t;
  a.queue = pick_queue(a.flow_id);
  return a;
}

TraceArrivalSource::TraceArrivalSource(std::vector<Arrival> arrivals,
                                       SimTime horizon)
    : arrivals_(std::move(arrivals)), horizon_(horizon) {
  if (!std::is_sorted(arrivals_.begin(), arrivals_.end(),
                      [](const Arrival& a, const Arrival& b) { return a.time < b.time; })) {
    throw ParameterError("arrival trace is not sorted by time");
  }
}

std::optional<Arrival> TraceArrivalSource::next() {
  if (pos_ >= arrivals_.size() || arrivals_[pos_].time >= horizon_) {
    return std::nullopt;
  }
  return arrivals_[pos_++];
}

void write_arrival_trace(std::ostream& out, const std::vector<Arrival>& arrivals) {
  out << "time_ns,queue,flow_id\n";
  for (const auto& a : arrivals) {
    out << a.time << ',' << a.queue << ',' << a.flow_id << '\n';
  }
}

std::vector<Arrival> read_arrival_trace(std::istream& in) {
  std::vector<Arrival> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("time_ns", 0) == 0) continue;
    std::istringstream row(line);
    Arrival a;
    char c1 = 0;
    char c2 = 0;
    if (!(row >> a.time >> c1 >> a.queue >> c2 >> a.flow_id) || c1 != ',' ||
        c2 != ',') {
      throw ParameterError("malformed arrival trace at line " +
                           std::to_string(line_no));
    }
    out.push_back(a);
  }
  return out;
}

}  // namespace metronome
