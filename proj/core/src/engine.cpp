#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "metronome/error.hpp"
#include "metronome/rng.hpp"
#include "metronome/sim.hpp"

namespace metronome {
namespace {

enum class EventKind : std::uint8_t { wake = 1, drain_end = 2 };

struct Event {
  SimTime time;
  EventKind kind;
  std::uint64_t seq;
  std::uint32_t target;  // thread for wake, queue for drain_end

  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    if (kind != o.kind) return kind > o.kind;
    return seq > o.seq;
  }
};

constexpr std::int32_t kUnlocked = -1;

// Fixed-capacity FIFO of arrival timestamps.
class Ring {
 public:
  explicit Ring(std::uint32_t capacity) : slots_(capacity) {}

  bool full() const { return size_ == slots_.size(); }
  std::uint32_t size() const { return size_; }

  void push(SimTime t) {
    std::size_t tail = head_ + size_;
    if (tail >= slots_.size()) tail -= slots_.size();
    slots_[tail] = t;
    ++size_;
  }

  SimTime pop() {
    const SimTime t = slots_[head_];
    if (++head_ == slots_.size()) head_ = 0;
    --size_;
    return t;
  }

 private:
  std::vector<SimTime> slots_;
  std::size_t head_ = 0;
  std::uint32_t size_ = 0;
};

struct QueueState {
  QueueState(std::uint32_t capacity, const QueueController& ctrl)
      : ring(capacity), controller(ctrl) {}

  Ring ring;
  QueueController controller;
  std::int32_t locked_by = kUnlocked;
  SimTime last_release = 0;
  bool last_service_nonempty = false;
  // Current busy period.
  SimTime busy_start = 0;
  SimDuration vacation = 0;
  std::uint32_t n_vacation = 0;
  std::uint64_t served_in_cycle = 0;
  // Backlog integral bookkeeping.
  SimTime last_change = 0;
  SimTime next_trace = 0;
};

struct ThreadState {
  Role role = Role::primary;
  std::uint32_t target = 0;
  SimTime wake_at = 0;
};

class EventLoop {
 public:
  EventLoop(const ScenarioConfig& cfg, ArrivalSource& source)
      : cfg_(cfg),
        source_(source),
        jitter_rng_(cfg.jitter.seed),
        queue_rng_(cfg.seed_queue),
        ns_per_packet_(1e9 / cfg.drain.mu_rate),
        always_poll_(cfg.mode == PollMode::always_poll) {
    ControllerSettings cs;
    cs.adaptive = cfg.adaptation.enabled;
    cs.alpha = cfg.adaptation.alpha;
    cs.rho_init = cfg.adaptation.rho_init;
    cs.t_short = cfg.t_short;
    cs.t_long = cfg.t_long;
    cs.target_vacation = cfg.target_vacation;
    cs.t_short_min = cfg.adaptation.t_short_min;
    cs.t_short_max = cfg.adaptation.t_short_max;
    const QueueController prototype(cs, cfg.m_threads, cfg.n_queues);

    queues_.reserve(cfg.n_queues);
    for (int q = 0; q < cfg.n_queues; ++q) {
      queues_.emplace_back(cfg.queue_capacity, prototype);
    }
    threads_.resize(cfg.m_threads);
    out_.horizon = cfg.horizon;
    out_.warmup = cfg.warmup;
    out_.threads.resize(cfg.m_threads);
    out_.queues.resize(cfg.n_queues);
    if (cfg.window > 0) {
      out_.windows.resize((cfg.horizon + cfg.window - 1) / cfg.window);
      for (std::size_t w = 0; w < out_.windows.size(); ++w) {
        out_.windows[w].start = w * cfg.window;
      }
    }
  }

  RunOutput run() {
    if (!always_poll_) {
      // Initial phases spread over one short timer.
      for (int i = 0; i < cfg_.m_threads; ++i) {
        auto& th = threads_[i];
        th.target = static_cast<std::uint32_t>(i % cfg_.n_queues);
        const SimDuration ts = queues_[th.target].controller.t_short();
        const auto phase = static_cast<SimDuration>(queue_rng_.index(std::max<SimDuration>(ts, 1)));
        schedule_wake(static_cast<std::uint32_t>(i), phase);
      }
    }

    auto arrival = source_.next();
    for (;;) {
      const SimTime next_event =
          events_.empty() ? std::numeric_limits<SimTime>::max() : events_.top().time;
      if (arrival && arrival->time <= next_event) {
        if (arrival->time >= cfg_.horizon) {
          arrival.reset();
          continue;
        }
        on_arrival(*arrival);
        arrival = source_.next();
        continue;
      }
      if (events_.empty()) break;
      const Event ev = events_.top();
      if (ev.time >= cfg_.horizon) break;
      events_.pop();
      ++out_.events;
      if (ev.kind == EventKind::wake) {
        on_wake(ev.target, ev.time);
      } else {
        on_drain_step(ev.target, ev.time);
      }
      if (cfg_.verify_invariants) verify();
    }
    finish();
    return std::move(out_);
  }

 private:
  bool measuring(SimTime t) const { return t >= cfg_.warmup; }

  WindowCounters* window_at(SimTime t) {
    if (cfg_.window == 0) return nullptr;
    const std::size_t w = t / cfg_.window;
    return w < out_.windows.size() ? &out_.windows[w] : nullptr;
  }

  void account_backlog(std::uint32_t qi, SimTime t) {
    auto& q = queues_[qi];
    const SimTime from = std::max(q.last_change, cfg_.warmup);
    if (t > from) {
      out_.queues[qi].backlog_area +=
          static_cast<double>(q.ring.size()) * static_cast<double>(t - from);
    }
    q.last_change = t;
  }

  SimDuration jitter() {
    const auto& j = cfg_.jitter;
    if (j.kind == JitterKind::none) return 0;
    if (j.probability < 1.0 && jitter_rng_.uniform01() >= j.probability) return 0;
    switch (j.kind) {
      case JitterKind::none: return 0;
      case JitterKind::constant: return j.a;
      case JitterKind::uniform:
        return static_cast<SimDuration>(jitter_rng_.uniform(
            static_cast<double>(j.a), static_cast<double>(j.b)));
      case JitterKind::heavy_tail: {
        const double u = 1.0 - jitter_rng_.uniform01();  // (0, 1]
        const double draw = static_cast<double>(j.a) * std::pow(u, -1.0 / j.shape);
        return static_cast<SimDuration>(std::min(draw, 1e15));
      }
    }
    return 0;
  }

  void schedule_wake(std::uint32_t thread, SimTime at) {
    threads_[thread].wake_at = at;
    events_.push(Event{at, EventKind::wake, seq_++, thread});
  }

  void on_arrival(const Arrival& a) {
    if (a.queue >= queues_.size()) {
      throw ParameterError("arrival for queue " + std::to_string(a.queue) +
                           " but only " + std::to_string(queues_.size()) +
                           " queues exist");
    }
    auto& q = queues_[a.queue];
    auto& qc = out_.queues[a.queue];
    ++qc.arrivals;
    ++out_.arrivals_total;
    auto* win = window_at(a.time);
    if (win) ++win->arrivals;
    if (q.ring.full()) {
      ++qc.dropped;
      ++out_.dropped_total;
      if (win) ++win->dropped;
      return;
    }
    account_backlog(a.queue, a.time);
    q.ring.push(a.time);
    qc.max_backlog = std::max<std::uint64_t>(qc.max_backlog, q.ring.size());

    if (always_poll_ && q.locked_by == kUnlocked) {
      acquire(a.queue, a.queue % static_cast<std::uint32_t>(cfg_.m_threads), a.time);
    }
  }

  void on_wake(std::uint32_t ti, SimTime t) {
    auto& th = threads_[ti];
    auto& tc = out_.threads[ti];
    const std::uint32_t qi = th.target;
    auto& q = queues_[qi];
    auto& qc = out_.queues[qi];
    if (measuring(t)) {
      ++tc.total_tries;
      ++qc.total_tries;
      tc.awake += cfg_.drain.wake_overhead + cfg_.drain.lock_overhead;
    }
    if (q.locked_by != kUnlocked) {
      if (measuring(t)) {
        ++tc.busy_tries;
        ++qc.busy_tries;
      }
      th.role = Role::backup;
      th.target = select_next_queue(Role::backup, qi, cfg_.n_queues, queue_rng_);
      schedule_wake(ti, t + q.controller.current_sleep(Role::backup) + jitter());
      return;
    }
    th.role = Role::primary;
    acquire(qi, ti, t);
  }

  void acquire(std::uint32_t qi, std::uint32_t ti, SimTime t) {
    auto& q = queues_[qi];
    q.locked_by = static_cast<std::int32_t>(ti);
    q.vacation = t - q.last_release;
    q.busy_start = t;
    q.n_vacation = q.ring.size();
    q.served_in_cycle = 0;
    if (q.n_vacation == 0) {
      finish_cycle(qi, t);
    } else {
      receive_batch(qi, t);
    }
  }

  // One receive call: retrieve up to batch_size packets starting at t.
  void receive_batch(std::uint32_t qi, SimTime t) {
    auto& q = queues_[qi];
    auto& qc = out_.queues[qi];
    account_backlog(qi, t);
    const std::uint32_t k = std::min(q.ring.size(), cfg_.drain.batch_size);
    const bool measure = measuring(t);
    auto* win = window_at(t);
    SimTime completion = t;
    for (std::uint32_t i = 0; i < k; ++i) {
      const SimTime arrived = q.ring.pop();
      ++q.served_in_cycle;
      completion = q.busy_start + static_cast<SimDuration>(std::llround(
                                      static_cast<double>(q.served_in_cycle) * ns_per_packet_));
      if (measure) {
        const SimDuration latency = completion - arrived;
        out_.latency.add(latency);
        out_.latency_sum += static_cast<double>(latency);
        out_.latency_max = std::max(out_.latency_max, latency);
        qc.wait_sum += static_cast<double>(t - arrived);
        ++qc.waits;
      }
    }
    qc.served += k;
    out_.served_total += k;
    if (win) win->served += k;
    events_.push(Event{std::max(completion, t), EventKind::drain_end, seq_++, qi});
  }

  void on_drain_step(std::uint32_t qi, SimTime t) {
    if (queues_[qi].ring.size() > 0) {
      receive_batch(qi, t);
    } else {
      finish_cycle(qi, t);
    }
  }

  void finish_cycle(std::uint32_t qi, SimTime t) {
    auto& q = queues_[qi];
    auto& qc = out_.queues[qi];
    const auto ti = static_cast<std::uint32_t>(q.locked_by);
    auto& tc = out_.threads[ti];
    const SimDuration busy = t - q.busy_start;
    const auto n_busy = static_cast<std::uint32_t>(q.served_in_cycle - q.n_vacation);
    const bool nonempty = q.served_in_cycle > 0;

    if (measuring(q.busy_start)) {
      ++qc.cycles;
      if (!nonempty) ++qc.empty_cycles;
      qc.vacation_sum += static_cast<double>(q.vacation);
      qc.busy_sum += static_cast<double>(busy);
      qc.n_vacation_sum += q.n_vacation;
      qc.max_vacation = std::max(qc.max_vacation, q.vacation);
      qc.max_cycle_backlog = std::max<std::uint64_t>(qc.max_cycle_backlog, q.n_vacation);
      ++tc.cycles_served;
      if (cfg_.record_cycles) {
        out_.cycles.push_back(CycleRecord{out_.cycles.size(), qi, ti, q.busy_start,
                                          q.vacation, busy, q.n_vacation, n_busy,
                                          q.last_service_nonempty});
      }
    }
    if (!always_poll_) {
      const SimTime from = std::max(q.busy_start, cfg_.warmup);
      if (t > from) tc.awake += t - from;
    }

    if (nonempty || cfg_.adaptation.feed_empty_cycles) {
      q.controller.observe_cycle(q.vacation, busy);
    }
    record_trace(qi, t);

    q.locked_by = kUnlocked;
    q.last_release = t;
    q.last_service_nonempty = nonempty;
    if (!always_poll_) {
      schedule_wake(ti, t + q.controller.current_sleep(Role::primary) + jitter());
    }
  }

  void record_trace(std::uint32_t qi, SimTime t) {
    auto& q = queues_[qi];
    if (cfg_.trace_interval == 0) {
      out_.controller_trace.push_back(
          {t, qi, q.controller.rho_estimate(), q.controller.t_short()});
      return;
    }
    if (t < q.next_trace) return;
    out_.controller_trace.push_back(
        {t, qi, q.controller.rho_estimate(), q.controller.t_short()});
    q.next_trace = (t / cfg_.trace_interval + 1) * cfg_.trace_interval;
  }

  void verify() {
    for (std::size_t qi = 0; qi < queues_.size(); ++qi) {
      const auto& q = queues_[qi];
      if (q.ring.size() > cfg_.queue_capacity) ++out_.invariant_violations;
      if (q.locked_by != kUnlocked && q.locked_by >= cfg_.m_threads) {
        ++out_.invariant_violations;
      }
    }
    // A thread holds at most one lock.
    std::vector<int> held(threads_.size(), 0);
    for (const auto& q : queues_) {
      if (q.locked_by != kUnlocked && ++held[q.locked_by] > 1) {
        ++out_.invariant_violations;
      }
    }
  }

  void finish() {
    const SimTime end = cfg_.horizon;
    for (std::size_t qi = 0; qi < queues_.size(); ++qi) {
      auto& q = queues_[qi];
      auto& qc = out_.queues[qi];
      account_backlog(static_cast<std::uint32_t>(qi), end);
      qc.backlog_final = q.ring.size();
      out_.backlog_total += q.ring.size();
      qc.final_rho_estimate = q.controller.rho_estimate();
      qc.final_t_short = q.controller.t_short();
      if (q.locked_by != kUnlocked && !always_poll_) {
        const SimTime from = std::max(q.busy_start, cfg_.warmup);
        if (end > from) out_.threads[q.locked_by].awake += end - from;
      }
    }
    const SimDuration measured = end > cfg_.warmup ? end - cfg_.warmup : 0;
    for (std::size_t ti = 0; ti < threads_.size(); ++ti) {
      auto& tc = out_.threads[ti];
      if (always_poll_) tc.awake = measured;
      tc.awake = std::min(tc.awake, measured);
      tc.final_role = threads_[ti].role;
    }
  }

  const ScenarioConfig& cfg_;
  ArrivalSource& source_;
  Rng jitter_rng_;
  Rng queue_rng_;
  double ns_per_packet_;
  bool always_poll_;
  std::vector<QueueState> queues_;
  std::vector<ThreadState> threads_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t seq_ = 0;
  RunOutput out_;
};

}  // namespace

Simulator::Simulator(ScenarioConfig config) : config_(std::move(config)) {
  if (auto issues = config_.problems(); !issues.empty()) {
    throw ConfigError(std::move(issues));
  }
}

RunOutput Simulator::run() {
  ArrivalGenerator gen(config_.arrivals, config_.n_queues, config_.horizon,
                       config_.arrivals.seed);
  return run(gen);
}

RunOutput Simulator::run(ArrivalSource& arrivals) {
  EventLoop loop(config_, arrivals);
  return loop.run();
}

RunOutput simulate(const ScenarioConfig& config) { return Simulator(config).run(); }

}  // namespace metronome
