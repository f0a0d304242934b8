#include "metronome/controller.hpp"

#include <algorithm>
#include <cmath>

#include "metronome/analytics.hpp"
#include "metronome/error.hpp"

namespace metronome {

QueueController::QueueController(const ControllerSettings& s, int m_threads,
                                 int n_queues)
    : adaptive_(s.adaptive),
      alpha_(s.alpha),
      rho_cap_(s.rho_cap),
      m_threads_(m_threads),
      n_queues_(n_queues),
      target_(s.target_vacation),
      t_short_min_(s.t_short_min),
      t_long_(s.t_long),
      rho_(std::clamp(s.rho_init, 0.0, s.rho_cap)),
      t_short_(s.t_short) {
  if (!(alpha_ > 0.0 && alpha_ <= 1.0)) {
    throw ParameterError("alpha must lie in (0, 1]");
  }
  if (m_threads < n_queues) throw ParameterError("m_threads must be >= n_queues");
  t_short_max_ = s.t_short_max;
  if (t_short_max_ == 0) {
    const double ratio = static_cast<double>(m_threads) / n_queues;
    t_short_max_ = static_cast<SimDuration>(
        std::llround(ratio * static_cast<double>(target_) * 1.1));
  }
  if (t_short_min_ > t_short_max_) {
    throw ParameterError("t_short_min must be <= t_short_max");
  }
  if (adaptive_) recompute();
}

bool QueueController::observe_cycle(SimDuration v, SimDuration b) {
  if (v == 0 && b == 0) return false;
  const double sample =
      static_cast<double>(b) / (static_cast<double>(v) + static_cast<double>(b));
  rho_ = std::clamp((1.0 - alpha_) * rho_ + alpha_ * sample, 0.0, rho_cap_);
  if (adaptive_) recompute();
  return true;
}

void QueueController::recompute() {
  const double ts = analytics::adaptive_ts_multiqueue(
      m_threads_, n_queues_, rho_, static_cast<double>(target_));
  const auto rounded = static_cast<SimDuration>(std::llround(ts));
  t_short_ = std::clamp(rounded, t_short_min_, t_short_max_);
}

std::uint32_t select_next_queue(Role role, std::uint32_t current_queue, int n,
                                Rng& rng) {
  if (n <= 1) return 0;
  if (role == Role::primary) return current_queue;
  return static_cast<std::uint32_t>(rng.index(static_cast<std::uint64_t>(n)));
}

}  // namespace metronome
