#pragma once

#include <cstdint>

#include "metronome/rng.hpp"
#include "metronome/time.hpp"

namespace metronome {

enum class Role : std::uint8_t { primary, backup };

struct ControllerSettings {
  bool adaptive = true;
  double alpha = 0.1;
  double rho_init = 0.5;
  double rho_cap = 0.999;
  // Fixed short timer when adaptation is off, starting value otherwise.
  SimDuration t_short = micros(10);
  SimDuration t_long = micros(500);
  SimDuration target_vacation = micros(10);
  SimDuration t_short_min = micros(1);
  // Zero means (M/N) * target * 1.1.
  SimDuration t_short_max = 0;
};

// Per-queue load estimator and short-timer rule.
class QueueController {
 public:
  QueueController(const ControllerSettings& settings, int m_threads, int n_queues);

  // Feeds one completed renewal cycle. Returns false (state untouched) for
  // a degenerate cycle with v = b = 0.
  bool observe_cycle(SimDuration v, SimDuration b);

  SimDuration current_sleep(Role role) const {
    return role == Role::primary ? t_short_ : t_long_;
  }

  double rho_estimate() const { return rho_; }
  SimDuration t_short() const { return t_short_; }
  SimDuration t_long() const { return t_long_; }
  SimDuration t_short_min() const { return t_short_min_; }
  SimDuration t_short_max() const { return t_short_max_; }

 private:
  void recompute();

  bool adaptive_;
  double alpha_;
  double rho_cap_;
  int m_threads_;
  int n_queues_;
  SimDuration target_;
  SimDuration t_short_min_;
  SimDuration t_short_max_;
  SimDuration t_long_;
  double rho_;
  SimDuration t_short_;
};

// Primary threads stay on their queue; backups re-target uniformly.
std::uint32_t select_next_queue(Role role, std::uint32_t current_queue, int n,
                                Rng& rng);

}  // namespace metronome
