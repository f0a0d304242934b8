#include "metronome/scenario.hpp"

namespace metronome {

std::string to_string(JitterKind kind) {
  switch (kind) {
    case JitterKind::none: return "none";
    case JitterKind::constant: return "constant";
    case JitterKind::uniform: return "uniform";
    case JitterKind::heavy_tail: return "heavy_tail";
  }
  return "unknown";
}

std::string to_string(PollMode mode) {
  return mode == PollMode::always_poll ? "always_poll" : "metronome";
}

analytics::ModelParams ScenarioConfig::model() const {
  analytics::ModelParams p;
  p.m_threads = m_threads;
  p.n_queues = n_queues;
  p.t_short = static_cast<double>(t_short);
  p.t_long = static_cast<double>(t_long);
  p.target_vacation = static_cast<double>(target_vacation);
  return p;
}

std::vector<std::string> ScenarioConfig::problems() const {
  std::vector<std::string> out;
  if (m_threads < 1) out.push_back("m_threads must be >= 1");
  if (n_queues < 1) out.push_back("n_queues must be >= 1");
  if (m_threads >= 1 && n_queues > 1 && m_threads < n_queues) {
    out.push_back("m_threads must be >= n_queues");
  }
  if (t_short == 0) out.push_back("t_short must be > 0");
  if (t_long == 0) out.push_back("t_long must be > 0");
  if (t_short > t_long) out.push_back("t_short must be <= t_long");
  if (target_vacation == 0) out.push_back("target_vacation must be > 0");
  if (!(drain.mu_rate > 0.0)) out.push_back("mu must be > 0");
  if (drain.batch_size < 1) out.push_back("batch_size must be >= 1");
  if (queue_capacity < 1) out.push_back("capacity must be >= 1");
  if (horizon == 0) out.push_back("horizon must be > 0");
  if (warmup >= horizon) out.push_back("warmup must be < horizon");
  if (!(adaptation.alpha > 0.0 && adaptation.alpha <= 1.0)) {
    out.push_back("alpha must lie in (0, 1]");
  }
  if (!(adaptation.rho_init >= 0.0 && adaptation.rho_init <= 1.0)) {
    out.push_back("rho_init must lie in [0, 1]");
  }
  if (adaptation.t_short_min == 0) out.push_back("t_short_min must be > 0");
  if (adaptation.t_short_max != 0 && adaptation.t_short_max < adaptation.t_short_min) {
    out.push_back("t_short_max must be >= t_short_min");
  }
  if (!(jitter.probability >= 0.0 && jitter.probability <= 1.0)) {
    out.push_back("jitter_prob must lie in [0, 1]");
  }
  if (jitter.kind == JitterKind::uniform && jitter.b < jitter.a) {
    out.push_back("uniform jitter needs jitter_a <= jitter_b");
  }
  if (jitter.kind == JitterKind::heavy_tail && (jitter.a == 0 || !(jitter.shape > 0.0))) {
    out.push_back("heavy_tail jitter needs jitter_a > 0 and jitter_shape > 0");
  }
  for (auto& p : arrivals.problems(n_queues)) out.push_back(p);
  return out;
}

}  // namespace metronome
