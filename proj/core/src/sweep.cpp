#include "metronome/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <thread>

#include "metronome/config.hpp"
#include "metronome/sim.hpp"

namespace metronome {

SweepResult run_sweep(const ScenarioConfig& base, const std::string& key,
                      const std::vector<std::string>& values, int parallelism,
                      bool keep_cycles) {
  SweepResult result;
  result.key = key;
  result.points.resize(values.size());
  const std::string base_text = to_config_text(base);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      auto& point = result.points[i];
      point.value = values[i];
      try {
        auto cfg = parse_config(base_text, {{key, values[i]}});
        if (!keep_cycles) cfg.record_cycles = false;
        point.report = metrics::summarize(simulate(cfg));
      } catch (const std::exception& e) {
        point.error = e.what();
      }
    }
  };

  const int workers = std::clamp<int>(parallelism, 1, static_cast<int>(std::max<std::size_t>(values.size(), 1)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << sweep.key
      << ",status,cycles,mean_vacation_ns,mean_busy_ns,rho_measured,busy_tries_pct,"
         "busy_tries_pct_thread_mean,total_tries,cpu_proxy,throughput_pps,"
         "latency_mean_ns,latency_p99_ns,dropped,error\n";
  for (const auto& p : sweep.points) {
    out << p.value << ',';
    if (!p.report) {
      // keep the message on one CSV field
      std::string msg = p.error;
      std::replace(msg.begin(), msg.end(), '\n', ';');
      std::replace(msg.begin(), msg.end(), ',', ';');
      out << "error,,,,,,,,,,,,," << msg << '\n';
      continue;
    }
    const auto& g = p.report->global;
    double v = 0.0;
    double b = 0.0;
    for (const auto& q : p.report->queues) {
      v += q.mean_vacation * static_cast<double>(q.cycles);
      b += q.mean_busy * static_cast<double>(q.cycles);
    }
    const double n = static_cast<double>(std::max<std::uint64_t>(g.cycles, 1));
    out << "ok," << g.cycles << ',' << v / n << ',' << b / n << ','
        << (v + b > 0 ? b / (v + b) : 0.0) << ',' << g.busy_tries_pct << ','
        << g.busy_tries_pct_thread_mean << ',' << g.total_tries << ',' << g.cpu_proxy
        << ',' << g.throughput << ',' << g.latency_mean << ',' << g.latency_p99 << ','
        << g.dropped << ",\n";
  }
}

}  // namespace metronome
