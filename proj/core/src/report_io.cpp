#include "metronome/report_io.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>

#include "metronome/config.hpp"
#include "metronome/error.hpp"

namespace metronome {
namespace fs = std::filesystem;
namespace {

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body,
                std::vector<fs::path>& written) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << std::setprecision(10);
  body(out);
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
  written.push_back(path);
}

std::vector<metrics::HistogramRow> histogram_for(const metrics::SimulationReport& report,
                                                 const ScenarioConfig& config) {
  const auto samples = metrics::vacation_samples(report.raw, -1, true);
  if (samples.empty()) return {};
  const double max = static_cast<double>(
      config.vacation_hist_max > 0 ? config.vacation_hist_max : 2 * config.t_long);
  return metrics::vacation_histogram(samples, config.model(), default_regime(config),
                                     static_cast<double>(config.vacation_bin), max);
}

}  // namespace

metrics::Regime default_regime(const ScenarioConfig& config) {
  return config.m_threads >= 2 ? metrics::Regime::high_load : metrics::Regime::low_load;
}

std::vector<fs::path> emit_report(const metrics::SimulationReport& report,
                                  const ScenarioConfig& config, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  const auto& raw = report.raw;

  write_file(dir / "cycles.csv", [&](std::ostream& o) {
    o << "cycle_id,queue,thread,V_ns,B_ns,N_V,N_B\n";
    for (const auto& c : raw.cycles) {
      o << c.id << ',' << c.queue << ',' << c.thread << ',' << c.vacation << ',' << c.busy
        << ',' << c.n_vacation << ',' << c.n_busy << '\n';
    }
  }, written);

  write_file(dir / "threads.csv", [&](std::ostream& o) {
    o << "thread,total_tries,busy_tries,busy_tries_pct,awake_fraction,cycles_served\n";
    for (const auto& t : report.threads) {
      o << t.id << ',' << t.total_tries << ',' << t.busy_tries << ',' << t.busy_tries_pct
        << ',' << t.awake_fraction << ',' << t.cycles_served << '\n';
    }
  }, written);

  write_file(dir / "queues.csv", [&](std::ostream& o) {
    o << "queue,cycles,empty_cycles,mean_V_ns,mean_B_ns,mean_N_V,V_p50_ns,V_p99_ns,"
         "B_p50_ns,B_p99_ns,rho_measured,rho_estimate,t_short_ns,arrivals,served,"
         "dropped,backlog_final,total_tries,busy_tries,busy_tries_pct,mean_backlog,"
         "mean_wait_ns\n";
    for (const auto& q : report.queues) {
      o << q.index << ',' << q.cycles << ',' << q.empty_cycles << ',' << q.mean_vacation
        << ',' << q.mean_busy << ',' << q.mean_n_vacation << ',' << q.vacation_p50 << ','
        << q.vacation_p99 << ',' << q.busy_p50 << ',' << q.busy_p99 << ','
        << q.rho_measured << ',' << q.rho_estimate << ',' << q.t_short << ','
        << q.arrivals << ',' << q.served << ',' << q.dropped << ',' << q.backlog_final
        << ',' << q.total_tries << ',' << q.busy_tries << ',' << q.busy_tries_pct << ','
        << q.mean_backlog << ',' << q.mean_wait << '\n';
    }
  }, written);

  write_file(dir / "latency_histogram.csv", [&](std::ostream& o) {
    o << "bin_lo_ns,bin_hi_ns,count\n";
    for (std::size_t i = 0; i < LogHistogram::kBins; ++i) {
      if (raw.latency.count(i) == 0) continue;
      const auto [lo, hi] = LogHistogram::edges(i);
      o << lo << ',' << hi << ',' << raw.latency.count(i) << '\n';
    }
  }, written);

  write_file(dir / "controller_trace.csv", [&](std::ostream& o) {
    o << "time_ns,queue,rho_est,t_short_ns\n";
    for (const auto& s : raw.controller_trace) {
      o << s.time << ',' << s.queue << ',' << s.rho_estimate << ',' << s.t_short << '\n';
    }
  }, written);

  write_file(dir / "windows.csv", [&](std::ostream& o) {
    o << "window_start_ns,arrivals,served,dropped,offered_pps,served_pps\n";
    const double width = static_cast<double>(config.window) / 1e9;
    for (const auto& w : raw.windows) {
      o << w.start << ',' << w.arrivals << ',' << w.served << ',' << w.dropped << ','
        << static_cast<double>(w.arrivals) / width << ','
        << static_cast<double>(w.served) / width << '\n';
    }
  }, written);

  const auto hist = histogram_for(report, config);
  write_file(dir / "vacation_hist.csv", [&](std::ostream& o) {
    o << "bin_lo_ns,bin_hi_ns,count,density_per_us\n";
    for (const auto& r : hist) {
      o << r.lo << ',' << r.hi << ',' << r.count << ',' << r.density * 1e3 << '\n';
    }
  }, written);
  write_file(dir / "vacation_pdf_analytic.csv", [&](std::ostream& o) {
    o << "bin_lo_ns,bin_hi_ns,pdf_per_us,bin_mass\n";
    for (const auto& r : hist) {
      o << r.lo << ',' << r.hi << ',' << r.analytic_density * 1e3 << ',' << r.analytic_mass
        << '\n';
    }
  }, written);

  write_file(dir / "config.txt", [&](std::ostream& o) { o << to_config_text(config); },
             written);
  write_file(dir / "summary.txt", [&](std::ostream& o) { write_summary(o, report, config); },
             written);
  return written;
}

void write_summary(std::ostream& o, const metrics::SimulationReport& report,
                   const ScenarioConfig& config) {
  const auto& g = report.global;
  o << "scenario: " << config.name << '\n';
  o << "measured span: " << to_seconds(g.measured) << " s of " << to_seconds(g.horizon)
    << " s\n";
  o << "cycles: " << g.cycles << '\n';
  o << "arrivals = served + backlog + dropped: " << g.arrivals << " = " << g.served
    << " + " << g.backlog << " + " << g.dropped << ": "
    << (g.conservation_ok ? "OK" : "FAILED") << '\n';
  o << "throughput: " << g.throughput << " pps\n";
  o << "busy tries: " << g.busy_tries << " / " << g.total_tries << " ("
    << g.busy_tries_pct << "% of all tries, " << g.busy_tries_pct_thread_mean
    << "% mean per thread)\n";
  o << "cpu proxy: " << g.cpu_proxy << '\n';
  o << "latency: mean " << g.latency_mean << " ns, p50 <= " << g.latency_p50
    << " ns, p99 <= " << g.latency_p99 << " ns, max " << g.latency_max << " ns\n";
  for (const auto& q : report.queues) {
    o << "queue " << q.index << ": cycles " << q.cycles << ", mean V " << q.mean_vacation
      << " ns, mean B " << q.mean_busy << " ns, rho measured " << q.rho_measured
      << ", rho estimate " << q.rho_estimate << ", t_short " << q.t_short
      << " ns, tries " << q.total_tries << " (" << q.busy_tries_pct << "% busy), dropped "
      << q.dropped << '\n';
  }
  const auto samples = metrics::vacation_samples(report.raw, -1, true);
  if (samples.size() >= metrics::kMinVacationSamples && config.n_queues == 1) {
    const auto cmp = metrics::compare_vacation_distribution(samples, config.model(),
                                                            default_regime(config));
    o << "vacation KS distance: " << cmp.ks_statistic << " over " << cmp.n_samples
      << " samples vs " << cmp.analytic_ref << '\n';
  }
  o << "\n# resolved configuration\n" << to_config_text(config);
}

}  // namespace metronome
