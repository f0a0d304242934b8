#include "metronome/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metronome/error.hpp"

namespace metronome::metrics {
namespace {

double pct(std::uint64_t part, std::uint64_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double continuous_density(double x, const analytics::ModelParams& p, Regime regime) {
  if (x < 0.0 || x >= p.t_short) return 0.0;
  if (regime == Regime::high_load) {
    if (p.m_threads < 2) return 0.0;
    return analytics::vacation_pdf_high_load(x, p);
  }
  return p.m_threads / p.t_short * std::pow(1.0 - x / p.t_short, p.m_threads - 1);
}

}  // namespace

SimDuration percentile(std::vector<SimDuration> data, double q) {
  if (data.empty()) return 0;
  const auto n = data.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(data.begin(), data.begin() + (rank - 1), data.end());
  return data[rank - 1];
}

SimulationReport summarize(RunOutput raw) {
  SimulationReport r;
  auto& g = r.global;
  g.horizon = raw.horizon;
  g.measured = raw.horizon > raw.warmup ? raw.horizon - raw.warmup : 0;
  g.arrivals = raw.arrivals_total;
  g.served = raw.served_total;
  g.dropped = raw.dropped_total;
  g.backlog = raw.backlog_total;
  g.conservation_ok = g.arrivals == g.served + g.backlog + g.dropped;
  const double measured = static_cast<double>(g.measured);

  std::vector<std::vector<SimDuration>> vac(raw.queues.size());
  std::vector<std::vector<SimDuration>> busy(raw.queues.size());
  for (const auto& c : raw.cycles) {
    vac[c.queue].push_back(c.vacation);
    busy[c.queue].push_back(c.busy);
  }

  std::uint64_t served_in_window = 0;
  for (std::size_t i = 0; i < raw.queues.size(); ++i) {
    const auto& qc = raw.queues[i];
    QueueSummary s;
    s.index = static_cast<std::uint32_t>(i);
    s.cycles = qc.cycles;
    s.empty_cycles = qc.empty_cycles;
    s.mean_vacation = ratio(qc.vacation_sum, static_cast<double>(qc.cycles));
    s.mean_busy = ratio(qc.busy_sum, static_cast<double>(qc.cycles));
    s.mean_n_vacation = ratio(qc.n_vacation_sum, static_cast<double>(qc.cycles));
    s.vacation_p50 = percentile(vac[i], 0.50);
    s.vacation_p99 = percentile(vac[i], 0.99);
    s.busy_p50 = percentile(busy[i], 0.50);
    s.busy_p99 = percentile(busy[i], 0.99);
    s.rho_measured = ratio(qc.busy_sum, qc.vacation_sum + qc.busy_sum);
    s.rho_estimate = qc.final_rho_estimate;
    s.t_short = qc.final_t_short;
    s.arrivals = qc.arrivals;
    s.served = qc.served;
    s.dropped = qc.dropped;
    s.backlog_final = qc.backlog_final;
    s.total_tries = qc.total_tries;
    s.busy_tries = qc.busy_tries;
    s.busy_tries_pct = pct(qc.busy_tries, qc.total_tries);
    s.mean_backlog = ratio(qc.backlog_area, measured);
    s.mean_wait = ratio(qc.wait_sum, static_cast<double>(qc.waits));
    served_in_window += qc.waits;
    g.cycles += qc.cycles;
    r.queues.push_back(s);
  }

  double awake = 0.0;
  double thread_pct_sum = 0.0;
  for (std::size_t i = 0; i < raw.threads.size(); ++i) {
    const auto& tc = raw.threads[i];
    ThreadSummary s;
    s.id = static_cast<std::uint32_t>(i);
    s.total_tries = tc.total_tries;
    s.busy_tries = tc.busy_tries;
    s.busy_tries_pct = pct(tc.busy_tries, tc.total_tries);
    s.awake_fraction = std::clamp(ratio(static_cast<double>(tc.awake), measured), 0.0, 1.0);
    s.cycles_served = tc.cycles_served;
    g.total_tries += tc.total_tries;
    g.busy_tries += tc.busy_tries;
    thread_pct_sum += s.busy_tries_pct;
    awake += static_cast<double>(tc.awake);
    r.threads.push_back(s);
  }
  g.busy_tries_pct = pct(g.busy_tries, g.total_tries);
  g.busy_tries_pct_thread_mean =
      r.threads.empty() ? 0.0 : thread_pct_sum / static_cast<double>(r.threads.size());
  g.cpu_proxy = std::clamp(
      ratio(awake, static_cast<double>(raw.threads.size()) * measured), 0.0, 1.0);
  g.throughput = ratio(static_cast<double>(served_in_window), measured / 1e9);
  g.latency_mean = ratio(raw.latency_sum, static_cast<double>(raw.latency.total()));
  g.latency_max = raw.latency_max;
  g.latency_p50 = raw.latency.quantile_upper(0.50);
  g.latency_p99 = raw.latency.quantile_upper(0.99);

  r.raw = std::move(raw);
  return r;
}

std::string to_string(Regime regime) {
  return regime == Regime::high_load ? "high_load" : "low_load";
}

double vacation_cdf(double x, const analytics::ModelParams& p, Regime regime) {
  if (x < 0.0) return 0.0;
  if (regime == Regime::high_load && p.m_threads >= 2) {
    return analytics::vacation_cdf_high_load(x, p);
  }
  if (regime == Regime::high_load) {
    return x >= p.t_short ? 1.0 : 0.0;  // single thread: always exactly t_short
  }
  return analytics::vacation_cdf_low_load(x, p);
}

DistributionComparison compare_vacation_distribution(std::span<const double> samples,
                                                     const analytics::ModelParams& p,
                                                     Regime regime,
                                                     std::size_t min_samples) {
  if (samples.size() < min_samples || samples.empty()) {
    throw InsufficientDataError("need at least " + std::to_string(min_samples) +
                                " vacation samples, got " +
                                std::to_string(samples.size()));
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // Equal samples are handled as one step so the atom at t_short is
  // compared against the CDF's left limit.
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double x = sorted[i];
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == x) ++j;
    const double f = vacation_cdf(x, p, regime);
    const double f_left = x > 0.0 ? vacation_cdf(std::nextafter(x, 0.0), p, regime) : 0.0;
    d = std::max({d, static_cast<double>(j) / n - f, f_left - static_cast<double>(i) / n});
    i = j;
  }
  DistributionComparison out;
  out.ks_statistic = std::clamp(d, 0.0, 1.0);
  out.n_samples = sorted.size();
  out.analytic_ref = to_string(regime) + " vacation CDF, M=" +
                     std::to_string(p.m_threads) +
                     ", t_short=" + std::to_string(p.t_short) +
                     "ns, t_long=" + std::to_string(p.t_long) + "ns";
  return out;
}

std::vector<double> vacation_samples(const RunOutput& raw, int queue, bool filtered) {
  std::vector<double> out;
  for (const auto& c : raw.cycles) {
    if (queue >= 0 && c.queue != static_cast<std::uint32_t>(queue)) continue;
    if (filtered && (!c.after_service || c.n_vacation == 0)) continue;
    out.push_back(static_cast<double>(c.vacation));
  }
  return out;
}

CpuProxy cpu_proxy(const SimulationReport& report) {
  CpuProxy out;
  out.total = report.global.cpu_proxy;
  for (const auto& t : report.threads) out.per_thread.push_back(t.awake_fraction);
  return out;
}

std::vector<HistogramRow> vacation_histogram(std::span<const double> samples,
                                             const analytics::ModelParams& p,
                                             Regime regime, double bin_width,
                                             double max_value) {
  if (!(bin_width > 0.0) || !(max_value > 0.0)) {
    throw ParameterError("histogram needs a positive bin width and range");
  }
  const auto bins = static_cast<std::size_t>(std::ceil(max_value / bin_width));
  std::vector<HistogramRow> rows(bins + 1);
  for (std::size_t i = 0; i < bins; ++i) {
    rows[i].lo = static_cast<double>(i) * bin_width;
    rows[i].hi = static_cast<double>(i + 1) * bin_width;
  }
  rows[bins].lo = static_cast<double>(bins) * bin_width;
  rows[bins].hi = std::numeric_limits<double>::infinity();
  for (double s : samples) {
    const auto i = s < 0.0 ? 0 : std::min(static_cast<std::size_t>(s / bin_width), bins);
    ++rows[i].count;
  }
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    const bool last = i == bins;
    if (!last && n > 0) row.density = static_cast<double>(row.count) / (n * bin_width);
    if (!last) {
      row.analytic_density = continuous_density(0.5 * (row.lo + row.hi), p, regime);
    }
    // Mass on [lo, hi): difference of left limits, so an atom at t_short
    // lands in the bin that contains t_short.
    auto left_limit = [&](double x) {
      return x <= 0.0 ? 0.0 : vacation_cdf(std::nextafter(x, 0.0), p, regime);
    };
    const double upper = last ? 1.0 : left_limit(row.hi);
    row.analytic_mass = std::max(0.0, upper - left_limit(row.lo));
  }
  return rows;
}

}  // namespace metronome::metrics
