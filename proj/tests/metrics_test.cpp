#include "metronome/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "metronome/config.hpp"
#include "metronome/error.hpp"
#include "oracle.hpp"

namespace {

using namespace metronome;
using metrics::Regime;

analytics::ModelParams model(int m, double ts, double tl) {
  analytics::ModelParams p;
  p.m_threads = m;
  p.t_short = ts;
  p.t_long = tl;
  return p;
}

RunOutput one_cycle() {
  RunOutput r;
  r.horizon = micros(100);
  r.threads.resize(1);
  r.queues.resize(1);
  r.cycles.push_back({0, 0, 0, micros(10), micros(10), micros(10), 5, 5, true});
  auto& q = r.queues[0];
  q.cycles = 1;
  q.vacation_sum = 10'000;
  q.busy_sum = 10'000;
  q.n_vacation_sum = 5;
  return r;
}

TEST(Summarize, OneCycle) {
  const auto rep = metrics::summarize(one_cycle());
  ASSERT_EQ(rep.queues.size(), 1u);
  EXPECT_DOUBLE_EQ(rep.queues[0].mean_vacation, 10'000.0);
  EXPECT_DOUBLE_EQ(rep.queues[0].mean_busy, 10'000.0);
  EXPECT_DOUBLE_EQ(rep.queues[0].rho_measured, 0.5);
  EXPECT_EQ(rep.queues[0].vacation_p50, micros(10));
}

TEST(Summarize, EmptyRunHasNoNaNs) {
  RunOutput r;
  r.threads.resize(2);
  r.queues.resize(1);
  const auto rep = metrics::summarize(r);
  EXPECT_EQ(rep.global.cycles, 0u);
  EXPECT_TRUE(rep.global.conservation_ok);
  for (double v : {rep.global.cpu_proxy, rep.global.busy_tries_pct, rep.global.throughput,
                   rep.global.latency_mean, rep.queues[0].mean_vacation,
                   rep.queues[0].rho_measured, rep.queues[0].mean_backlog}) {
    EXPECT_FALSE(std::isnan(v));
    EXPECT_EQ(v, 0.0);
  }
}

TEST(Summarize, SingleThreadHasNoBusyTries) {
  ScenarioConfig c;
  c.m_threads = 1;
  c.arrivals.rate = 20e6;
  c.horizon = millis(100);
  const auto rep = metrics::summarize(simulate(c));
  EXPECT_GT(rep.global.total_tries, 0u);
  EXPECT_EQ(rep.global.busy_tries_pct, 0.0);
}

TEST(Summarize, DeterministicAggregation) {
  ScenarioConfig c;
  c.arrivals.rate = 10e6;
  c.horizon = millis(50);
  const auto raw = simulate(c);
  EXPECT_EQ(metrics::summarize(raw), metrics::summarize(raw));
}

TEST(Summarize, ReportInvariants) {
  ScenarioConfig c;
  c.m_threads = 4;
  c.n_queues = 2;
  c.arrivals.rate = 30e6;
  c.horizon = millis(100);
  const auto rep = metrics::summarize(simulate(c));
  for (const auto& t : rep.threads) {
    EXPECT_LE(t.busy_tries, t.total_tries);
    EXPECT_GE(t.awake_fraction, 0.0);
    EXPECT_LE(t.awake_fraction, 1.0);
  }
  double awake = 0.0;
  for (const auto& t : rep.threads) awake += t.awake_fraction;
  EXPECT_NEAR(rep.global.cpu_proxy, awake / 4, 1e-9);
  EXPECT_EQ(rep.raw.latency.total(), rep.global.served);
}

TEST(Summarize, UnbalancedQueuesOrdering) {
  const auto c = preset_config("table4-unbalanced", {{"horizon", "300ms"}});
  const auto rep = metrics::summarize(simulate(c));
  std::size_t hot = 0;
  for (std::size_t i = 1; i < rep.queues.size(); ++i) {
    if (rep.queues[i].arrivals > rep.queues[hot].arrivals) hot = i;
  }
  for (std::size_t i = 0; i < rep.queues.size(); ++i) {
    if (i == hot) continue;
    EXPECT_GT(rep.queues[hot].rho_measured, rep.queues[i].rho_measured);
    EXPECT_LT(rep.queues[hot].total_tries, rep.queues[i].total_tries);
  }
}

TEST(Percentile, NearestRank) {
  std::vector<SimDuration> d{15, 20, 35, 40, 50};
  EXPECT_EQ(metrics::percentile(d, 0.05), 15u);
  EXPECT_EQ(metrics::percentile(d, 0.30), 20u);
  EXPECT_EQ(metrics::percentile(d, 0.40), 20u);
  EXPECT_EQ(metrics::percentile(d, 0.50), 35u);
  EXPECT_EQ(metrics::percentile(d, 1.00), 50u);
  EXPECT_EQ(metrics::percentile({}, 0.5), 0u);
}

TEST(Ks, SelfTestOnAnalyticSamples) {
  const auto p = model(3, 50'000, 50'000);
  Rng rng(17);
  std::vector<double> xs(100'000);
  for (auto& x : xs) x = oracle::sample_high_load(rng, 3, p.t_short, p.t_long);
  const auto cmp = metrics::compare_vacation_distribution(xs, p, Regime::high_load);
  EXPECT_LT(cmp.ks_statistic, 0.01);
  EXPECT_EQ(cmp.n_samples, xs.size());
  EXPECT_NEAR(cmp.ks_statistic,
              oracle::ks_distance(xs, [&](double x) {
                return oracle::high_load_cdf(x, 3, p.t_short, p.t_long);
              }),
              1e-12);
}

TEST(Ks, SelfTestHandlesAtom) {
  const auto p = model(3, 10'000, 500'000);
  Rng rng(5);
  std::vector<double> xs(100'000);
  for (auto& x : xs) x = oracle::sample_high_load(rng, 3, p.t_short, p.t_long);
  EXPECT_LT(metrics::compare_vacation_distribution(xs, p, Regime::high_load).ks_statistic, 0.01);
}

TEST(Ks, LowLoadSelfTest) {
  const auto p = model(4, 30'000, 500'000);
  Rng rng(6);
  std::vector<double> xs(100'000);
  for (auto& x : xs) x = oracle::sample_low_load(rng, 4, p.t_short);
  EXPECT_LT(metrics::compare_vacation_distribution(xs, p, Regime::low_load).ks_statistic, 0.01);
  EXPECT_GT(metrics::compare_vacation_distribution(xs, p, Regime::high_load).ks_statistic, 0.1);
}

TEST(Ks, ShrinksWithSampleSize) {
  const auto p = model(5, 50'000, 50'000);
  Rng rng(29);
  auto mean_ks = [&](std::size_t n) {
    double sum = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<double> xs(n);
      for (auto& x : xs) x = oracle::sample_high_load(rng, 5, p.t_short, p.t_long);
      sum += metrics::compare_vacation_distribution(xs, p, Regime::high_load).ks_statistic;
    }
    return sum / 5;
  };
  const double small = mean_ks(10'000);
  const double large = mean_ks(100'000);
  EXPECT_LT(large, small);
  EXPECT_LT(large, 0.01);
}

TEST(Ks, RejectsTooFewSamples) {
  std::vector<double> xs(9'999, 1.0);
  EXPECT_THROW(metrics::compare_vacation_distribution(xs, model(3, 10, 10), Regime::high_load),
               InsufficientDataError);
  std::vector<double> none;
  EXPECT_THROW(metrics::compare_vacation_distribution(none, model(3, 10, 10), Regime::high_load, 0),
               InsufficientDataError);
}

TEST(Ks, HeavyTailJitterWidensTheGap) {
  auto c = preset_config("fig3", {{"horizon", "3s"}});
  const auto p = c.model();
  const auto plain = metrics::vacation_samples(simulate(c), 0, true);
  c.jitter.kind = JitterKind::heavy_tail;
  c.jitter.probability = 0.2;
  c.jitter.a = micros(20);
  c.jitter.shape = 1.2;
  const auto jittered = metrics::vacation_samples(simulate(c), 0, true);
  const double ks_plain =
      metrics::compare_vacation_distribution(plain, p, Regime::high_load).ks_statistic;
  const double ks_jitter =
      metrics::compare_vacation_distribution(jittered, p, Regime::high_load).ks_statistic;
  EXPECT_GT(ks_jitter, ks_plain);
  EXPECT_GT(*std::max_element(jittered.begin(), jittered.end()), p.t_long);
  EXPECT_LE(*std::max_element(plain.begin(), plain.end()), p.t_long);
}

TEST(VacationSamples, Filtering) {
  RunOutput r;
  r.cycles = {{0, 0, 0, 0, 100, 0, 0, 0, true},
              {1, 0, 0, 0, 200, 10, 3, 0, false},
              {2, 1, 0, 0, 300, 10, 3, 0, true},
              {3, 0, 0, 0, 400, 10, 3, 0, true}};
  EXPECT_EQ(metrics::vacation_samples(r, -1, false).size(), 4u);
  EXPECT_EQ(metrics::vacation_samples(r, -1, true), (std::vector<double>{300, 400}));
  EXPECT_EQ(metrics::vacation_samples(r, 0, true), (std::vector<double>{400}));
}

TEST(CpuProxy, ZeroWithoutTrafficOrWakeCost) {
  ScenarioConfig c;
  c.arrivals.rate = 0.0;
  c.drain.wake_overhead = 0;
  c.horizon = millis(50);
  const auto rep = metrics::summarize(simulate(c));
  EXPECT_EQ(metrics::cpu_proxy(rep).total, 0.0);
  EXPECT_EQ(metrics::cpu_proxy(rep).per_thread.size(), 3u);
}

TEST(CpuProxy, LinearInWakeCost) {
  ScenarioConfig c;
  c.arrivals.rate = 0.0;
  c.horizon = millis(50);
  c.drain.wake_overhead = micros(1);
  const double one = metrics::summarize(simulate(c)).global.cpu_proxy;
  c.drain.wake_overhead = micros(2);
  const double two = metrics::summarize(simulate(c)).global.cpu_proxy;
  EXPECT_GT(one, 0.0);
  EXPECT_NEAR(two / one, 2.0, 1e-9);
}

TEST(CpuProxy, SingleThreadApproachesOneNearSaturation) {
  ScenarioConfig c;
  c.m_threads = 1;
  c.adaptation.enabled = false;
  c.drain.mu_rate = 2e6;
  c.arrivals.rate = 0.99 * 2e6;
  c.horizon = seconds(1);
  const double proxy = metrics::summarize(simulate(c)).global.cpu_proxy;
  EXPECT_GT(proxy, 0.97);
  EXPECT_LE(proxy, 1.0);
}

TEST(VacationHistogram, CompleteAndNormalised) {
  const auto p = model(3, 10'000, 500'000);
  Rng rng(3);
  std::vector<double> xs(20'000);
  for (auto& x : xs) x = oracle::sample_high_load(rng, 3, p.t_short, p.t_long);
  xs.push_back(2e6);
  xs.push_back(-1.0);
  const auto rows = metrics::vacation_histogram(xs, p, Regime::high_load, 1'000, 30'000);
  ASSERT_EQ(rows.size(), 31u);
  std::uint64_t count = 0;
  double mass = 0.0;
  for (const auto& row : rows) {
    count += row.count;
    mass += row.analytic_mass;
  }
  EXPECT_EQ(count, xs.size());
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_TRUE(std::isinf(rows.back().hi));
  EXPECT_EQ(rows.back().count, 1u);
  // The atom sits in the bin starting at t_short.
  EXPECT_NEAR(rows[10].analytic_mass, std::pow(1 - 10.0 / 500, 2), 1e-12);
  EXPECT_NEAR(rows[0].analytic_density, analytics::vacation_pdf_high_load(500, p), 1e-15);
  EXPECT_THROW(metrics::vacation_histogram(xs, p, Regime::high_load, 0, 10), ParameterError);
}

TEST(VacationCdf, SingleThreadIsAStep) {
  const auto p = model(1, 10'000, 500'000);
  EXPECT_EQ(metrics::vacation_cdf(9'999, p, Regime::high_load), 0.0);
  EXPECT_EQ(metrics::vacation_cdf(10'000, p, Regime::high_load), 1.0);
}

}  // namespace
