#include "metronome/analytics.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "metronome/error.hpp"
#include "metronome/rng.hpp"
#include "oracle.hpp"

namespace {

using namespace metronome;
using namespace metronome::analytics;

constexpr double kUs = 1000.0;

ModelParams params(int m, double ts_us, double tl_us, int n = 1, double target_us = 10.0) {
  ModelParams p;
  p.m_threads = m;
  p.n_queues = n;
  p.t_short = ts_us * kUs;
  p.t_long = tl_us * kUs;
  p.target_vacation = target_us * kUs;
  return p;
}

TEST(ExpectedBusy, Examples) {
  EXPECT_DOUBLE_EQ(expected_busy_given_vacation(10 * kUs, LoadPoint::from_rho(0.5)), 10 * kUs);
  EXPECT_DOUBLE_EQ(expected_busy_given_vacation(10 * kUs, LoadPoint::from_rho(0.0)), 0.0);
  const auto lp = LoadPoint::from_rates(14.88e6, 29.25e6);
  EXPECT_NEAR(expected_busy_given_vacation(19.55 * kUs, lp),
              19.55 * kUs * (14.88 / 29.25) / (1 - 14.88 / 29.25), 1e-6);
}

TEST(ExpectedBusy, UnstableLoadThrows) {
  EXPECT_THROW(expected_busy_given_vacation(kUs, LoadPoint::from_rho(1.0)), StabilityError);
  EXPECT_THROW(expected_busy_given_vacation(kUs, LoadPoint::from_rho(1.5)), StabilityError);
  EXPECT_THROW(LoadPoint::from_rates(1.0, 0.0), ParameterError);
}

TEST(LoadFromPeriods, Examples) {
  EXPECT_DOUBLE_EQ(load_from_periods(10 * kUs, 10 * kUs), 0.5);
  EXPECT_DOUBLE_EQ(load_from_periods(0.0, 10 * kUs), 0.0);
  EXPECT_NEAR(load_from_periods(20.24, 19.55), 20.24 / (20.24 + 19.55), 1e-15);
  EXPECT_THROW(load_from_periods(0.0, 0.0), DomainError);
}

TEST(LoadFromPeriods, InvertsExpectedBusy) {
  for (double rho = 0.0; rho <= 0.99 + 1e-12; rho += 0.01) {
    for (double v : {1.0, 37.0, 10 * kUs, 1e9}) {
      const double b = expected_busy_given_vacation(v, LoadPoint::from_rho(rho));
      EXPECT_NEAR(load_from_periods(b, v), rho, 1e-12) << "rho=" << rho << " v=" << v;
    }
  }
}

TEST(HighLoadCdf, Examples) {
  const auto p = params(3, 10, 500);
  EXPECT_EQ(vacation_cdf_high_load(0.0, p), 0.0);
  EXPECT_EQ(vacation_cdf_high_load(10 * kUs, p), 1.0);
  EXPECT_NEAR(vacation_cdf_high_load(9.99 * kUs, p), 1 - std::pow(1 - 9.99 / 500, 2), 1e-15);
  EXPECT_NEAR(vacation_cdf_high_load(9.99 * kUs, p), 0.03956, 1e-5);
  EXPECT_THROW(vacation_cdf_high_load(kUs, params(1, 10, 500)), ParameterError);
}

TEST(HighLoadCdf, MatchesMinimumOfTimers) {
  for (int m = 2; m <= 8; ++m) {
    for (double ratio : {0.002, 0.02, 0.3, 1.0}) {
      const auto p = params(m, 500 * ratio, 500);
      for (int i = 0; i <= 50; ++i) {
        const double x = p.t_short * i / 50.0;
        EXPECT_NEAR(vacation_cdf_high_load(x, p),
                    oracle::high_load_cdf(x, m, p.t_short, p.t_long), 1e-12);
      }
    }
  }
}

TEST(MeanHighLoad, Examples) {
  EXPECT_NEAR(mean_vacation_high_load(params(5, 50, 50)), 10 * kUs, 1e-9);
  EXPECT_NEAR(mean_vacation_high_load(params(3, 10, 500)) / kUs, 9.8013, 5e-5);
  EXPECT_NEAR(mean_vacation_high_load(params(1, 10, 500)), 10 * kUs, 1e-9);
  EXPECT_NEAR(mean_vacation_high_load(params(1, 10, 10)), 10 * kUs, 1e-9);
}

TEST(MeanHighLoad, EqualsIntegratedSurvival) {
  for (int m = 1; m <= 8; ++m) {
    for (double ratio : {0.002, 0.01, 0.1, 0.5, 1.0}) {
      const auto p = params(m, 500 * ratio, 500);
      const double ref = oracle::integrate(
          [&](double x) { return oracle::high_load_survival(x, m, p.t_short, p.t_long); },
          0.0, p.t_short);
      EXPECT_NEAR(mean_vacation_high_load(p) / ref, 1.0, 1e-6) << "m=" << m << " r=" << ratio;
    }
  }
}

TEST(BackupSuccess, Examples) {
  EXPECT_DOUBLE_EQ(backup_success_prob(params(3, 50, 50)), 0.0);
  EXPECT_NEAR(backup_success_prob(params(2, 10, 500)), 0.98, 1e-12);
  EXPECT_NEAR(backup_success_prob(params(3, 10, 500)), 0.4802, 1e-12);
  EXPECT_THROW(backup_success_prob(params(1, 10, 500)), ParameterError);
}

TEST(LowLoadCdf, Examples) {
  const auto p = params(2, 50, 50);
  EXPECT_EQ(vacation_cdf_low_load(0.0, p), 0.0);
  EXPECT_EQ(vacation_cdf_low_load(50 * kUs, p), 1.0);
  EXPECT_NEAR(vacation_cdf_low_load(25 * kUs, p), 0.75, 1e-15);
  EXPECT_NEAR(mean_vacation_low_load(params(3, 30, 500)), 10 * kUs, 1e-9);
}

// The low-load CDF with exponent M integrates to T_S/(M+1), while the
// reported mean is T_S/M: the all-primary limit of the general mean, which
// the adaptive timer rule is built on. Both are pinned here.
TEST(LowLoadCdf, MeanVersusIntegral) {
  for (int m = 1; m <= 8; ++m) {
    const auto p = params(m, 30, 500);
    const double ref = oracle::integrate(
        [&](double x) { return 1.0 - oracle::low_load_cdf(x, m, p.t_short); }, 0.0, p.t_short);
    EXPECT_NEAR(ref / (p.t_short / (m + 1)), 1.0, 1e-9);
    EXPECT_NEAR(mean_vacation_low_load(p), p.t_short / m, 1e-9);
    EXPECT_NEAR(mean_vacation_low_load(p), mean_vacation_general(p, 1.0).exact, 1e-6);
  }
}

TEST(HighLoadPdf, Examples) {
  EXPECT_NEAR(vacation_pdf_high_load(0.0, params(2, 10, 50)) * kUs, 0.02, 1e-15);
  EXPECT_NEAR(vacation_pdf_high_load(0.0, params(3, 50, 50)) * kUs, 0.04, 1e-15);
  EXPECT_THROW(vacation_pdf_high_load(50 * kUs, params(3, 50, 50)), DomainError);
  EXPECT_THROW(vacation_pdf_high_load(0.0, params(1, 50, 50)), ParameterError);
}

TEST(HighLoadPdf, IntegratesToOneWithAtom) {
  for (int m = 2; m <= 8; ++m) {
    for (double ratio : {0.002, 0.005, 0.05, 0.2, 0.7, 1.0}) {
      const auto p = params(m, 500 * ratio, 500);
      const double mass = oracle::integrate(
          [&](double x) { return vacation_pdf_high_load(x, p); }, 0.0,
          std::nextafter(p.t_short, 0.0));
      EXPECT_NEAR(mass + vacation_atom_high_load(p), 1.0, 1e-9);
      EXPECT_NEAR(vacation_atom_high_load(p), std::pow(1 - ratio, m - 1), 1e-12);
    }
  }
}

TEST(HighLoadPdf, IsDerivativeOfCdf) {
  const auto p = params(4, 20, 100);
  for (double x = 0.5 * kUs; x < p.t_short - kUs; x += 1.7 * kUs) {
    const double h = 1.0;
    const double fd =
        (vacation_cdf_high_load(x + h, p) - vacation_cdf_high_load(x - h, p)) / (2 * h);
    EXPECT_NEAR(vacation_pdf_high_load(x, p), fd, 1e-9);
  }
}

TEST(MeanGeneral, Examples) {
  auto p = params(3, 30, 500);
  EXPECT_NEAR(mean_vacation_general(p, 1.0).approx, 10 * kUs, 1e-9);
  for (int m : {1, 2, 5, 8}) {
    p = params(m, 30, 500);
    EXPECT_NEAR(mean_vacation_general(p, 0.0).approx, 30 * kUs, 1e-9);
    EXPECT_NEAR(mean_vacation_general(p, 1e-9).approx, 30 * kUs, 1e-3);
  }
  EXPECT_NEAR(mean_vacation_general(params(2, 20, 500), 0.5).approx, 15 * kUs, 1e-9);
  EXPECT_THROW(mean_vacation_general(p, 1.5), DomainError);
}

TEST(MeanGeneral, ExactMatchesMixtureIntegral) {
  // Condition on how many of the M-1 others are primaries, then integrate
  // the survival of the minimum of all wake-ups.
  for (int m = 1; m <= 6; ++m) {
    for (double prob : {0.0, 0.1, 0.5, 0.9, 1.0}) {
      const auto p = params(m, 20, 300);
      double ref = 0.0;
      for (int k = 0; k < m; ++k) {
        const double w = std::tgamma(m) / (std::tgamma(k + 1) * std::tgamma(m - k)) *
                         std::pow(prob, k) * std::pow(1 - prob, m - 1 - k);
        ref += w * oracle::integrate(
                       [&](double x) {
                         return std::pow(1 - x / p.t_short, k) *
                                std::pow(1 - x / p.t_long, m - 1 - k);
                       },
                       0.0, p.t_short);
      }
      EXPECT_NEAR(mean_vacation_general(p, prob).exact / ref, 1.0, 1e-9)
          << "m=" << m << " p=" << prob;
    }
  }
}

TEST(MeanGeneral, ExactReducesToHighLoadMeanAtZeroPrimaries) {
  for (int m = 1; m <= 8; ++m) {
    const auto p = params(m, 10, 500);
    EXPECT_NEAR(mean_vacation_general(p, 0.0).exact, mean_vacation_high_load(p), 1e-9);
  }
}

TEST(MeanGeneral, ApproximationWithinFivePercentWhenLongTimerDominates) {
  for (double ratio : {70.0, 100.0, 500.0}) {
    for (int m = 2; m <= 8; ++m) {
      for (int i = 0; i <= 95; ++i) {
        const double prob = 0.05 + 0.01 * i;
        const auto g = mean_vacation_general(params(m, 10, 10 * ratio), prob);
        EXPECT_LE(std::abs(g.exact - g.approx) / g.exact, 0.05)
            << "ratio=" << ratio << " m=" << m << " p=" << prob;
      }
    }
  }
}

TEST(MeanGeneral, ApproximationErrorAtRatioFiftyCorner) {
  // At T_L/T_S = 50 the gap peaks at M=8, p=0.05.
  const auto g = mean_vacation_general(params(8, 10, 500), 0.05);
  const double a = 0.05 / 10.0 + 0.95 / 500.0;
  const double exact = (1 - std::pow(0.95 * (1 - 10.0 / 500.0), 8)) / (8 * a);
  const double approx = 10.0 / 8 * (1 - std::pow(0.95, 8)) / 0.05;
  EXPECT_NEAR(g.exact / kUs, exact, 1e-9);
  EXPECT_NEAR(g.approx / kUs, approx, 1e-9);
  EXPECT_NEAR(std::abs(exact - approx) / exact, 0.0663, 1e-4);
}

TEST(AdaptiveTs, Examples) {
  EXPECT_NEAR(adaptive_ts(3, 0.0, 10 * kUs), 30 * kUs, 1e-9);
  EXPECT_NEAR(adaptive_ts(3, 1.0, 10 * kUs), 10 * kUs, 1e-9);
  EXPECT_NEAR(adaptive_ts(3, 1.0 - 1e-12, 10 * kUs), 10 * kUs, 1e-3);
  EXPECT_NEAR(adaptive_ts(3, 0.5, 10 * kUs) / kUs, 17.1429, 5e-5);
  EXPECT_NEAR(adaptive_ts(1, 0.7, 10 * kUs), 10 * kUs, 1e-9);
}

TEST(AdaptiveTs, MonotoneBoundedAndMatchesRatioForm) {
  for (int m = 1; m <= 8; ++m) {
    double prev = INFINITY;
    for (int i = 0; i <= 1000; ++i) {
      const double rho = i / 1000.0;
      const double ts = adaptive_ts(m, rho, 10 * kUs);
      EXPECT_LE(ts, prev + 1e-9);
      EXPECT_GE(ts, 10 * kUs - 1e-9);
      EXPECT_LE(ts, m * 10 * kUs + 1e-9);
      if (rho < 0.999) {
        EXPECT_NEAR(ts / oracle::timer_for_target(m, rho, 10 * kUs), 1.0, 1e-10);
      }
      prev = ts;
    }
  }
}

TEST(AdaptiveTs, HoldsApproximateMeanAtTarget) {
  for (int m = 1; m <= 8; ++m) {
    for (double rho : {0.05, 0.3, 0.6, 0.9}) {
      const double ts = adaptive_ts(m, rho, 10 * kUs);
      auto p = params(m, ts / kUs, 1e6);
      EXPECT_NEAR(mean_vacation_general(p, 1.0 - rho).approx, 10 * kUs, 1e-6);
    }
  }
}

TEST(AdaptiveTsMultiqueue, Examples) {
  for (double rho : {0.0, 0.3, 0.99}) {
    EXPECT_NEAR(adaptive_ts_multiqueue(4, 4, rho, 10 * kUs), 10 * kUs, 1e-9);
  }
  EXPECT_NEAR(adaptive_ts_multiqueue(6, 3, 0.5, 15 * kUs), 20 * kUs, 1e-9);
  EXPECT_NEAR(adaptive_ts_multiqueue(6, 3, 0.0, 15 * kUs), 30 * kUs, 1e-9);
  EXPECT_THROW(adaptive_ts_multiqueue(3, 4, 0.5, 10 * kUs), ParameterError);
}

TEST(AdaptiveTsMultiqueue, FractionalThreadsPerQueue) {
  for (double rho : {0.0, 0.1, 0.5, 0.9, 0.999999, 1.0}) {
    const double got = adaptive_ts_multiqueue(5, 2, rho, 10 * kUs);
    EXPECT_NEAR(got / oracle::timer_for_target(2.5, rho, 10 * kUs), 1.0, 1e-6) << rho;
    EXPECT_GE(got, 10 * kUs - 1e-6);
    EXPECT_LE(got, 25 * kUs + 1e-6);
  }
  EXPECT_DOUBLE_EQ(adaptive_ts_multiqueue(3, 1, 0.4, 10 * kUs), adaptive_ts(3, 0.4, 10 * kUs));
}

TEST(CdfProperties, MonotoneAndBoundedOnRandomInputs) {
  Rng rng(42);
  for (int trial = 0; trial < 2000; ++trial) {
    const int m = 1 + static_cast<int>(rng.index(8));
    const double tl = rng.uniform(1.0, 1e6);
    const double ts = tl * rng.uniform(0.002, 1.0);
    auto p = params(m, ts / kUs, tl / kUs);
    double x1 = rng.uniform(0.0, 1.2 * ts);
    double x2 = rng.uniform(0.0, 1.2 * ts);
    if (x1 > x2) std::swap(x1, x2);
    const double lo1 = vacation_cdf_low_load(x1, p);
    const double lo2 = vacation_cdf_low_load(x2, p);
    EXPECT_LE(lo1, lo2);
    EXPECT_GE(lo1, 0.0);
    EXPECT_LE(lo2, 1.0);
    if (m >= 2) {
      const double h1 = vacation_cdf_high_load(x1, p);
      const double h2 = vacation_cdf_high_load(x2, p);
      EXPECT_LE(h1, h2);
      EXPECT_GE(h1, 0.0);
      EXPECT_LE(h2, 1.0);
    }
  }
}

TEST(ModelParams, Validation) {
  EXPECT_NO_THROW(params(3, 10, 500).validate());
  EXPECT_THROW(params(0, 10, 500).validate(), ParameterError);
  EXPECT_THROW(params(3, 600, 500).validate(), ParameterError);
  EXPECT_THROW(params(3, 10, 500, 4).validate(), ParameterError);
  EXPECT_THROW(params(3, 0, 500).validate(), ParameterError);
}

}  // namespace
