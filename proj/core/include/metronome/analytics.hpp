#pragma once

// Closed-form renewal-cycle model of sleep-and-wake packet retrieval.
//
// All durations are nanoseconds held as double, rates are packets per
// second. Every function here is pure.

namespace metronome::analytics {

struct ModelParams {
  int m_threads = 3;
  int n_queues = 1;
  double t_short = 10'000.0;
  double t_long = 500'000.0;
  double target_vacation = 10'000.0;

  // Throws ParameterError on any violated invariant.
  void validate() const;
};

struct LoadPoint {
  double lambda_rate = 0.0;
  double mu_rate = 1.0;
  double rho = 0.0;

  // Builds a load point with rho = lambda / mu; rejects mu <= 0 and
  // negative lambda. rho >= 1 is representable and rejected by the
  // formulas that need stability.
  static LoadPoint from_rates(double lambda_rate, double mu_rate);
  static LoadPoint from_rho(double rho, double mu_rate = 1.0);
};

// Mean busy period following a vacation of length v: v * rho / (1 - rho).
double expected_busy_given_vacation(double v, const LoadPoint& load);

// Load recovered from mean busy and vacation lengths: B / (V + B).
double load_from_periods(double busy_mean, double vacation_mean);

// Vacation CDF with one primary sleeping t_short and M-1 decorrelated
// backups sleeping t_long.
double vacation_cdf_high_load(double x, const ModelParams& p);

// Continuous part of the high-load vacation density, valid on [0, t_short).
double vacation_pdf_high_load(double x, const ModelParams& p);

// Probability mass sitting exactly at x = t_short in the high-load
// distribution: (1 - t_short/t_long)^(M-1).
double vacation_atom_high_load(const ModelParams& p);

double mean_vacation_high_load(const ModelParams& p);

// Probability that a backup wakes before the primary's short timer.
double backup_success_prob(const ModelParams& p);

// Vacation CDF when every thread is primary (all sleep t_short).
double vacation_cdf_low_load(double x, const ModelParams& p);
double mean_vacation_low_load(const ModelParams& p);

struct GeneralVacation {
  double exact = 0.0;
  double approx = 0.0;  // t_long >> t_short simplification
};

// Mean vacation when each non-serving thread is primary with probability
// primary_prob, independently.
GeneralVacation mean_vacation_general(const ModelParams& p, double primary_prob);

// Short timer that holds the mean vacation at target for M threads on
// one queue. Finite at rho = 1 (returns target).
double adaptive_ts(int m, double rho, double target);

// Per-queue variant with M/N threads per queue on average; M/N may be
// fractional.
double adaptive_ts_multiqueue(int m, int n, double rho_i, double target);

}  // namespace metronome::analytics
