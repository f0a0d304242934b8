#include "metronome/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metronome/error.hpp"

namespace metronome::analytics {
namespace {

double clamp_prob(double v) { return std::clamp(v, 0.0, 1.0); }

void require_threads(const ModelParams& p, int min_threads) {
  if (p.m_threads < min_threads) {
    throw ParameterError("m_threads must be >= " + std::to_string(min_threads) +
                         ", got " + std::to_string(p.m_threads));
  }
}

void require_non_negative(double x, const char* what) {
  if (!(x >= 0.0)) {
    throw DomainError(std::string(what) + " must be >= 0");
  }
}

// 1 + r + r^2 + ... + r^(k-1) for real k >= 1; equals (1 - r^k)/(1 - r)
// away from r = 1 and k at r = 1.
double geometric_sum(double r, double k) {
  if (k == std::floor(k) && k <= 4096.0) {
    double sum = 0.0;
    double term = 1.0;
    for (int j = 0; j < static_cast<int>(k); ++j) {
      sum += term;
      term *= r;
    }
    return sum;
  }
  if (r == 1.0) return k;
  const double rk = std::pow(r, k);
  const double denom = 1.0 - r;
  if (std::abs(denom) < 1e-8) {
    // d/dr of r^k near 1; first-order expansion keeps the ratio finite.
    return k * (1.0 - 0.5 * (k - 1.0) * denom);
  }
  return (1.0 - rk) / denom;
}

}  // namespace

void ModelParams::validate() const {
  if (m_threads < 1) throw ParameterError("m_threads must be >= 1");
  if (n_queues < 1) throw ParameterError("n_queues must be >= 1");
  if (!(t_short > 0.0)) throw ParameterError("t_short must be > 0");
  if (!(t_long > 0.0)) throw ParameterError("t_long must be > 0");
  if (!(target_vacation > 0.0)) {
    throw ParameterError("target_vacation must be > 0");
  }
  if (t_short > t_long) throw ParameterError("t_short must be <= t_long");
  if (n_queues > 1 && m_threads < n_queues) {
    throw ParameterError("m_threads must be >= n_queues");
  }
}

LoadPoint LoadPoint::from_rates(double lambda_rate, double mu_rate) {
  if (!(mu_rate > 0.0)) throw ParameterError("mu must be > 0");
  if (!(lambda_rate >= 0.0)) throw ParameterError("lambda must be >= 0");
  return LoadPoint{lambda_rate, mu_rate, lambda_rate / mu_rate};
}

LoadPoint LoadPoint::from_rho(double rho, double mu_rate) {
  if (!(rho >= 0.0)) throw ParameterError("rho must be >= 0");
  return from_rates(rho * mu_rate, mu_rate);
}

double expected_busy_given_vacation(double v, const LoadPoint& load) {
  require_non_negative(v, "vacation");
  if (!(load.rho < 1.0)) {
    throw StabilityError("rho must be < 1 for a finite busy period");
  }
  if (load.rho <= 0.0) return 0.0;
  return v * load.rho / (1.0 - load.rho);
}

double load_from_periods(double busy_mean, double vacation_mean) {
  require_non_negative(busy_mean, "busy period");
  require_non_negative(vacation_mean, "vacation period");
  const double cycle = vacation_mean + busy_mean;
  if (cycle <= 0.0) throw DomainError("load undefined for an empty cycle");
  return clamp_prob(busy_mean / cycle);
}

double vacation_cdf_high_load(double x, const ModelParams& p) {
  require_threads(p, 2);
  require_non_negative(x, "x");
  if (x >= p.t_short) return 1.0;
  const double base = 1.0 - x / p.t_long;
  return clamp_prob(1.0 - std::pow(base, p.m_threads - 1));
}

double vacation_pdf_high_load(double x, const ModelParams& p) {
  require_threads(p, 2);
  require_non_negative(x, "x");
  if (x >= p.t_short) {
    throw DomainError("continuous density defined only below t_short");
  }
  const double base = 1.0 - x / p.t_long;
  return (p.m_threads - 1) / p.t_long * std::pow(base, p.m_threads - 2);
}

double vacation_atom_high_load(const ModelParams& p) {
  require_threads(p, 1);
  return clamp_prob(std::pow(1.0 - p.t_short / p.t_long, p.m_threads - 1));
}

double mean_vacation_high_load(const ModelParams& p) {
  require_threads(p, 1);
  const double m = p.m_threads;
  return p.t_long / m * (1.0 - std::pow(1.0 - p.t_short / p.t_long, m));
}

double backup_success_prob(const ModelParams& p) {
  require_threads(p, 2);
  const double m = p.m_threads;
  return clamp_prob(std::pow(1.0 - p.t_short / p.t_long, m - 1.0) / (m - 1.0));
}

double vacation_cdf_low_load(double x, const ModelParams& p) {
  require_threads(p, 1);
  require_non_negative(x, "x");
  if (x >= p.t_short) return 1.0;
  return clamp_prob(1.0 - std::pow(1.0 - x / p.t_short, p.m_threads));
}

double mean_vacation_low_load(const ModelParams& p) {
  require_threads(p, 1);
  return p.t_short / p.m_threads;
}

GeneralVacation mean_vacation_general(const ModelParams& p, double primary_prob) {
  require_threads(p, 1);
  if (!(primary_prob >= 0.0 && primary_prob <= 1.0)) {
    throw DomainError("primary_prob must lie in [0, 1]");
  }
  const double m = p.m_threads;
  const double q = 1.0 - primary_prob;
  GeneralVacation out;
  // Integral of (1 - p x/T_S - (1-p) x/T_L)^(M-1) over [0, T_S).
  const double rate = primary_prob / p.t_short + q / p.t_long;
  out.exact =
      (1.0 - std::pow(q * (1.0 - p.t_short / p.t_long), m)) / (m * rate);
  // (1 - q^M) / p = 1 + q + ... + q^(M-1), finite at p = 0.
  out.approx = p.t_short / m * geometric_sum(q, m);
  return out;
}

double adaptive_ts(int m, double rho, double target) {
  if (m < 1) throw ParameterError("m must be >= 1");
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("rho must lie in [0, 1]");
  return target * m / geometric_sum(rho, m);
}

double adaptive_ts_multiqueue(int m, int n, double rho_i, double target) {
  if (n < 1) throw ParameterError("n must be >= 1");
  if (m < n) throw ParameterError("m must be >= n");
  if (!(rho_i >= 0.0 && rho_i <= 1.0)) {
    throw DomainError("rho must lie in [0, 1]");
  }
  const double ratio = static_cast<double>(m) / n;
  return target * ratio / geometric_sum(rho_i, ratio);
}

}  // namespace metronome::analytics
