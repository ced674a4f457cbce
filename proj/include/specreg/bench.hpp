#pragma once

// Exact risk functionals and a Monte Carlo harness for the data-driven
// selector. All risks are computed in spectral coordinates, which is exact
// because the basis psi_k is orthonormal.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "specreg/penalty.hpp"
#include "specreg/random.hpp"
#include "specreg/selection.hpp"
#include "specreg/spectral.hpp"

namespace specreg {

// L_alpha(beta) = sum (1 - h)^2 beta^2 + sigma^2 sum h^2 / lambda.
double exact_risk(const SpectralModel& model, std::span<const double> h);

// E R^sigma_alpha[Y, pen] = sum (1 - h)^2 (beta^2 + sigma^2 / lambda) + sigma^2 pen.
double expected_known_contrast(const SpectralModel& model, std::span<const double> h, double pen);

// sigma^2 sum 1 / lambda, the risk of the unsmoothed least-squares estimate.
double least_squares_risk(const SpectralModel& model);

// Bias inflation sum (1 - h)^2 lambda beta^2 / sum (1 - h)^2 of sigma_hat^2.
double variance_estimator_bias(const SpectralModel& model, std::span<const double> h);

/// Penalized mean risk
///   L_alpha + (1 + gamma) sigma^2 Q+ + Pen sum (1 - h)^2 lambda beta^2 / sum (1 - h)^2.
/// Empty when ||1 - h|| = 0 (the variance estimate is undefined there).
std::optional<double> rbar(const SpectralModel& model, std::span<const double> h, double pen_total,
                           double q_plus, double gamma);

struct RiskProfile {
  std::vector<double> exact_risk;
  // +inf on degenerate rows, which never become the oracle.
  std::vector<double> rbar;
  double r = 0.0;
  std::size_t oracle_index = 0;
};

// With PenaltyChoice::unbiased the penalized risk uses Pen_u and Q+ = 0.
RiskProfile risk_profile(const SpectralModel& model, const PenaltyTable& table,
                         PenaltyChoice choice = PenaltyChoice::adaptive);

struct OracleRisk {
  double r = 0.0;
  std::size_t index = 0;
};

OracleRisk oracle_risk(const RiskProfile& profile);

// R(x) = x / log(x).
double big_r(double x);

/// Right side of the oracle inequality with a user-supplied generic constant.
/// Empty ("bound not evaluable") when its preconditions fail.
std::optional<double> theorem_bound(double r, double sigma2, double d_ref, double psi_value,
                                    double gamma, double constant);

// sup_alpha [eta_alpha - (1 + gamma) Q+(alpha)]_+ for the given noise draw xi'.
double excess_sup_stat(const Spectrum& spectrum, const PenaltyTable& table, std::span<const double> xi);
double excess_sup_stat(const Spectrum& spectrum, const PenaltyTable& table, RandomStream& stream);

struct BenchConfig {
  SelectionOptions selection;  // sigma2 is taken from the model in known mode
  std::size_t replications = 1;
  std::uint64_t seed = 0;
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct ReplicationRecord {
  std::size_t rep = 0;
  std::size_t alpha_hat_index = 0;
  double loss = 0.0;
  double sigma_hat2 = 0.0;  // NaN in known-sigma mode
  double excess_sup = 0.0;  // normalized by D(alpha_top)
};

struct SummaryStats {
  double mean = 0.0;
  double variance = 0.0;  // sample variance (n - 1 denominator)
  double standard_error = 0.0;
  double median = 0.0;
  double q90 = 0.0;
  double q95 = 0.0;
  double q99 = 0.0;
};

SummaryStats summarize(std::span<const double> values);

struct BenchReport {
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  SummaryStats loss;  // ||beta - beta_hat_{alpha_hat}||^2
  double empirical_risk = 0.0;
  double empirical_risk_se = 0.0;
  double r_beta = 0.0;
  std::size_t oracle_alpha_index = 0;
  double oracle_ratio = 0.0;
  std::vector<std::size_t> alpha_hat_histogram;
  std::optional<SummaryStats> sigma_hat2;
  SummaryStats excess_sup;  // normalized by D(alpha_top)
  double d_ref = 0.0;
  double psi = 0.0;
  std::optional<double> theorem_bound;  // generic constant = 1
  std::vector<ReplicationRecord> records;
};

BenchReport mc_run(const SpectralModel& model, const PenaltyTable& table, const BenchConfig& config);

}  // namespace specreg
