#pragma once

// Penalties for data-driven choice of alpha.
//
//   Pen_u(alpha)  = 2 sum lambda^-1 h                      (unbiased risk)
//   Pen_CV(alpha) = 2 sum h                                 (cross validation)
//   D(alpha)      = { 2 sum lambda^-2 (2h - h^2)^2 }^1/2    (std. dev. of eta_alpha)
//   rho(k)        = sqrt(2) (2h(k) - h(k)^2) / (lambda(k) D(alpha)),   sum rho^2 = 1
//   F(x)          = log(1 - 2x) / 2 + x + 2x^2 / (1 - 2x)
//   mu            : sum_k F(mu rho(k)) = log(D(alpha) / D(alpha_top))
//   Q+(alpha)     = 2 D(alpha) mu sum_k rho(k)^2 / (1 - 2 mu rho(k))
//   Pen(alpha)    = Pen_u(alpha) + (1 + gamma) Q+(alpha)
//
// The reference D(alpha_top) is always the last (smoothest) row of a grid.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "specreg/smoothers.hpp"
#include "specreg/spectral.hpp"

namespace specreg {

inline constexpr double kDefaultGamma = 0.1;

double pen_u(std::span<const double> h, const Spectrum& spectrum);
double pen_cv(std::span<const double> h);
double d_of_alpha(std::span<const double> h, const Spectrum& spectrum);
// Normalized weights rho(k); throws "degenerate smoother" when h is identically 0.
std::vector<double> rho_weights(std::span<const double> h, const Spectrum& spectrum);

double big_f(double x);

struct MuSolution {
  double mu = 0.0;
  // |sum_k F(mu rho(k)) - log_ratio| at the returned mu.
  double residual = 0.0;
  // Set when a negative log_ratio (rounding noise around D(alpha) = D(alpha_top)) was clamped to 0.
  bool clamped = false;
  int iterations = 0;
};

MuSolution solve_mu(std::span<const double> h, const Spectrum& spectrum, double log_ratio);

struct QPlusDetail {
  double q_plus = 0.0;
  double d = 0.0;
  double log_ratio = 0.0;
  MuSolution mu;
};

QPlusDetail q_plus_detail(std::span<const double> h, const Spectrum& spectrum, double d_ref);
double q_plus(std::span<const double> h, const Spectrum& spectrum, double d_ref);
double total_pen(std::span<const double> h, const Spectrum& spectrum, double gamma, double d_ref);

struct PenaltyRow {
  double alpha = 0.0;
  double pen_u = 0.0;
  double pen_cv = 0.0;
  double d = 0.0;
  double mu = 0.0;
  double q_plus = 0.0;
  double pen_total = 0.0;
  double h_lambda_norm2 = 0.0;        // sum h^2 / lambda
  double one_minus_h_norm2 = 0.0;     // sum (1 - h)^2
  double one_minus_h_sq_norm2 = 0.0;  // sum (1 - h)^4
  double max_h_over_lambda = 0.0;
  double log_ratio = 0.0;             // log(D(alpha) / D(alpha_top)), clamped at 0
  double mu_residual = 0.0;
  bool mu_clamped = false;
};

struct PenaltyTable {
  double gamma = kDefaultGamma;
  std::vector<PenaltyRow> rows;
  double psi = 0.0;
  // h profiles the rows were computed from, aligned with rows.
  SmootherTable profile;

  double d_ref() const { return rows.back().d; }
};

void validate_gamma(double gamma);

PenaltyTable build_penalty_table(const SmootherTable& profile, const Spectrum& spectrum, double gamma);
PenaltyTable build_penalty_table(const SmootherFamily& family, const AlphaGrid& grid,
                                 const Spectrum& spectrum, double gamma);

// Psi(alpha_floor, alpha_top) from the first and last rows of the table.
double psi(const PenaltyTable& table);

struct ConditionsReport {
  // Minimum over rows of min(first_ratio, second_ratio).
  double c2_hat = 0.0;
  std::size_t argmin_row = 0;
  std::vector<double> first_ratio;   // ||h||_lambda^2 / sum lambda^-1 h
  std::vector<double> second_ratio;  // [||h||_lambda^2 / log(D/D_top) + max h/lambda] / D
  bool passed() const { return c2_hat > 0.0; }
};

ConditionsReport check_conditions(const PenaltyTable& table, const Spectrum& spectrum);

struct Prop7Report {
  std::size_t rows_checked = 0;
  std::size_t pairs_checked = 0;
  std::size_t rows_with_large_ratio = 0;  // rows where D >= e^2 D_top
  // Violation counts per assertion:
  //   a: Q+ >= D max{sqrt(log r), log r / mu}
  //   b: mu >= min{sqrt(log r) / 2, 1/4}
  //   c: D >= mu Q+ / log(mu Q+ / D_top) when D >= e^2 D_top
  //   d: D(a1) / D(a2) <= Q+(a1) / Q+(a2) for a1 <= a2
  std::size_t failures_a = 0;
  std::size_t failures_b = 0;
  std::size_t failures_c = 0;
  std::size_t failures_d = 0;
  // Largest required/actual ratio seen for c and d (<= 1 + slack when they hold).
  double worst_ratio_c = 0.0;
  double worst_ratio_d = 0.0;
  // First few violations, human readable.
  std::vector<std::string> messages;

  std::size_t failures() const { return failures_a + failures_b + failures_c + failures_d; }
  bool passed() const { return failures() == 0; }
};

// Structural inequalities every table must satisfy (slack is relative).
Prop7Report verify_prop7(const PenaltyTable& table, double slack = 1e-9);

}  // namespace specreg
