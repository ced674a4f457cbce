#pragma once

// Empirical-risk choice of alpha over a grid.
//
// Known sigma:   R^sigma_alpha = sum (1 - h)^2 y^2 + sigma^2 Pen(alpha)
// Unknown sigma: R_alpha       = sum (1 - h)^2 y^2 + sigma_hat^2_alpha Pen(alpha)
// with sigma_hat^2_alpha = sum lambda (1 - h)^2 y^2 / sum (1 - h)^2.
//
// The alpha-free shift -||beta - beta_hat_0||^2 is never added; argmin ignores it.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specreg/penalty.hpp"
#include "specreg/spectral.hpp"

namespace specreg {

enum class NoiseMode { known, unknown };
enum class PenaltyChoice {
  adaptive,  // Pen_u + (1 + gamma) Q+
  unbiased,  // Pen_u only
};

std::string to_string(NoiseMode mode);
NoiseMode noise_mode_from_string(const std::string& name);
std::string to_string(PenaltyChoice choice);
PenaltyChoice penalty_choice_from_string(const std::string& name);

struct SelectionOptions {
  NoiseMode mode = NoiseMode::unknown;
  double sigma2 = 0.0;  // known mode only
  PenaltyChoice penalty = PenaltyChoice::adaptive;
  // Add the (n - r)-dimensional orthogonal residual of raw-matrix data to the
  // variance estimate as extra pure-noise degrees of freedom.
  bool include_orthogonal_residual = false;
};

struct SelectionResult {
  double alpha_hat = 0.0;
  std::size_t alpha_hat_index = 0;
  std::optional<double> sigma_hat2;  // unknown mode only
  std::vector<double> contrasts;
  std::vector<double> estimate;  // h_{alpha_hat}(k) y(k)
};

// ||beta_hat_0 - beta_hat_alpha||^2 = sum (1 - h)^2 y^2.
double smoothing_residual2(const SpectralData& data, std::span<const double> h);

double contrast_known_sigma(const SpectralData& data, std::span<const double> h, double pen, double sigma2);

double sigma_hat2(const SpectralData& data, std::span<const double> h,
                  bool include_orthogonal_residual = false);

double contrast_unknown_sigma(const SpectralData& data, std::span<const double> h, double pen,
                              bool include_orthogonal_residual = false);

double row_penalty(const PenaltyRow& row, PenaltyChoice choice);

// Minimizes the contrast over the table's grid; ties go to the largest alpha.
SelectionResult select_alpha(const SpectralData& data, const PenaltyTable& table,
                             const SelectionOptions& options);

/// Both sides of the ordered-family covariance bound
///   sum (h_a - h_b)^2 b^2  <=  | sum (1 - h_a)^2 b^2 - sum (1 - h_b)^2 b^2 |.
struct CovarianceGap {
  double lhs = 0.0;
  double rhs = 0.0;
};

CovarianceGap covariance_gap(std::span<const double> h_a, std::span<const double> h_b,
                             std::span<const double> weights);

}  // namespace specreg
